#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "tmix/config.hpp"
#include "tmix/errors.hpp"
#include "tmix/maps.hpp"
#include "tmix/rng.hpp"

using namespace tmix;

namespace {

// Independent brute-force oracle for the antichain partition: enumerate all
// words to a depth and keep those with ell_s <= lam < ell_{sigma s}.
std::vector<Tuple> antichain_oracle(const BernoulliMap& map, double lam, int depth) {
    std::vector<Tuple> words{Tuple{}}, picked;
    for (int L = 0; L < depth; ++L) {
        std::vector<Tuple> next;
        for (const Tuple& t : words)
            for (int j = 1; j <= map.branch_count(); ++j) next.push_back(t.appended(j));
        for (const Tuple& t : next) {
            const double ell = map.cylinder(t).ell();
            const double ell_shift = map.cylinder(t.shifted()).ell();
            if (ell <= lam && ell_shift > lam) picked.push_back(t);
        }
        words = std::move(next);
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

BernoulliMap strips2d() {
    // eight 1/2 x 1/4 cells, anisotropic expansion (2 in x, 4 in y): valid
    // branches and tiling, but every cylinder is a 2:1 rectangle
    std::string branches;
    for (int ix = 0; ix < 2; ++ix)
        for (int iy = 0; iy < 4; ++iy) {
            if (!branches.empty()) branches += ",";
            branches += std::string("{\"origin\": [\"") + std::to_string(ix) + "/2\",\"" +
                        std::to_string(iy) + "/4\"], \"side\": [\"1/2\",\"1/4\"], "
                        "\"D\": [[1,0],[0,1]], \"e\": [\"" +
                        std::to_string(-ix) + "\",\"" + std::to_string(-iy) + "\"]}";
        }
    return map_from_json_text(R"({"d": 2, "branches": [)" + branches + "]}");
}

bool in_box(const CylinderSet& c, const std::vector<double>& x, double tol) {
    for (std::size_t a = 0; a < x.size(); ++a) {
        const double lo = to_double(c.origin[a]), hi = to_double(c.origin[a] + c.sides[a]);
        if (x[a] < lo - tol || x[a] > hi + tol) return false;
    }
    return true;
}

} // namespace

TEST_CASE("doubling map validates") {
    BernoulliMap map = preset_map("doubling");
    ValidationReport rep = map.validate(6);
    CHECK(rep.ok());
    CHECK(map.p_min_d() == doctest::Approx(0.5));
    CHECK(map.p_max_d() == doctest::Approx(0.5));
}

TEST_CASE("intro3 map validates with p_min 1/3 and p_max 2/3") {
    BernoulliMap map = preset_map("intro3");
    ValidationReport rep = map.validate(6);
    CHECK(rep.ok());
    CHECK(map.p_min() == Rat(1, 3));
    CHECK(map.p_max() == Rat(2, 3));
}

TEST_CASE("rectangular strip map is rejected with a non-cube cylinder") {
    BernoulliMap map = strips2d();
    ValidationReport rep = map.validate(3);
    CHECK(rep.branches_bijective);
    CHECK(rep.cells_cover);
    CHECK_FALSE(rep.cylinders_cubes);
    CHECK_THROWS_AS(rep.throw_if_invalid(), NonCubeError);
}

TEST_CASE("quad2d validates and the boundary condition holds") {
    BernoulliMap map = preset_map("quad2d");
    CHECK(map.validate(4).ok());
}

TEST_CASE("identity map fails the boundary-preimage condition") {
    BernoulliMap map = preset_map("identity");
    ValidationReport rep = map.validate(2);
    CHECK_FALSE(rep.boundary_covered);
    CHECK_THROWS_AS(rep.throw_if_invalid(), BoundaryError);
}

TEST_CASE("apply_map on the presets") {
    BernoulliMap dbl = preset_map("doubling");
    CHECK(dbl.apply({0.3})[0] == doctest::Approx(0.6).epsilon(1e-14));

    BernoulliMap intro = preset_map("intro3");
    // 3(1-x)/2 at x = 0.5
    CHECK(intro.apply({0.5})[0] == doctest::Approx(0.75).epsilon(1e-14));
    // 3(1-1/3)/2 = 1, wraps to 0
    CHECK(intro.apply({1.0 / 3.0})[0] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("cylinder boxes") {
    BernoulliMap dbl = preset_map("doubling");
    // intersect E_1 with the branch preimage of E_2 by hand: [1/4, 1/2)
    CylinderSet c = dbl.cylinder(Tuple({1, 2}));
    CHECK(c.origin[0] == Rat(1, 4));
    CHECK(c.side() == Rat(1, 4));

    CylinderSet root = dbl.cylinder(Tuple{});
    CHECK(root.side() == Rat(1));
    CHECK(root.origin[0] == Rat(0));

    BernoulliMap intro = preset_map("intro3");
    CylinderSet e1 = intro.cylinder(Tuple({1}));
    CHECK(e1.origin[0] == Rat(0));
    CHECK(e1.side() == Rat(1, 3));

    CHECK_THROWS_AS(dbl.cylinder(Tuple({1, 3})), IndexError);
}

TEST_CASE("enumerate_partition on the doubling map") {
    BernoulliMap dbl = preset_map("doubling");
    auto p1 = dbl.enumerate_partition(0.3);
    REQUIRE(p1.size() == 4);
    for (const auto& c : p1) {
        CHECK(c.tuple.length() == 2);
        CHECK(c.side() == Rat(1, 4));
    }
    auto p2 = dbl.enumerate_partition(0.6);
    REQUIRE(p2.size() == 2);
    for (const auto& c : p2) CHECK(c.tuple.length() == 1);

    CHECK_THROWS_AS(dbl.enumerate_partition(1.5), DomainError);
}

TEST_CASE("enumerate_partition matches the brute-force antichain oracle") {
    for (const char* name : {"doubling", "intro3", "quad2d"}) {
        BernoulliMap map = preset_map(name);
        for (double lam : {0.4, 0.21, 0.09}) {
            auto part = map.enumerate_partition(lam);
            auto oracle = antichain_oracle(map, lam, map.dim() == 1 ? 10 : 5);
            REQUIRE(part.size() == oracle.size());
            for (std::size_t i = 0; i < part.size(); ++i) CHECK(part[i].tuple == oracle[i]);
            // exact partition of the torus
            Rat total = 0;
            for (const auto& c : part) total += c.measure();
            CHECK(total == Rat(1));
            // side bounds p_min^{1/d} lam < ell <= lam
            for (const auto& c : part) {
                CHECK(c.ell() <= lam + 1e-15);
                CHECK(c.ell() > std::pow(map.p_min_d(), 1.0 / map.dim()) * lam - 1e-15);
            }
        }
    }
}

TEST_CASE("intro3 partition at 0.4 has the expected side multiset") {
    BernoulliMap intro = preset_map("intro3");
    auto part = intro.enumerate_partition(0.4);
    std::multiset<Rat> sides;
    for (const auto& c : part) sides.insert(c.side());
    std::multiset<Rat> expect{Rat(1, 3), Rat(2, 9), Rat(4, 27), Rat(8, 27)};
    CHECK(sides == expect);
}

TEST_CASE("perimeter to volume ratio") {
    BernoulliMap dbl = preset_map("doubling");
    CHECK(perimeter_volume_H(dbl.enumerate_partition(0.3)) == doctest::Approx(8.0));

    std::vector<CylinderSet> root{dbl.cylinder(Tuple{})};
    CHECK(perimeter_volume_H(root) == 0.0);

    BernoulliMap quad = preset_map("quad2d");
    CHECK(perimeter_volume_H(quad.enumerate_partition(0.6)) == doctest::Approx(8.0));
}

TEST_CASE("pushforward consistency: points of C_s land in C_{sigma s}") {
    Rng rng(7);
    for (const char* name : {"doubling", "intro3", "quad2d"}) {
        BernoulliMap map = preset_map(name);
        for (int trial = 0; trial < 20; ++trial) {
            const int len = 1 + static_cast<int>(rng.unif() * 5);
            std::vector<int> w;
            for (int i = 0; i < len; ++i)
                w.push_back(1 + static_cast<int>(rng.unif() * map.branch_count()));
            Tuple s(w);
            CylinderSet c = map.cylinder(s);
            std::vector<double> x(static_cast<std::size_t>(map.dim()));
            for (int a = 0; a < map.dim(); ++a)
                x[static_cast<std::size_t>(a)] =
                    to_double(c.origin[static_cast<std::size_t>(a)]) +
                    (0.1 + 0.8 * rng.unif()) * to_double(c.sides[static_cast<std::size_t>(a)]);
            for (int k = 1; k <= len; ++k) {
                x = map.apply(x);
                CHECK(in_box(map.cylinder(s.shifted(k)), x, 1e-9));
            }
        }
    }
}

TEST_CASE("shift geometry is exact: ell_s = ell_{sigma s} * side(E_{s0})") {
    Rng rng(11);
    for (const char* name : {"doubling", "intro3", "quad2d"}) {
        BernoulliMap map = preset_map(name);
        for (int trial = 0; trial < 30; ++trial) {
            const int len = 1 + static_cast<int>(rng.unif() * 6);
            std::vector<int> w;
            for (int i = 0; i < len; ++i)
                w.push_back(1 + static_cast<int>(rng.unif() * map.branch_count()));
            Tuple s(w);
            Rat lhs = map.cylinder(s).side();
            Rat rhs = map.cylinder(s.shifted()).side() * map.branch(w[0]).cell.sides[0];
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("shifted tuple H sums obey the geometric summability bound") {
    // sum_{n=1}^{N} H(sigma^n S)^{1/p} <= H(S)^{1/p} / (1 - p_max^{1/(pd)})
    for (const char* name : {"doubling", "intro3"}) {
        BernoulliMap map = preset_map(name);
        auto part = map.enumerate_partition(0.07);
        int maxlen = 0;
        for (const auto& c : part) maxlen = std::max(maxlen, c.tuple.length());
        for (int p : {1, 2}) {
            double sum = 0.0;
            for (int n = 1; n <= maxlen; ++n)
                sum += std::pow(perimeter_volume_H(map, shifted_tuples(part, n)), 1.0 / p);
            const double bound = std::pow(perimeter_volume_H(part), 1.0 / p) /
                                 (1.0 - std::pow(map.p_max_d(), 1.0 / (p * map.dim())));
            CHECK(sum <= bound * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("map JSON accepts fraction strings and flags overlaps") {
    BernoulliMap m = map_from_json_text(
        R"({"d":1,"branches":[{"origin":["0"],"side":"1/3","D":[[1]],"e":["0"]},
                              {"origin":["1/3"],"side":"2/3","D":[[-1]],"e":["3/2"]}]})");
    CHECK(m.p_min() == Rat(1, 3));
    CHECK(m.validate(4).ok());

    BernoulliMap bad = map_from_json_text(
        R"({"d":1,"branches":[{"origin":["0"],"side":"2/3","D":[[1]],"e":["0"]},
                              {"origin":["1/3"],"side":"2/3","D":[[-1]],"e":["3/2"]}]})");
    ValidationReport rep = bad.validate(2);
    CHECK_FALSE(rep.cells_disjoint);
    CHECK_THROWS_AS(rep.throw_if_invalid(), OverlapError);
}
