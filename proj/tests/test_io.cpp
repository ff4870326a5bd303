#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "tmix/config.hpp"
#include "tmix/errors.hpp"
#include "tmix/report.hpp"

using namespace tmix;

TEST_CASE("experiment config parsing") {
    const char* text = R"({
        "map": "intro3",
        "kernel": {"kind": "ball", "epsilon": 0.01},
        "epsilons": [0.05, 0.01],
        "deltas": [0.5, 0.25],
        "grid_exp": 12,
        "seed": 7,
        "out": "outdir",
        "workers": 3
    })";
    ExperimentConfig cfg = config_from_json_text(text);
    CHECK(cfg.map_name == "intro3");
    CHECK(cfg.kernel.kind == KernelKind::BallUniform);
    CHECK(cfg.epsilons.size() == 2);
    CHECK(cfg.deltas.size() == 2);
    CHECK(cfg.seed == 7);
    CHECK(cfg.workers == 3);
    BernoulliMap map = cfg.make_map();
    CHECK(map.p_min() == Rat(1, 3));
}

TEST_CASE("config invariants are enforced") {
    CHECK_THROWS_AS(config_from_json_text(R"({"map": "doubling"})"), ConfigError); // no seed
    CHECK_THROWS_AS(
        config_from_json_text(R"({"map": "doubling", "seed": 1, "epsilons": [0.3]})"),
        ConfigError); // eps > 1/4
    CHECK_THROWS_AS(
        config_from_json_text(R"({"map": "doubling", "seed": 1, "deltas": [1.0]})"),
        ConfigError);
    CHECK_THROWS_AS(config_from_json_text(R"({"map": "nosuch", "seed": 1})"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text(R"({"map": "doubling", "seed": 1,
        "kernel": {"kind": "gaussian", "covariance": [[1.0, 0.5],[0.5, 1.0]]}})"),
                    UnsupportedError);
}

TEST_CASE("inline custom maps parse") {
    const char* text = R"({
        "map": {"d": 1, "branches": [
            {"origin": ["0"], "side": "1/2", "D": [[1]], "e": ["0"]},
            {"origin": ["1/2"], "side": "1/2", "D": [[1]], "e": ["-1"]}]},
        "seed": 1
    })";
    ExperimentConfig cfg = config_from_json_text(text);
    CHECK(cfg.map_name == "custom");
    CHECK(cfg.make_map().validate(3).ok());
}

TEST_CASE("grid size policy aligns to the map denominator") {
    CHECK(grid_size_for(preset_map("doubling"), 14) == 16384);
    CHECK(grid_size_for(preset_map("intro3"), 13) == 12288); // 3 * 2^12
    CHECK(grid_size_for(preset_map("quad2d"), 9) == 512);
}

TEST_CASE("sweep CSV schema and formatting") {
    SweepRow a;
    a.epsilon = 0.03125;
    a.delta = 0.5;
    a.t_mix = 7;
    a.method = "density_worst_case";
    a.wall_ms = 12.5;
    SweepRow b;
    b.epsilon = 0.015625;
    b.delta = 0.5;
    b.t_dis = 9;
    b.method = "power_iteration";
    b.slope_fit_running = 1.02;
    b.theory_lower = 2;
    b.theory_upper = 14.25;
    b.wall_ms = 80.0;
    const std::string csv = sweep_csv({a, b});
    CHECK(csv.rfind("epsilon,delta,t_mix,t_dis,method,slope_fit_running,theory_lower,"
                    "theory_upper,wall_ms\n", 0) == 0);
    CHECK(csv.find("0.03125,0.5,7,,density_worst_case,,,,12.5\n") != std::string::npos);
    CHECK(csv.find("0.015625,0.5,,9,power_iteration,1.02,2,14.25,80\n") != std::string::npos);
    // identical input rows always serialize identically
    CHECK(sweep_csv({a, b}) == csv);
}

TEST_CASE("atomic writes land complete and replace previous content") {
    const std::string path = "/tmp/tmix_io_test/nested/file.txt";
    atomic_write_text(path, "first\n");
    atomic_write_text(path, "second\n");
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(content == "second\n");
}

TEST_CASE("manifest hashing is stable and sensitive") {
    ExperimentConfig cfg = config_from_json_text(R"({"map": "doubling", "seed": 5})");
    const std::string c1 = cfg.canonical();
    CHECK(fnv1a(c1) == fnv1a(cfg.canonical()));
    cfg.seed = 6;
    CHECK(fnv1a(c1) != fnv1a(cfg.canonical()));

    RunManifest man;
    man.command = "sweep-mix";
    man.config_hash = fnv1a(c1);
    man.outputs = {"a.csv"};
    const std::string j = man.to_json_text();
    CHECK(j.find("sweep-mix") != std::string::npos);
    CHECK(j.find("a.csv") != std::string::npos);
}

TEST_CASE("plot data is two columns") {
    const std::string dat = plot_data({{3.466, 5.0}, {4.159, 6.0}});
    CHECK(dat == "3.466 5\n4.159 6\n");
}
