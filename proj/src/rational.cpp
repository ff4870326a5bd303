#include "tmix/rational.hpp"

#include <cmath>
#include <cstdlib>

namespace tmix {

Rat rational_from_double(double x) {
    if (!std::isfinite(x)) throw DomainError("rational_from_double: non-finite value");
    if (x == 0.0) return Rat(0);
    int exp = 0;
    double m = std::frexp(x, &exp); // x = m * 2^exp, |m| in [0.5, 1)
    // 53 doublings make the mantissa integral.
    BigInt num = BigInt(static_cast<long long>(std::ldexp(m, 53)));
    exp -= 53;
    Rat r(num);
    if (exp > 0) r *= Rat(BigInt(1) << exp);
    else if (exp < 0) r /= Rat(BigInt(1) << (-exp));
    return r;
}

Rat parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) {
            // integer or decimal literal
            if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
                s.find('E') == std::string::npos) {
                return Rat(BigInt(s));
            }
            return rational_from_double(std::stod(s));
        }
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den == 0) throw DomainError("parse_rational: zero denominator in '" + s + "'");
        return Rat(num, den);
    } catch (const std::exception& e) {
        throw ConfigError("parse_rational: cannot parse '" + s + "': " + e.what());
    }
}

std::string rat_to_string(const Rat& r) {
    std::string out = numerator(r).str();
    if (denominator(r) != 1) out += "/" + denominator(r).str();
    return out;
}

} // namespace tmix
