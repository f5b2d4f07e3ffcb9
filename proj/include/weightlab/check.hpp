#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>

namespace weightlab {

/// Relative slack allowed when comparing the two sides of a displayed
/// inequality. The structural constants carry multiplicative headroom far
/// above rounding error, so a violation beyond this tolerance is a bug, not
/// noise.
inline constexpr double kCheckRelTol = 1e-9;

/// One evaluated theorem instance: both sides, the relative slack, and the
/// parameters that produced them.
struct CheckResult {
    std::string name;
    std::string instance;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // (rhs - lhs) / rhs
    bool pass = true;
    std::map<std::string, double> params;
    std::string note;
};

inline CheckResult make_check(std::string name, std::string instance, double lhs, double rhs,
                              std::map<std::string, double> params = {}, std::string note = {}) {
    CheckResult r;
    r.name = std::move(name);
    r.instance = std::move(instance);
    r.lhs = lhs;
    r.rhs = rhs;
    r.pass = lhs <= rhs * (1.0 + kCheckRelTol);
    r.slack = rhs != 0.0 ? (rhs - lhs) / std::abs(rhs) : (lhs == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity());
    r.params = std::move(params);
    r.note = std::move(note);
    return r;
}

}  // namespace weightlab
