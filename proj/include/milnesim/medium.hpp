#pragma once

// Time-dependent coefficients of the parametric oscillator that stands in for
// the propagation medium: angular frequency omega(t) and damping beta(t).
//
// Time is nondimensional throughout: the asymptotic frequency is scaled to 1,
// so every omega profile has base = 1 and returns to it far from its centre.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "milnesim/errors.hpp"

namespace milnesim {

enum class ProfileKind { constant, gaussian_bump, sech2_bump, table };

inline const char* to_string(ProfileKind k) {
    switch (k) {
    case ProfileKind::constant: return "constant";
    case ProfileKind::gaussian_bump: return "gaussian-bump";
    case ProfileKind::sech2_bump: return "sech2-bump";
    case ProfileKind::table: return "table";
    }
    return "unknown";
}

struct CoefficientProfile {
    ProfileKind kind = ProfileKind::constant;
    double base = 1.0;
    double amplitude = 0.0;
    double center = 0.0;
    double width = 1.0;
    // (t, value) knots for kind == table; times strictly increasing.
    std::vector<std::pair<double, double>> table;

    static CoefficientProfile constant(double value) {
        return {ProfileKind::constant, value, 0.0, 0.0, 1.0, {}};
    }
    static CoefficientProfile gaussian_bump(double base, double amplitude, double center,
                                            double width) {
        return {ProfileKind::gaussian_bump, base, amplitude, center, width, {}};
    }
    static CoefficientProfile sech2_bump(double base, double amplitude, double center,
                                         double width) {
        return {ProfileKind::sech2_bump, base, amplitude, center, width, {}};
    }
    static CoefficientProfile tabulated(std::vector<std::pair<double, double>> knots) {
        CoefficientProfile p;
        p.kind = ProfileKind::table;
        p.table = std::move(knots);
        if (!p.table.empty()) p.base = p.table.front().second;
        return p;
    }

    bool is_bump() const {
        return kind == ProfileKind::gaussian_bump || kind == ProfileKind::sech2_bump;
    }

    friend bool operator==(const CoefficientProfile&, const CoefficientProfile&) = default;
};

// Evaluates the profile formula without any role-specific sign check.
inline double profile_value(const CoefficientProfile& p, double t) {
    switch (p.kind) {
    case ProfileKind::constant: return p.base;
    case ProfileKind::gaussian_bump: {
        const double s = (t - p.center) / p.width;
        return p.base + p.amplitude * std::exp(-0.5 * s * s);
    }
    case ProfileKind::sech2_bump: {
        const double sech = 1.0 / std::cosh((t - p.center) / p.width);
        return p.base + p.amplitude * sech * sech;
    }
    case ProfileKind::table: {
        const auto& tb = p.table;
        if (tb.empty()) throw InvalidProfile("table profile has no knots");
        if (t <= tb.front().first) return tb.front().second;
        if (t >= tb.back().first) return tb.back().second;
        auto it = std::upper_bound(tb.begin(), tb.end(), t,
                                   [](double v, const auto& knot) { return v < knot.first; });
        const auto& [t1, v1] = *it;
        const auto& [t0, v0] = *(it - 1);
        if (t == t0) return v0;
        return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
    }
    }
    throw InvalidProfile("unknown profile kind");
}

// Structural problems (width, knot ordering); empty when the profile is usable.
inline std::vector<std::string> profile_issues(const CoefficientProfile& p,
                                               const std::string& name) {
    std::vector<std::string> issues;
    if (!std::isfinite(p.base) || !std::isfinite(p.amplitude) || !std::isfinite(p.center))
        issues.push_back(name + ": non-finite parameter");
    if (p.is_bump() && !(p.width > 0)) issues.push_back(name + ".width must be positive");
    if (p.kind == ProfileKind::table) {
        if (p.table.empty()) issues.push_back(name + ".table must have at least one knot");
        for (std::size_t i = 1; i < p.table.size(); ++i) {
            if (!(p.table[i].first > p.table[i - 1].first)) {
                issues.push_back(name + ".table times must be strictly increasing");
                break;
            }
        }
    }
    return issues;
}

inline double omega_at(const CoefficientProfile& profile, double t) {
    const double w = profile_value(profile, t);
    if (!(w > 0)) throw InvalidProfile("omega profile is not positive at t=" + std::to_string(t));
    return w;
}

inline double beta_at(const CoefficientProfile& profile, double t) {
    const double b = profile_value(profile, t);
    if (!(b >= 0)) throw InvalidProfile("beta profile is negative at t=" + std::to_string(t));
    return b;
}

// True when the profile has relaxed to its base value at +-horizon within eps,
// and for bumps the horizon clears the centre by at least eight widths.
inline bool validate_asymptotics(const CoefficientProfile& profile, double horizon, double eps) {
    if (!(horizon > 0) || !(eps > 0)) throw DomainError("validate_asymptotics needs T > 0, eps > 0");
    if (profile.is_bump() && horizon < profile.center + 8 * profile.width) return false;
    const double base = profile.base;
    return std::abs(profile_value(profile, horizon) - base) <= eps &&
           std::abs(profile_value(profile, -horizon) - base) <= eps;
}

struct MediumSpec {
    CoefficientProfile omega = CoefficientProfile::constant(1.0);
    CoefficientProfile beta = CoefficientProfile::constant(0.0);
    double sound_speed = 1480.0;
    // Test fixture only: forces omega(t) = 0, which no valid profile can produce.
    bool zero_omega = false;

    friend bool operator==(const MediumSpec&, const MediumSpec&) = default;
};

inline double omega_at(const MediumSpec& m, double t) {
    return m.zero_omega ? 0.0 : omega_at(m.omega, t);
}

inline double beta_at(const MediumSpec& m, double t) { return beta_at(m.beta, t); }

inline std::vector<std::string> medium_issues(const MediumSpec& m) {
    auto issues = profile_issues(m.omega, "medium.omega");
    auto more = profile_issues(m.beta, "medium.beta");
    issues.insert(issues.end(), more.begin(), more.end());
    if (!(m.sound_speed > 0)) issues.push_back("sound_speed must be positive");
    if (!m.zero_omega && m.omega.kind != ProfileKind::table && m.omega.base != 1.0)
        issues.push_back("medium.omega.base must be 1 (unit asymptotic frequency)");
    if (issues.empty() && !m.zero_omega) {
        // Sufficient positivity checks for each family.
        const auto& w = m.omega;
        if (w.kind == ProfileKind::table) {
            for (const auto& [t, v] : w.table)
                if (!(v > 0)) {
                    issues.push_back("medium.omega.table values must be positive");
                    break;
                }
        } else if (!(w.base > 0) || !(w.base + std::min(w.amplitude, 0.0) > 0)) {
            issues.push_back("medium.omega must stay positive (base + amplitude > 0)");
        }
        const auto& b = m.beta;
        if (b.kind == ProfileKind::table) {
            for (const auto& [t, v] : b.table)
                if (!(v >= 0)) {
                    issues.push_back("medium.beta.table values must be non-negative");
                    break;
                }
        } else if (!(b.base >= 0) || !(b.base + std::min(b.amplitude, 0.0) >= 0)) {
            issues.push_back("medium.beta must stay non-negative (base + amplitude >= 0)");
        }
    }
    return issues;
}

} // namespace milnesim
