#pragma once

// Damped and parametric harmonic oscillators,
//   x'' + beta x' + omega^2 x = 0          (constant coefficients)
//   x'' + beta(t) x' + omega(t)^2 x = 0    (parametric)
// plus the closed-form solution of the constant-coefficient case.

#include <algorithm>
#include <cmath>
#include <span>

#include "milnesim/errors.hpp"
#include "milnesim/medium.hpp"
#include "milnesim/solver.hpp"

namespace milnesim {

struct OscillatorState {
    double x = 0.0;
    double v = 0.0;

    friend bool operator==(const OscillatorState&, const OscillatorState&) = default;
};

inline OscillatorState damped_rhs(OscillatorState s, double beta, double omega) {
    return {s.v, -beta * s.v - omega * omega * s.x};
}

inline OscillatorState parametric_rhs(OscillatorState s, const MediumSpec& medium, double t) {
    return damped_rhs(s, beta_at(medium, t), omega_at(medium, t));
}

inline double oscillator_energy(OscillatorState s, double omega) {
    return 0.5 * s.v * s.v + 0.5 * omega * omega * s.x * s.x;
}

inline bool is_critical_damping(double beta, double omega) {
    return std::abs(beta - 2 * omega) <= 1e-12 * std::max(beta, 2 * omega);
}

inline OscillatorState analytic_constant_solution(double beta, double omega, double x0, double v0,
                                                  double t) {
    if (!(omega > 0) || !(beta >= 0))
        throw DomainError("analytic_constant_solution requires omega > 0 and beta >= 0");
    const double a = -0.5 * beta;
    if (is_critical_damping(beta, omega)) {
        // x = (x0 + (v0 - a x0) t) e^{a t}
        const double c = v0 - a * x0;
        const double e = std::exp(a * t);
        return {(x0 + c * t) * e, (c + a * (x0 + c * t)) * e};
    }
    if (beta < 2 * omega) {
        const double wd = std::sqrt(omega * omega - 0.25 * beta * beta);
        const double b = (v0 - a * x0) / wd;
        const double e = std::exp(a * t);
        const double cs = std::cos(wd * t), sn = std::sin(wd * t);
        const double x = e * (x0 * cs + b * sn);
        const double v = a * x + e * (-x0 * wd * sn + b * wd * cs);
        return {x, v};
    }
    const double disc = std::sqrt(0.25 * beta * beta - omega * omega);
    const double r1 = a + disc, r2 = a - disc;
    const double c2 = (v0 - r1 * x0) / (r2 - r1);
    const double c1 = x0 - c2;
    const double e1 = std::exp(r1 * t), e2 = std::exp(r2 * t);
    return {c1 * e1 + c2 * e2, c1 * r1 * e1 + c2 * r2 * e2};
}

// Adapters onto the generic solver's (x, v) state layout.
inline auto damped_system(double beta, double omega) {
    return [beta, omega](double, std::span<const double> y, std::span<double> dy) {
        const auto d = damped_rhs({y[0], y[1]}, beta, omega);
        dy[0] = d.x;
        dy[1] = d.v;
    };
}

inline auto parametric_system(const MediumSpec& medium) {
    return [medium](double t, std::span<const double> y, std::span<double> dy) {
        const auto d = parametric_rhs({y[0], y[1]}, medium, t);
        dy[0] = d.x;
        dy[1] = d.v;
    };
}

} // namespace milnesim
