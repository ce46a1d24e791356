#pragma once

// Medium transition matrix built from the dynamical parameters (E_M, delta, tau).
//
// Two forms are kept side by side:
//   composed  M = D * [[cos 2d, q-^2 sin 2d], [-q+^2 sin 2d, cos 2d]] * D
//   expanded  the closed-form entries in single angles d and tau
// They do not agree in general (the expanded form uses d where the composed
// product needs 2d, and drops the second rotation). compare_forms reports by
// how much, and never picks one.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "milnesim/milne.hpp"

namespace milnesim {

using Matrix2 = Eigen::Matrix2d;

inline Matrix2 rotation(double tau) {
    Matrix2 d;
    d << std::cos(tau), -std::sin(tau), std::sin(tau), std::cos(tau);
    return d;
}

enum class Provenance { composed, expanded };

inline const char* to_string(Provenance p) {
    return p == Provenance::composed ? "composed" : "expanded";
}

struct TransitionParams {
    double energy = 0.0;
    double delta = 0.0;
    double tau = 0.0;
    double t = 0.0;
};

struct TransitionMatrix {
    Matrix2 m = Matrix2::Identity();
    Provenance provenance = Provenance::composed;
    TransitionParams params;
};

// q+^2 and q-^2 supplied directly, bypassing the envelope model.
inline Matrix2 composed_matrix(double delta, double tau, double q_plus_sq, double q_minus_sq) {
    const double c = std::cos(2 * delta), s = std::sin(2 * delta);
    Matrix2 inner;
    inner << c, q_minus_sq * s, -q_plus_sq * s, c;
    const Matrix2 d = rotation(tau);
    return d * inner * d;
}

inline Matrix2 expanded_matrix(double delta, double tau, double q_plus_sq, double q_minus_sq) {
    const double ct = std::cos(tau), st = std::sin(tau);
    const double cd = std::cos(delta), sd = std::sin(delta);
    Matrix2 m;
    m << ct * cd + q_minus_sq * st * sd, q_minus_sq * sd * ct - st * cd,
        st * cd - q_plus_sq * sd * ct, cd * ct + q_plus_sq * st * sd;
    return m;
}

inline TransitionMatrix transition_composed(double energy, double delta, double tau,
                                            const SignalSpec& s, const MediumSpec& medium,
                                            double t) {
    const auto q = q_plus_minus_squared(energy, tau, s, medium, t);
    return {composed_matrix(delta, tau, q.plus_sq, q.minus_sq), Provenance::composed,
            {energy, delta, tau, t}};
}

inline TransitionMatrix transition_expanded(double energy, double delta, double tau,
                                            const SignalSpec& s, const MediumSpec& medium,
                                            double t) {
    const auto q = q_plus_minus_squared(energy, tau, s, medium, t);
    return {expanded_matrix(delta, tau, q.plus_sq, q.minus_sq), Provenance::expanded,
            {energy, delta, tau, t}};
}

struct FormComparison {
    TransitionMatrix composed;
    TransitionMatrix expanded;
    double discrepancy = 0.0; // max elementwise |composed - expanded|
};

inline FormComparison compare_forms(double energy, double delta, double tau, const SignalSpec& s,
                                    const MediumSpec& medium, double t) {
    FormComparison out{transition_composed(energy, delta, tau, s, medium, t),
                       transition_expanded(energy, delta, tau, s, medium, t), 0.0};
    out.discrepancy = (out.composed.m - out.expanded.m).cwiseAbs().maxCoeff();
    return out;
}

} // namespace milnesim
