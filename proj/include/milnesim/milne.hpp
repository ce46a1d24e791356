#pragma once

// Milne-type evolution of the acoustic pressure field p(t) in a parametric
// oscillator medium, its Lagrangian/Hamiltonian densities, the Milne energy,
// and the asymptotic envelope q(t) that feeds the transition matrix.
//
// Every formula below is implemented exactly as stated, including the sign of
// each potential term; nothing is "corrected". Two coupling strengths recur:
//
//   damping coupling    beta(t) c k
//   frequency coupling  omega(t)^2 c t k
//
// and the envelope denominator is their sum.

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "milnesim/acoustic_signal.hpp"
#include "milnesim/errors.hpp"
#include "milnesim/medium.hpp"
#include "milnesim/solver.hpp"

namespace milnesim {

struct MilneState {
    double p = 0.0;
    double p_dot = 0.0;

    friend bool operator==(const MilneState&, const MilneState&) = default;
};

inline double damping_coupling(const SignalSpec& s, const MediumSpec& m, double t) {
    return beta_at(m, t) * s.sound_speed() * s.wave_number();
}

inline double frequency_coupling(const SignalSpec& s, const MediumSpec& m, double t) {
    const double w = omega_at(m, t);
    return w * w * s.sound_speed() * t * s.wave_number();
}

inline double envelope_denominator(const SignalSpec& s, const MediumSpec& m, double t) {
    return damping_coupling(s, m, t) + frequency_coupling(s, m, t);
}

// Residual of the oscillator equation after substituting the inverted carrier,
// before the reduction at p = alpha:
//   p'' p^2/a^2 - p p'^2 + beta p' p^2/a^2 - beta c k p - w^2 p acos(p/a) - w^2 c t k p
inline double unreduced_residual(double p, double p_dot, double p_ddot, const SignalSpec& s,
                                 const MediumSpec& m, double t) {
    const double a = s.amplitude();
    if (!(std::abs(p) <= a)) throw DomainError("unreduced_residual: |p| exceeds the amplitude");
    const double beta = beta_at(m, t);
    const double w = omega_at(m, t);
    const double ck = s.sound_speed() * s.wave_number();
    const double r2 = (p * p) / (a * a);
    return p_ddot * r2 - p * p_dot * p_dot + beta * p_dot * r2 - beta * ck * p -
           w * w * p * std::acos(p / a) - w * w * ck * t * p;
}

// (p', p'') with p'' = p p'^2 - beta p' + beta c k p + w^2 c t k p.
inline MilneState milne_rhs(MilneState y, const SignalSpec& s, const MediumSpec& m, double t) {
    const double beta = beta_at(m, t);
    const double p_ddot = y.p * y.p_dot * y.p_dot - beta * y.p_dot +
                          damping_coupling(s, m, t) * y.p + frequency_coupling(s, m, t) * y.p;
    return {y.p_dot, p_ddot};
}

inline auto milne_system(const SignalSpec& s, const MediumSpec& m) {
    return [s, m](double t, std::span<const double> y, std::span<double> dy) {
        const auto d = milne_rhs({y[0], y[1]}, s, m, t);
        dy[0] = d.p;
        dy[1] = d.p_dot;
    };
}

enum class Method { fixed, adaptive };

struct MilneSolverOptions {
    Method method = Method::fixed;
    double dt = 1e-3;
    double rtol = 1e-9;
    double atol = 1e-12;
    std::optional<double> blowup_threshold;
    std::size_t stride = 1;
    std::size_t max_steps = 10'000'000;

    friend bool operator==(const MilneSolverOptions&, const MilneSolverOptions&) = default;
};

// Defaults to p(t0) = alpha, p'(t0) = 0: the reduction holds exactly at p = alpha.
inline solver::Trajectory integrate_milne(const SignalSpec& s, const MediumSpec& m,
                                          solver::TimeSpan span,
                                          std::optional<MilneState> ic = std::nullopt,
                                          const MilneSolverOptions& opts = {}) {
    const MilneState y0 = ic.value_or(MilneState{s.amplitude(), 0.0});
    const solver::StateVector start{y0.p, y0.p_dot};
    if (opts.method == Method::fixed) {
        solver::FixedOptions fo;
        fo.dt = opts.dt;
        fo.blowup_threshold = opts.blowup_threshold;
        fo.stride = opts.stride;
        return solver::integrate_fixed(milne_system(s, m), start, span, fo);
    }
    solver::AdaptiveOptions ao;
    ao.rtol = opts.rtol;
    ao.atol = opts.atol;
    ao.blowup_threshold = opts.blowup_threshold;
    ao.stride = opts.stride;
    ao.max_steps = opts.max_steps;
    return solver::integrate_adaptive(milne_system(s, m), start, span, ao);
}

// V(p, t) = (beta c k / 2) p^2 + (w^2 c t k / 2) p^2
inline double potential_density(double p, const SignalSpec& s, const MediumSpec& m, double t) {
    return 0.5 * envelope_denominator(s, m, t) * p * p;
}

inline double lagrangian_density(MilneState y, const SignalSpec& s, const MediumSpec& m, double t) {
    return 0.5 * y.p_dot * y.p_dot + potential_density(y.p, s, m, t);
}

inline double hamiltonian_density(MilneState y, const SignalSpec& s, const MediumSpec& m,
                                  double t) {
    return 0.5 * y.p_dot * y.p_dot - potential_density(y.p, s, m, t);
}

// E_M = q'^2/2 - V(q, t); with q' = 0 this is -(beta c k + w^2 c t k) q^2 / 2.
inline double milne_energy(MilneState q, const SignalSpec& s, const MediumSpec& m, double t) {
    return hamiltonian_density(q, s, m, t);
}

// The envelope is q = +-i sqrt(R) with radicand
//   R = 2 E_M cos(2t - tau) / (beta c k + w^2 c t k).
// q_squared holds R itself. For R > 0 the i prefactor leaves q purely
// imaginary (imaginary_branch = true, q*q = -R); for R < 0 the two factors of
// i cancel and q is real.
struct EnvelopeSample {
    double t = 0.0;
    double q_squared = 0.0;
    double magnitude = 0.0;
    bool imaginary_branch = false;

    // q*q including the i^2 from the prefactor.
    double signed_square() const { return -q_squared; }
};

inline EnvelopeSample envelope_from_denominator(double energy, double tau, double t,
                                                double denominator) {
    if (denominator == 0.0 || !std::isfinite(denominator))
        throw SingularityError("envelope denominator vanishes at t=" + std::to_string(t), t);
    EnvelopeSample e;
    e.t = t;
    e.q_squared = 2 * energy * std::cos(2 * t - tau) / denominator;
    e.magnitude = std::sqrt(std::abs(e.q_squared));
    e.imaginary_branch = e.q_squared > 0;
    return e;
}

inline EnvelopeSample envelope_q(double energy, double tau, const SignalSpec& s,
                                 const MediumSpec& m, double t) {
    return envelope_from_denominator(energy, tau, t, envelope_denominator(s, m, t));
}

struct QPlusMinus {
    double plus_sq = 0.0;
    double minus_sq = 0.0;
};

// q-^2 = R, q+^2 = -R.
inline QPlusMinus q_plus_minus_squared(double energy, double tau, const SignalSpec& s,
                                       const MediumSpec& m, double t) {
    const double r = envelope_q(energy, tau, s, m, t).q_squared;
    return {-r, r};
}

struct EnvelopeAmplitude {
    double radicand = 0.0;
    double magnitude = 0.0;
    bool imaginary = false;
};

// sqrt(q+^2 cos^2(t - tau) + q-^2 sin^2(t - tau)); a negative radicand is
// reported through `imaginary`, not thrown.
inline EnvelopeAmplitude envelope_amplitude(double q_plus_sq, double q_minus_sq, double tau,
                                            double t) {
    const double c = std::cos(t - tau), sn = std::sin(t - tau);
    EnvelopeAmplitude a;
    a.radicand = q_plus_sq * c * c + q_minus_sq * sn * sn;
    a.magnitude = std::sqrt(std::abs(a.radicand));
    a.imaginary = a.radicand < 0;
    return a;
}

inline double wrap_phase(double angle) {
    double w = std::remainder(angle, 2 * std::numbers::pi);
    if (w <= -std::numbers::pi) w += 2 * std::numbers::pi;
    return w;
}

struct PeriodPhase {
    double tau = 0.0;
    double delta = 0.0;
};

struct PeriodPhaseOptions {
    // Samples with |t - exclude_center| <= exclude_half_width are ignored.
    std::optional<double> exclude_center;
    double exclude_half_width = 0.0;
    // Reference angular frequency; defaults to 2 pi / tau from the crossings.
    std::optional<double> reference_omega;
};

// Period from zero crossings of p, phase lag delta such that p ~ A cos(W t - delta).
inline PeriodPhase estimate_period_phase(const solver::Trajectory& traj,
                                         const PeriodPhaseOptions& opts = {}) {
    if (!traj.completed())
        throw InsufficientData("period/phase estimate needs a completed trajectory (" +
                               std::string(solver::to_string(traj.status)) + ")");
    const auto keep = [&](std::size_t i) {
        return !opts.exclude_center ||
               std::abs(traj.times[i] - *opts.exclude_center) > opts.exclude_half_width;
    };

    std::vector<double> spacings;
    std::size_t crossings = 0;
    std::optional<double> previous;
    for (std::size_t i = 1; i < traj.size(); ++i) {
        if (!keep(i - 1) || !keep(i)) {
            previous.reset();
            continue;
        }
        const double p0 = traj.states[i - 1][0], p1 = traj.states[i][0];
        const bool crossed = (p0 > 0 && p1 <= 0) || (p0 < 0 && p1 >= 0);
        if (!crossed) continue;
        const double t0 = traj.times[i - 1], t1 = traj.times[i];
        const double tc = t0 + (t1 - t0) * p0 / (p0 - p1);
        ++crossings;
        if (previous) spacings.push_back(tc - *previous);
        previous = tc;
    }
    if (crossings < 3 || spacings.empty())
        throw InsufficientData("period/phase estimate needs at least 3 zero crossings, found " +
                               std::to_string(crossings));

    double mean = 0;
    for (double d : spacings) mean += d;
    mean /= static_cast<double>(spacings.size());

    PeriodPhase out;
    out.tau = 2 * mean;
    const double w = opts.reference_omega.value_or(2 * std::numbers::pi / out.tau);
    double sum_s = 0, sum_c = 0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (!keep(i)) continue;
        const double phase = std::atan2(-traj.states[i][1] / w, traj.states[i][0]);
        const double lag = w * traj.times[i] - phase;
        sum_s += std::sin(lag);
        sum_c += std::cos(lag);
    }
    out.delta = wrap_phase(std::atan2(sum_s, sum_c));
    return out;
}

enum class ParamSource { computed, supplied };

struct SignalSummary {
    double energy = 0.0; // E_M
    double tau = 0.0;
    double delta = 0.0;
    ParamSource source = ParamSource::computed;
    // Informational: E_M is expected to satisfy E_M >= 1.
    bool e_m_bound_violated = false;
};

inline SignalSummary make_summary(double energy, double tau, double delta, ParamSource src) {
    if (!(tau > 0)) throw DomainError("effective period must be positive");
    return {energy, tau, wrap_phase(delta), src, energy < 1.0};
}

} // namespace milnesim
