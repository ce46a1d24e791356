#pragma once

// Explicit Runge-Kutta integration of first-order ODE systems.
//
// integrate_fixed   classic RK4 with a constant step (final partial step allowed)
// integrate_adaptive Dormand-Prince 5(4) with PI-free step control and cubic
//                    Hermite dense output between recorded steps
//
// Both report divergence through Trajectory::status instead of throwing:
// several systems integrated here (the Milne pressure equation in
// particular) are expected to run away for some parameter choices.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "milnesim/errors.hpp"

namespace milnesim::solver {

using StateVector = std::vector<double>;

template <class F>
concept OdeRhs = std::invocable<F&, double, std::span<const double>, std::span<double>>;

enum class Status { completed, aborted_blowup, aborted_step_limit };

inline const char* to_string(Status s) {
    switch (s) {
    case Status::completed: return "completed";
    case Status::aborted_blowup: return "aborted-blowup";
    case Status::aborted_step_limit: return "aborted-step-limit";
    }
    return "unknown";
}

struct TimeSpan {
    double t0;
    double t1;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<StateVector> states;
    // dy/dt at each recorded sample; used for Hermite dense output.
    std::vector<StateVector> derivatives;
    Status status = Status::completed;
    std::string message;
    // Time of the step that tripped the blow-up guard (the offending state is not stored).
    std::optional<double> abort_time;
    std::size_t steps = 0;

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }
    bool completed() const { return status == Status::completed; }

    StateVector interpolate(double t) const {
        if (times.empty()) throw DomainError("interpolate: empty trajectory");
        if (t < times.front() || t > times.back())
            throw DomainError("interpolate: t outside the integrated range");
        auto it = std::upper_bound(times.begin(), times.end(), t);
        if (it == times.end()) return states.back();
        const std::size_t hi = static_cast<std::size_t>(it - times.begin());
        const std::size_t lo = hi - 1;
        const double h = times[hi] - times[lo];
        const double s = (t - times[lo]) / h;
        StateVector out(states[lo].size());
        const bool hermite = derivatives.size() == states.size();
        const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
        const double h10 = s * (1 - s) * (1 - s);
        const double h01 = s * s * (3 - 2 * s);
        const double h11 = s * s * (s - 1);
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (hermite) {
                out[i] = h00 * states[lo][i] + h10 * h * derivatives[lo][i] +
                         h01 * states[hi][i] + h11 * h * derivatives[hi][i];
            } else {
                out[i] = (1 - s) * states[lo][i] + s * states[hi][i];
            }
        }
        return out;
    }
};

struct FixedOptions {
    double dt = 1e-3;
    // Defaults to 1e6 * max(max|y0|, 1).
    std::optional<double> blowup_threshold;
    // Record every stride-th step; the first and last states are always recorded.
    std::size_t stride = 1;
};

struct AdaptiveOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    std::optional<double> blowup_threshold;
    std::size_t max_steps = 10'000'000;
    std::size_t stride = 1;
    double max_step = std::numeric_limits<double>::infinity();
};

namespace detail {

inline double default_threshold(const StateVector& y0) {
    double m = 1.0;
    for (double v : y0) m = std::max(m, std::abs(v));
    return 1e6 * m;
}

inline bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

inline bool exceeds(std::span<const double> v, double threshold) {
    return std::any_of(v.begin(), v.end(),
                       [&](double x) { return !std::isfinite(x) || std::abs(x) > threshold; });
}

inline void check_span(const TimeSpan& span) {
    if (!(span.t1 > span.t0)) throw DomainError("integration span requires t1 > t0");
}

inline std::string at_time(const char* what, double t) {
    std::ostringstream os;
    os.precision(17);
    os << what << " at t=" << t;
    return os.str();
}

} // namespace detail

template <OdeRhs Rhs>
Trajectory integrate_fixed(Rhs&& rhs, const StateVector& y0, TimeSpan span,
                           const FixedOptions& opts = {}) {
    detail::check_span(span);
    if (!(opts.dt > 0)) throw DomainError("integrate_fixed requires dt > 0");
    if (opts.stride == 0) throw DomainError("stride must be positive");

    const std::size_t n = y0.size();
    const double threshold = opts.blowup_threshold.value_or(detail::default_threshold(y0));
    const double length = span.t1 - span.t0;
    const auto n_steps = static_cast<std::size_t>(std::ceil(length / opts.dt - 1e-9));

    Trajectory traj;
    StateVector y = y0, k1(n), k2(n), k3(n), k4(n), tmp(n);

    rhs(span.t0, std::span<const double>(y), std::span<double>(k1));
    if (!detail::all_finite(k1)) {
        traj.status = Status::aborted_blowup;
        traj.message = detail::at_time("non-finite right-hand side", span.t0);
        traj.abort_time = span.t0;
        return traj;
    }
    traj.times.push_back(span.t0);
    traj.states.push_back(y);
    traj.derivatives.push_back(k1);

    auto time_of = [&](std::size_t i) {
        return i >= n_steps ? span.t1 : span.t0 + static_cast<double>(i) * opts.dt;
    };

    for (std::size_t i = 0; i < n_steps; ++i) {
        const double t = time_of(i);
        const double t_next = time_of(i + 1);
        const double h = t_next - t;

        for (std::size_t j = 0; j < n; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
        rhs(t + 0.5 * h, std::span<const double>(tmp), std::span<double>(k2));
        for (std::size_t j = 0; j < n; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
        rhs(t + 0.5 * h, std::span<const double>(tmp), std::span<double>(k3));
        for (std::size_t j = 0; j < n; ++j) tmp[j] = y[j] + h * k3[j];
        rhs(t_next, std::span<const double>(tmp), std::span<double>(k4));
        for (std::size_t j = 0; j < n; ++j)
            tmp[j] = y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        ++traj.steps;

        if (detail::exceeds(tmp, threshold)) {
            traj.status = Status::aborted_blowup;
            const char* why = detail::all_finite(tmp) ? "state exceeded blow-up threshold"
                                                           : "non-finite state";
            traj.message = detail::at_time(why, t_next);
            traj.abort_time = t_next;
            break;
        }
        y.swap(tmp);
        rhs(t_next, std::span<const double>(y), std::span<double>(k1));
        if (!detail::all_finite(k1)) {
            traj.status = Status::aborted_blowup;
            traj.message = detail::at_time("non-finite right-hand side", t_next);
            traj.abort_time = t_next;
            traj.times.push_back(t_next);
            traj.states.push_back(y);
            traj.derivatives.clear();
            return traj;
        }
        if ((i + 1) % opts.stride == 0 || i + 1 == n_steps) {
            traj.times.push_back(t_next);
            traj.states.push_back(y);
            traj.derivatives.push_back(k1);
        }
    }
    // keep the last finite state even when it falls between strides
    if (!traj.completed() && traj.times.back() != time_of(traj.steps - 1)) {
        traj.times.push_back(time_of(traj.steps - 1));
        traj.states.push_back(y);
        traj.derivatives.push_back(k1);
    }
    return traj;
}

namespace detail {

// Dormand-Prince 5(4) tableau.
struct DormandPrince {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // b - b_hat
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

} // namespace detail

template <OdeRhs Rhs>
Trajectory integrate_adaptive(Rhs&& rhs, const StateVector& y0, TimeSpan span,
                              const AdaptiveOptions& opts = {}) {
    using T = detail::DormandPrince;
    detail::check_span(span);
    if (!(opts.rtol > 0) || !(opts.atol > 0))
        throw DomainError("integrate_adaptive requires rtol > 0 and atol > 0");
    if (opts.stride == 0) throw DomainError("stride must be positive");

    const std::size_t n = y0.size();
    const double threshold = opts.blowup_threshold.value_or(detail::default_threshold(y0));
    Trajectory traj;

    StateVector y = y0, k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y_new(n);
    rhs(span.t0, std::span<const double>(y), std::span<double>(k1));
    if (!detail::all_finite(k1)) {
        traj.status = Status::aborted_blowup;
        traj.message = detail::at_time("non-finite right-hand side", span.t0);
        traj.abort_time = span.t0;
        return traj;
    }
    traj.times.push_back(span.t0);
    traj.states.push_back(y);
    traj.derivatives.push_back(k1);

    auto scale = [&](double a, double b) {
        return opts.atol + opts.rtol * std::max(std::abs(a), std::abs(b));
    };
    auto rms = [&](const StateVector& v, const StateVector& ref) {
        double s = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const double r = v[j] / scale(ref[j], ref[j]);
            s += r * r;
        }
        return std::sqrt(s / static_cast<double>(std::max<std::size_t>(n, 1)));
    };

    // Initial step selection (Hairer, Norsett & Wanner, II.4).
    double h;
    {
        const double d0 = rms(y, y), d1 = rms(k1, y);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, span.t1 - span.t0);
        for (std::size_t j = 0; j < n; ++j) tmp[j] = y[j] + h0 * k1[j];
        rhs(span.t0 + h0, std::span<const double>(tmp), std::span<double>(k2));
        for (std::size_t j = 0; j < n; ++j) k2[j] -= k1[j];
        const double d2 = rms(k2, y) / h0;
        const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                     : std::pow(0.01 / std::max(d1, d2), 0.2);
        h = std::min({100 * h0, h1, opts.max_step});
    }

    double t = span.t0;
    std::size_t accepted = 0;
    bool last_recorded = true;
    while (t < span.t1) {
        if (traj.steps >= opts.max_steps) {
            traj.status = Status::aborted_step_limit;
            traj.message = detail::at_time("step-count limit reached", t);
            traj.abort_time = t;
            break;
        }
        if (h < 16 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0)) {
            traj.status = Status::aborted_blowup;
            traj.message = detail::at_time("step size underflow", t);
            traj.abort_time = t;
            break;
        }
        const bool final_step = t + h >= span.t1;
        if (final_step) h = span.t1 - t;

        auto stage = [&](StateVector& out, double c, auto&&... terms) {
            for (std::size_t j = 0; j < n; ++j) tmp[j] = y[j] + h * (... + (terms.first * (*terms.second)[j]));
            rhs(t + c * h, std::span<const double>(tmp), std::span<double>(out));
        };
        using P = std::pair<double, const StateVector*>;
        stage(k2, T::c2, P{T::a21, &k1});
        stage(k3, T::c3, P{T::a31, &k1}, P{T::a32, &k2});
        stage(k4, T::c4, P{T::a41, &k1}, P{T::a42, &k2}, P{T::a43, &k3});
        stage(k5, T::c5, P{T::a51, &k1}, P{T::a52, &k2}, P{T::a53, &k3}, P{T::a54, &k4});
        stage(k6, 1.0, P{T::a61, &k1}, P{T::a62, &k2}, P{T::a63, &k3}, P{T::a64, &k4},
              P{T::a65, &k5});
        for (std::size_t j = 0; j < n; ++j)
            y_new[j] = y[j] + h * (T::b1 * k1[j] + T::b3 * k3[j] + T::b4 * k4[j] + T::b5 * k5[j] +
                                   T::b6 * k6[j]);
        const double t_new = final_step ? span.t1 : t + h;
        rhs(t_new, std::span<const double>(y_new), std::span<double>(k7));
        ++traj.steps;

        double err = 0;
        bool finite = detail::all_finite(y_new) && detail::all_finite(k7);
        if (finite) {
            for (std::size_t j = 0; j < n; ++j) {
                const double e = h * (T::e1 * k1[j] + T::e3 * k3[j] + T::e4 * k4[j] +
                                      T::e5 * k5[j] + T::e6 * k6[j] + T::e7 * k7[j]);
                const double r = e / scale(y[j], y_new[j]);
                err += r * r;
            }
            err = std::sqrt(err / static_cast<double>(std::max<std::size_t>(n, 1)));
        }
        if (!finite || !std::isfinite(err)) {
            h *= 0.2;
            continue;
        }

        if (err <= 1.0) {
            if (detail::exceeds(y_new, threshold)) {
                traj.status = Status::aborted_blowup;
                const char* why = detail::all_finite(y_new) ? "state exceeded blow-up threshold"
                                                               : "non-finite state";
                traj.message = detail::at_time(why, t_new);
                traj.abort_time = t_new;
                break;
            }
            t = t_new;
            y.swap(y_new);
            k1.swap(k7);
            ++accepted;
            last_recorded = accepted % opts.stride == 0 || t >= span.t1;
            if (last_recorded) {
                traj.times.push_back(t);
                traj.states.push_back(y);
                traj.derivatives.push_back(k1);
            }
            const double fac = err == 0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            h = std::min(h * fac, opts.max_step);
        } else {
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
        }
    }
    if (!traj.completed() && !last_recorded) {
        traj.times.push_back(t);
        traj.states.push_back(y);
        traj.derivatives.push_back(k1);
    }
    return traj;
}

} // namespace milnesim::solver
