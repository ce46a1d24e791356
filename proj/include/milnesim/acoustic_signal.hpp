#pragma once

// The travelling acoustic signal: sinusoidal carrier p = alpha cos k(x - ct),
// general d'Alembert solutions of the 1-D wave equation, a finite-difference
// wave-equation residual, and inversion of the carrier for position.

#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "milnesim/errors.hpp"

namespace milnesim {

class SignalSpec {
public:
    static SignalSpec from_wave_number(double amplitude, double sound_speed, double k) {
        return SignalSpec(amplitude, sound_speed, k);
    }
    static SignalSpec from_wavelength(double amplitude, double sound_speed, double wavelength) {
        return SignalSpec(amplitude, sound_speed, 2 * std::numbers::pi / wavelength);
    }
    static SignalSpec from_angular_frequency(double amplitude, double sound_speed, double w) {
        return SignalSpec(amplitude, sound_speed, w / sound_speed);
    }

    double amplitude() const { return amplitude_; }
    double sound_speed() const { return sound_speed_; }
    double wave_number() const { return k_; }
    double angular_frequency() const { return sound_speed_ * k_; }
    double wavelength() const { return 2 * std::numbers::pi / k_; }

    friend bool operator==(const SignalSpec&, const SignalSpec&) = default;

private:
    SignalSpec(double amplitude, double c, double k) : amplitude_(amplitude), sound_speed_(c), k_(k) {
        std::vector<std::string> issues;
        if (!(amplitude > 0) || !std::isfinite(amplitude)) issues.push_back("signal amplitude must be positive");
        if (!(c > 0) || !std::isfinite(c)) issues.push_back("signal sound_speed must be positive");
        if (!(k > 0) || !std::isfinite(k)) issues.push_back("signal wave_number must be positive");
        if (!issues.empty()) throw ValidationError(std::move(issues));
    }

    double amplitude_;
    double sound_speed_;
    double k_;
};

inline double pressure_at(const SignalSpec& s, double x, double t) {
    return s.amplitude() * std::cos(s.wave_number() * (x - s.sound_speed() * t));
}

// f1 travels towards -x, f2 towards +x.
struct TravellingWavePair {
    std::function<double(double)> f1;
    std::function<double(double)> f2;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
};

inline double dalembert_superpose(const TravellingWavePair& pair, double c, double x, double t) {
    const double a = x + c * t;
    const double b = x - c * t;
    if (a < pair.lower || a > pair.upper || b < pair.lower || b > pair.upper)
        throw DomainError("dalembert_superpose: characteristic argument outside the pair's range");
    return pair.f1(a) + pair.f2(b);
}

// Temporal step is courant * h / c. At courant = 1 every stencil point sits on a
// characteristic and the residual of any d'Alembert field cancels identically, so
// the default stays just below that to keep the O(h^2) error observable.
inline constexpr double kResidualCourant = 0.9;

// c^2 p_xx - p_tt by central second differences.
template <class Field>
    requires std::invocable<Field&, double, double>
double wave_residual(Field&& field, double c, double x, double t, double h,
                     double courant = kResidualCourant) {
    if (!(h > 0)) throw DomainError("wave_residual requires h > 0");
    const double ht = courant * h / c;
    const double centre = field(x, t);
    const double pxx = (field(x + h, t) - 2 * centre + field(x - h, t)) / (h * h);
    const double ptt = (field(x, t + ht) - 2 * centre + field(x, t - ht)) / (ht * ht);
    return c * c * pxx - ptt;
}

inline double wave_residual(const SignalSpec& s, double x, double t, double h,
                            double courant = kResidualCourant) {
    return wave_residual([&](double xx, double tt) { return pressure_at(s, xx, tt); },
                         s.sound_speed(), x, t, h, courant);
}

inline double wave_residual(const TravellingWavePair& pair, double c, double x, double t, double h,
                            double courant = kResidualCourant) {
    return wave_residual([&](double xx, double tt) { return dalembert_superpose(pair, c, xx, tt); },
                         c, x, t, h, courant);
}

// Position at which the carrier takes pressure p at time t. arccos is
// multivalued: sign selects +-arccos, branch adds whole wavelengths.
inline double invert_position(const SignalSpec& s, double p, double t, long branch = 0,
                              int sign = +1) {
    const double ratio = p / s.amplitude();
    if (!(std::abs(ratio) <= 1.0))
        throw DomainError("invert_position: |p| exceeds the signal amplitude");
    const double phase = (sign >= 0 ? 1.0 : -1.0) * std::acos(ratio) +
                         2 * std::numbers::pi * static_cast<double>(branch);
    return phase / s.wave_number() + s.sound_speed() * t;
}

} // namespace milnesim
