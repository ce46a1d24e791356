#pragma once

// Background environment models: the wind-driven sea-surface spectrum and a
// procedural sine-hill bathymetry with one random height scale per hill.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "milnesim/errors.hpp"

namespace milnesim {

struct SurfaceSpectrumParams {
    double alpha = 0.0081;
    double beta = 0.74;
    double gravity = 9.82;  // m/s^2
    double wind_speed = 10; // m/s at 19.5 m above the surface

    friend bool operator==(const SurfaceSpectrumParams&, const SurfaceSpectrumParams&) = default;
};

inline std::vector<std::string> spectrum_issues(const SurfaceSpectrumParams& p) {
    std::vector<std::string> issues;
    if (!(p.alpha > 0)) issues.push_back("surface.alpha must be positive");
    if (!(p.beta > 0)) issues.push_back("surface.beta must be positive");
    if (!(p.gravity > 0)) issues.push_back("surface.gravity must be positive");
    if (!(p.wind_speed > 0)) issues.push_back("surface.wind_speed must be positive");
    return issues;
}

// S(k) = alpha / (2 k^3) exp(-beta g^2 / (k^2 u^4)), k in rad/m.
inline double surface_psd(const SurfaceSpectrumParams& p, double k) {
    if (!(k > 0)) throw DomainError("surface_psd requires k > 0");
    const double u2 = p.wind_speed * p.wind_speed;
    const double exponent = -p.beta * p.gravity * p.gravity / (k * k * u2 * u2);
    return p.alpha / (2 * k * k * k) * std::exp(exponent);
}

// Unique zero of dS/dk.
inline double psd_peak_wavenumber(const SurfaceSpectrumParams& p) {
    return p.gravity * std::sqrt(2 * p.beta / 3) / (p.wind_speed * p.wind_speed);
}

struct SpectrumPoint {
    double k;
    double S;
};

inline std::vector<SpectrumPoint> spectrum_sweep(const SurfaceSpectrumParams& p, double k_min,
                                                 double k_max, std::size_t samples) {
    if (!(k_min > 0) || !(k_max > k_min) || samples < 2)
        throw DomainError("spectrum sweep needs 0 < k_min < k_max and at least 2 samples");
    std::vector<SpectrumPoint> out;
    out.reserve(samples);
    const double lo = std::log(k_min), hi = std::log(k_max);
    for (std::size_t i = 0; i < samples; ++i) {
        const double k = i == 0              ? k_min
                         : i + 1 == samples ? k_max
                                            : std::exp(lo + (hi - lo) * static_cast<double>(i) /
                                                 static_cast<double>(samples - 1));
        out.push_back({k, surface_psd(p, k)});
    }
    return out;
}

struct BathymetrySpec {
    double zeta_max = 10.0;   // m
    double peak_spacing = 50; // L_h, m
    double length = 500;      // m
    double dx = 1.0;          // m
    std::uint64_t seed = 0;

    friend bool operator==(const BathymetrySpec&, const BathymetrySpec&) = default;
};

inline std::vector<std::string> bathymetry_issues(const BathymetrySpec& b) {
    std::vector<std::string> issues;
    if (!(b.zeta_max > 0)) issues.push_back("bathymetry.zeta_max must be positive");
    if (!(b.peak_spacing > 0)) issues.push_back("bathymetry.lh must be positive");
    if (!(b.dx > 0)) issues.push_back("bathymetry.dx must be positive");
    if (!(b.length >= b.dx)) issues.push_back("bathymetry.length must be at least dx");
    return issues;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

// R in (0, 1] for hill `index`; a pure function of (seed, index).
inline double hill_scale(std::uint64_t seed, std::int64_t index) {
    const std::uint64_t key =
        detail::splitmix64(seed) ^ detail::splitmix64(static_cast<std::uint64_t>(index) + 0x632be59bd9b4e019ULL);
    const std::uint64_t bits = detail::splitmix64(key) >> 11;
    return static_cast<double>(bits + 1) * 0x1.0p-53;
}

// zeta(x) = R(x) (zeta_max / 2) (sin(-pi/2 + 2 pi x / L_h) + 1), with R constant per hill.
inline double elevation_at(const BathymetrySpec& b, double x, double scale) {
    const double local = std::fmod(x, b.peak_spacing);
    const double phase = -std::numbers::pi / 2 + 2 * std::numbers::pi * local / b.peak_spacing;
    return scale * (b.zeta_max / 2) * (std::sin(phase) + 1);
}

inline double elevation_at(const BathymetrySpec& b, double x) {
    const auto hill = static_cast<std::int64_t>(std::floor(x / b.peak_spacing));
    return elevation_at(b, x, hill_scale(b.seed, hill));
}

struct BathymetrySample {
    double x;
    double zeta;
};

inline std::vector<BathymetrySample> bathymetry_profile(const BathymetrySpec& b) {
    if (auto issues = bathymetry_issues(b); !issues.empty()) throw ValidationError(std::move(issues));
    const auto n = static_cast<std::size_t>(std::floor(b.length / b.dx + 1e-9)) + 1;
    std::vector<BathymetrySample> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) * b.dx;
        out.push_back({x, elevation_at(b, x)});
    }
    return out;
}

} // namespace milnesim
