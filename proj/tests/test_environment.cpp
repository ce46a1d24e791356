#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "milnesim/environment.hpp"

using namespace milnesim;

namespace {
SurfaceSpectrumParams wind(double u) {
    SurfaceSpectrumParams p;
    p.wind_speed = u;
    return p;
}
} // namespace

TEST(Spectrum, Constants) {
    const SurfaceSpectrumParams p;
    EXPECT_EQ(p.alpha, 0.0081);
    EXPECT_EQ(p.beta, 0.74);
    EXPECT_EQ(p.gravity, 9.82);
}

TEST(Spectrum, Examples) {
    EXPECT_NEAR(surface_psd(wind(1e10), 1.0), 0.00405, 1e-12);
    EXPECT_NEAR(surface_psd(wind(10), 0.1), 1.9840041907198671105, 1e-12);
    EXPECT_THROW(surface_psd(wind(10), 0.0), DomainError);
    EXPECT_THROW(surface_psd(wind(10), -1.0), DomainError);
}

TEST(Spectrum, Peak) {
    EXPECT_NEAR(psd_peak_wavenumber(wind(10)), 0.068973413235342596994, 1e-15);
    EXPECT_NEAR(psd_peak_wavenumber(wind(20)), psd_peak_wavenumber(wind(10)) / 4, 1e-15);
    const auto p = wind(10);
    const double kp = psd_peak_wavenumber(p);
    EXPECT_LT(surface_psd(p, kp + 1e-6), surface_psd(p, kp));
    EXPECT_LT(surface_psd(p, kp - 1e-6), surface_psd(p, kp));
    double prev = surface_psd(p, kp);
    for (double k = kp * 1.01; k < 5; k *= 1.05) {
        const double s = surface_psd(p, k);
        EXPECT_LT(s, prev);
        prev = s;
    }
}

TEST(Spectrum, VanishesAtBothEnds) {
    EXPECT_LT(surface_psd(wind(10), 1e-4), 1e-12);
    EXPECT_LT(surface_psd(wind(10), 1e4), 1e-12);
}

TEST(Spectrum, Sweep) {
    const auto s = spectrum_sweep(wind(10), 1e-3, 10, 512);
    ASSERT_EQ(s.size(), 512u);
    EXPECT_EQ(s.front().k, 1e-3);
    EXPECT_EQ(s.back().k, 10.0);
    for (std::size_t i = 1; i < s.size(); ++i) EXPECT_GT(s[i].k, s[i - 1].k);
    EXPECT_THROW(spectrum_sweep(wind(10), 1, 0.5, 10), DomainError);
}

TEST(Bathymetry, Landmarks) {
    BathymetrySpec b{7.0, 40.0, 400.0, 0.5, 42};
    EXPECT_EQ(elevation_at(b, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(elevation_at(b, 20.0, 1.0), 7.0);
    EXPECT_NEAR(elevation_at(b, 10.0, 1.0), 3.5, 1e-14);
}

TEST(Bathymetry, BoundsTroughsAndDeterminism) {
    for (std::uint64_t seed : {0ull, 42ull, 0xdeadbeefull}) {
        BathymetrySpec b{12.5, 37.3, 1e5 - 1, 1.0, seed};
        const auto prof = bathymetry_profile(b);
        ASSERT_EQ(prof.size(), 100000u);
        for (const auto& s : prof) {
            ASSERT_GE(s.zeta, 0.0);
            ASSERT_LE(s.zeta, b.zeta_max);
        }
        for (int n = 0; n < 200; ++n) ASSERT_EQ(elevation_at(b, n * b.peak_spacing), 0.0) << n;
        const auto again = bathymetry_profile(b);
        for (std::size_t i = 0; i < prof.size(); ++i) ASSERT_EQ(std::memcmp(&prof[i].zeta, &again[i].zeta, sizeof(double)), 0);
    }
}

TEST(Bathymetry, HillScaleRangeAndIndependence) {
    double lo = 1, hi = 0;
    for (std::int64_t i = -1000; i < 1000; ++i) {
        const double r = hill_scale(42, i);
        ASSERT_GT(r, 0.0);
        ASSERT_LE(r, 1.0);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    EXPECT_LT(lo, 0.01);
    EXPECT_GT(hi, 0.99);
    EXPECT_NE(hill_scale(1, 5), hill_scale(2, 5));
    // one scale per hill: constant within a period
    BathymetrySpec b{10, 50, 500, 1, 9};
    const double r = hill_scale(9, 3);
    for (double x = 150.5; x < 200; x += 3.1) EXPECT_DOUBLE_EQ(elevation_at(b, x), elevation_at(b, x, r));
}

TEST(Bathymetry, Validation) {
    EXPECT_THROW(bathymetry_profile({0.0, 10, 100, 1, 0}), ValidationError);
    EXPECT_THROW(bathymetry_profile({1.0, 10, 0.5, 1, 0}), ValidationError);
    EXPECT_EQ(bathymetry_issues({-1, -1, -5, 0, 0}).size(), 4u);
}
