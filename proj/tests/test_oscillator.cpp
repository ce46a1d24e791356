#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "milnesim/oscillator.hpp"

using namespace milnesim;

namespace {
// Closed forms evaluated independently in tests/oracles/expected_values.py.
constexpr double kCriticalX = 0.73575888234288464319;   // (1+t)e^-t at t=1
constexpr double kOverdamped3X = 0.78664559930336833332; // beta=3, omega=1, (1,0), t=1
constexpr double kOverdamped3V = -0.27260893766252905322;
constexpr double kUnderdampedX = 0.3889459905094949783; // beta=0.5, omega=2, (1,0.5), t=3
} // namespace

TEST(Oscillator, DampedRhs) {
    EXPECT_EQ(damped_rhs({1, 0}, 0, 1), (OscillatorState{0, -1}));
    EXPECT_EQ(damped_rhs({0, 1}, 2, 1), (OscillatorState{1, -2}));
    EXPECT_EQ(damped_rhs({1, 1}, 0.5, 2), (OscillatorState{1, -4.5}));
}

TEST(Oscillator, ParametricDegeneratesToConstant) {
    MediumSpec m{CoefficientProfile::constant(1.0), CoefficientProfile::constant(0.4), 1480, false};
    for (double t : {-3.0, 0.0, 2.5})
        for (OscillatorState s : {OscillatorState{1, 0}, OscillatorState{-0.3, 2}})
            EXPECT_EQ(parametric_rhs(s, m, t), damped_rhs(s, 0.4, 1.0));
}

TEST(Oscillator, ParametricAtBumpPeakAndFarAway) {
    MediumSpec m{CoefficientProfile::gaussian_bump(1, 0.5, 3.0, 1.0), CoefficientProfile::constant(0), 1480, false};
    EXPECT_EQ(parametric_rhs({1, 0}, m, 3.0), (OscillatorState{0, -2.25}));
    const auto far = parametric_rhs({0.7, -0.2}, m, 40.0);
    const auto unit = damped_rhs({0.7, -0.2}, 0, 1);
    EXPECT_NEAR(far.x, unit.x, 1e-10);
    EXPECT_NEAR(far.v, unit.v, 1e-10);
}

TEST(Oscillator, AnalyticBranches) {
    const auto period = analytic_constant_solution(0, 1, 1, 0, 2 * std::numbers::pi);
    EXPECT_NEAR(period.x, 1.0, 1e-12);
    EXPECT_NEAR(period.v, 0.0, 1e-12);
    EXPECT_NEAR(analytic_constant_solution(2, 1, 1, 0, 1).x, kCriticalX, 1e-15);
    const auto od = analytic_constant_solution(3, 1, 1, 0, 1);
    EXPECT_NEAR(od.x, kOverdamped3X, 1e-14);
    EXPECT_NEAR(od.v, kOverdamped3V, 1e-14);
    EXPECT_NEAR(analytic_constant_solution(0.5, 2, 1, 0.5, 3).x, kUnderdampedX, 1e-14);
    EXPECT_TRUE(is_critical_damping(2.0 + 1e-13, 1.0));
    EXPECT_FALSE(is_critical_damping(2.0 + 1e-9, 1.0));
    EXPECT_THROW(analytic_constant_solution(-1, 1, 1, 0, 1), DomainError);
}

TEST(Oscillator, AnalyticVelocityIsDerivative) {
    for (double beta : {0.0, 0.7, 2.0, 4.5}) {
        const double h = 1e-5, t = 1.3;
        const double fd = (analytic_constant_solution(beta, 1, 0.4, -0.8, t + h).x -
                           analytic_constant_solution(beta, 1, 0.4, -0.8, t - h).x) / (2 * h);
        EXPECT_NEAR(analytic_constant_solution(beta, 1, 0.4, -0.8, t).v, fd, 1e-8) << beta;
    }
}

TEST(OscillatorProperty, IntegrationMatchesClosedForm) {
    for (double beta : {0.0, 0.5, 2.0, 3.0}) {
        MediumSpec m{CoefficientProfile::constant(1), CoefficientProfile::constant(beta), 1480, false};
        auto tr = solver::integrate_fixed(parametric_system(m), {1.0, 0.0}, {0.0, 20.0}, {.dt = 1e-3});
        double err = 0;
        for (std::size_t i = 0; i < tr.size(); ++i)
            err = std::max(err, std::abs(tr.states[i][0] - analytic_constant_solution(beta, 1, 1, 0, tr.times[i]).x));
        EXPECT_LT(err, 1e-6) << "beta=" << beta;
    }
}

TEST(OscillatorProperty, EnergyConservedWithoutDamping) {
    auto tr = solver::integrate_fixed(damped_system(0, 1), {1.0, 0.0}, {0.0, 100.0}, {.dt = 1e-3});
    const double e0 = oscillator_energy({1, 0}, 1);
    double drift = 0;
    for (const auto& s : tr.states) drift = std::max(drift, std::abs(oscillator_energy({s[0], s[1]}, 1) - e0) / e0);
    EXPECT_LT(drift, 1e-6);
}

TEST(OscillatorProperty, EnergyNonIncreasingWithDamping) {
    for (double beta : {0.05, 0.5, 3.0}) {
        auto tr = solver::integrate_fixed(damped_system(beta, 1), {1.0, 0.3}, {0.0, 30.0}, {.dt = 1e-3});
        for (std::size_t i = 1; i < tr.size(); ++i)
            ASSERT_LE(oscillator_energy({tr.states[i][0], tr.states[i][1]}, 1),
                      oscillator_energy({tr.states[i - 1][0], tr.states[i - 1][1]}, 1))
                << "beta=" << beta << " t=" << tr.times[i];
    }
}

// After the bump, x'' + x (second difference of positions) vanishes.
TEST(OscillatorProperty, SettlesAfterBump) {
    MediumSpec m{CoefficientProfile::gaussian_bump(1, 0.5, 10, 1), CoefficientProfile::constant(0), 1480, false};
    const double dt = 1e-3;
    auto tr = solver::integrate_fixed(parametric_system(m), {1.0, 0.0}, {0.0, 40.0}, {.dt = dt});
    double worst = 0;
    for (std::size_t i = 1; i + 1 < tr.size(); ++i) {
        if (tr.times[i] < 25.0) continue;
        const double xdd = (tr.states[i + 1][0] - 2 * tr.states[i][0] + tr.states[i - 1][0]) / (dt * dt);
        worst = std::max(worst, std::abs(xdd + tr.states[i][0]));
    }
    EXPECT_LT(worst, 1e-6);
}
