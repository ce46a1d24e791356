#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "milnesim/milne.hpp"

using namespace milnesim;
using std::numbers::pi;

namespace {

const SignalSpec kWater = SignalSpec::from_wave_number(1.0, 1480.0, 0.1);

MediumSpec constant_medium(double beta, double omega = 1.0) {
    return {CoefficientProfile::constant(omega), CoefficientProfile::constant(beta), 1480.0, false};
}

// Default scenario medium: beta(0) = 0.5.
MediumSpec default_medium() {
    return {CoefficientProfile::gaussian_bump(1.0, 0.5, 1.0, 0.25),
            CoefficientProfile::sech2_bump(0.0, 0.5, 0.0, 1.0), 1480.0, false};
}

solver::Trajectory synthetic(double w, double lag, double t1, double dt = 1e-3) {
    solver::Trajectory tr;
    for (double t = 0; t <= t1; t += dt) {
        tr.times.push_back(t);
        tr.states.push_back({std::cos(w * t - lag), -w * std::sin(w * t - lag)});
    }
    return tr;
}

// Term-by-term evaluation of the substituted residual, written out separately.
double residual_terms(double p, double v, double a, double alpha, double beta, double w, double c,
                      double k, double t) {
    double terms[6] = {a * p * p / (alpha * alpha), -p * v * v, beta * v * p * p / (alpha * alpha),
                       -beta * c * k * p, -w * w * p * std::acos(p / alpha), -w * w * c * t * k * p};
    double s = 0;
    for (double x : terms) s += x;
    return s;
}

} // namespace

TEST(Milne, RhsExamples) {
    const auto m = default_medium();
    EXPECT_EQ(milne_rhs({1.0, 0.0}, kWater, m, 0.0).p_dot, 74.0);
    for (double p : {-3.0, 0.2, 5.0})
        EXPECT_EQ(milne_rhs({p, 0.0}, kWater, constant_medium(0.0), 0.0).p_dot, 0.0);
    const auto d = milne_rhs({0.5, 0.2}, kWater, constant_medium(0.1), 1.0);
    EXPECT_EQ(d.p, 0.2);
    EXPECT_NEAR(d.p_dot, 81.4, 1e-12);
}

TEST(Milne, UnreducedResidual) {
    const auto m = default_medium();
    // At p = alpha the arccos term vanishes and the residual equals the reduced equation.
    const double t = 0.3, v = 0.7;
    const double a = milne_rhs({1.0, v}, kWater, m, t).p_dot;
    EXPECT_NEAR(unreduced_residual(1.0, v, a, kWater, m, t), 0.0, 1e-9);
    EXPECT_EQ(unreduced_residual(0.0, 0.0, 123.0, kWater, m, t), 0.0);
    EXPECT_THROW(unreduced_residual(1.5, 0, 0, kWater, m, t), DomainError);

    const double p = 0.37, pv = -1.2, pa = 4.4, tt = 0.8;
    EXPECT_NEAR(unreduced_residual(p, pv, pa, kWater, m, tt),
                residual_terms(p, pv, pa, 1.0, beta_at(m, tt), omega_at(m, tt), 1480, 0.1, tt), 1e-12);
}

TEST(Milne, FixedPointWithoutCoupling) {
    MediumSpec m = constant_medium(0.0);
    m.zero_omega = true;
    auto tr = integrate_milne(kWater, m, {0.0, 5.0}, MilneState{1.0, 0.0});
    ASSERT_TRUE(tr.completed());
    for (const auto& s : tr.states) {
        ASSERT_EQ(s[0], 1.0);
        ASSERT_EQ(s[1], 0.0);
    }
}

TEST(Milne, DefaultInitialConditionIsAmplitude) {
    const auto s = SignalSpec::from_wave_number(2.5, 1480.0, 0.1);
    auto tr = integrate_milne(s, default_medium(), {0.0, 0.01});
    EXPECT_EQ(tr.states.front()[0], 2.5);
    EXPECT_EQ(tr.states.front()[1], 0.0);
}

TEST(Milne, StronglyDrivenCaseBlowsUp) {
    const auto m = default_medium();
    MilneSolverOptions fixed{.method = Method::fixed, .dt = 1e-4};
    MilneSolverOptions adaptive{.method = Method::adaptive, .rtol = 1e-10, .atol = 1e-12};
    auto f = integrate_milne(kWater, m, {0.0, 2.0}, std::nullopt, fixed);
    auto a = integrate_milne(kWater, m, {0.0, 2.0}, std::nullopt, adaptive);
    ASSERT_EQ(f.status, solver::Status::aborted_blowup);
    ASSERT_EQ(a.status, solver::Status::aborted_blowup);
    EXPECT_NEAR(*f.abort_time, *a.abort_time, 0.01 * *a.abort_time);
    EXPECT_TRUE(std::isfinite(f.states.back()[0]));
    EXPECT_LT(f.times.back(), *f.abort_time);
}

TEST(Milne, WeakCouplingAgreesWithAdaptive) {
    // Small c k keeps the equation bounded over the window.
    const auto s = SignalSpec::from_wave_number(1.0, 1.0, 0.05);
    const auto m = constant_medium(0.2);
    auto f = integrate_milne(s, m, {0.0, 2.0}, std::nullopt, {.dt = 1e-4});
    auto a = integrate_milne(s, m, {0.0, 2.0}, std::nullopt, {.method = Method::adaptive, .rtol = 1e-10, .atol = 1e-12});
    ASSERT_TRUE(f.completed());
    ASSERT_TRUE(a.completed());
    for (std::size_t i = 0; i < a.size(); ++i)
        ASSERT_NEAR(f.interpolate(a.times[i])[0], a.states[i][0], 1e-6);
}

TEST(Milne, EnergyDensities) {
    const auto m = constant_medium(0.1);
    EXPECT_NEAR(lagrangian_density({1, 1}, kWater, m, 1.0), 81.9, 1e-12);
    EXPECT_DOUBLE_EQ(lagrangian_density({2, 0}, kWater, m, 0.0), 0.1 * 148 / 2 * 4);
    EXPECT_EQ(lagrangian_density({0, 3}, kWater, m, 2.0), 4.5);
    EXPECT_DOUBLE_EQ(hamiltonian_density({1, 0}, kWater, default_medium(), 0.0), -37.0);
    EXPECT_EQ(hamiltonian_density({0, 3}, kWater, m, 2.0), 4.5);
}

TEST(Milne, MilneEnergyAtRest) {
    const auto m = default_medium();
    EXPECT_EQ(milne_energy({0, 0}, kWater, m, 1.0), 0.0);
    for (double t : {0.0, 0.4, 3.0}) {
        const double q = 0.8;
        EXPECT_DOUBLE_EQ(milne_energy({q, 0}, kWater, m, t), -0.5 * envelope_denominator(kWater, m, t) * q * q);
    }
}

TEST(Milne, EnvelopeExamples) {
    const auto m = default_medium();
    const auto zero = envelope_q(1.0, 0.0, kWater, m, pi / 4);
    EXPECT_NEAR(zero.q_squared, 0.0, 1e-15);
    EXPECT_NEAR(zero.magnitude, 0.0, 1e-7);

    const auto e0 = envelope_q(1.0, 0.0, kWater, m, 0.0);
    EXPECT_NEAR(e0.q_squared, 0.027027027027027027027, 1e-15);
    EXPECT_TRUE(e0.imaginary_branch);
    const auto neg = envelope_q(1.0, 0.0, kWater, m, 1.0); // cos(2) < 0
    EXPECT_LT(neg.q_squared, 0.0);
    EXPECT_FALSE(neg.imaginary_branch);
    EXPECT_EQ(neg.magnitude, std::sqrt(-neg.q_squared));

    // Round trip through the at-rest energy: q*q = i^2 R recovers E_M cos(2t - tau).
    const double den = envelope_denominator(kWater, m, 0.0);
    EXPECT_NEAR(-0.5 * den * e0.signed_square(), 1.0, 1e-12);
}

TEST(Milne, EnvelopeSingularity) {
    MediumSpec m = constant_medium(0.0);
    try {
        envelope_q(1.0, 0.0, kWater, m, 0.0);
        FAIL() << "expected singularity";
    } catch (const SingularityError& e) {
        EXPECT_EQ(e.time, 0.0);
    }
    EXPECT_THROW(q_plus_minus_squared(1.0, 0.0, kWater, m, 0.0), SingularityError);
}

TEST(Milne, PlusMinusSquares) {
    const auto m = default_medium();
    const auto q = q_plus_minus_squared(1.0, 0.0, kWater, m, 0.0);
    EXPECT_NEAR(q.minus_sq, 0.027027027027027027, 1e-15);
    EXPECT_NEAR(q.plus_sq, -0.027027027027027027, 1e-15);
    const auto z = q_plus_minus_squared(2.0, 1.0, kWater, m, (pi / 2 + 1.0) / 2);
    EXPECT_NEAR(z.minus_sq, 0.0, 1e-15);
    EXPECT_NEAR(z.plus_sq, 0.0, 1e-15);
}

TEST(Milne, EnvelopeAmplitude) {
    for (double t : {0.0, 0.3, 2.0, -4.0}) EXPECT_NEAR(envelope_amplitude(0.49, 0.49, 0.2, t).magnitude, 0.7, 1e-15);
    EXPECT_DOUBLE_EQ(envelope_amplitude(0.25, 9.0, 1.1, 1.1).magnitude, 0.5);
    // With q+^2 = -q-^2 the radicand is q+^2 cos(2(t - tau)).
    for (double t : {0.1, 0.9, 1.7, 3.3}) {
        const auto a = envelope_amplitude(0.3, -0.3, 0.4, t);
        EXPECT_NEAR(a.radicand, 0.3 * std::cos(2 * (t - 0.4)), 1e-15);
        EXPECT_EQ(a.imaginary, a.radicand < 0);
    }
}

TEST(Milne, PeriodPhaseFromCosine) {
    const auto pp = estimate_period_phase(synthetic(1.0, 0.0, 30.0));
    EXPECT_NEAR(pp.tau, 2 * pi, 1e-4);
    EXPECT_NEAR(pp.delta, 0.0, 1e-4);
}

TEST(Milne, PeriodPhaseFromShiftedCosine) {
    const auto pp = estimate_period_phase(synthetic(1.2, 0.3, 30.0));
    EXPECT_NEAR(pp.tau, 2 * pi / 1.2, 1e-3);
    EXPECT_NEAR(pp.delta, 0.3, 1e-3);
}

TEST(Milne, PeriodPhaseWithExclusionWindow) {
    auto tr = synthetic(1.0, -0.5, 40.0);
    for (std::size_t i = 0; i < tr.size(); ++i)
        if (std::abs(tr.times[i] - 20.0) < 2.0) tr.states[i] = {5.0 * std::sin(7 * tr.times[i]), 0.0};
    PeriodPhaseOptions opts;
    opts.exclude_center = 20.0;
    opts.exclude_half_width = 2.5;
    const auto pp = estimate_period_phase(tr, opts);
    EXPECT_NEAR(pp.tau, 2 * pi, 1e-4);
    EXPECT_NEAR(pp.delta, -0.5, 1e-4);
}

TEST(Milne, PeriodPhaseInsufficientData) {
    solver::Trajectory flat;
    for (int i = 0; i < 100; ++i) {
        flat.times.push_back(i * 0.1);
        flat.states.push_back({1.0, 0.0});
    }
    EXPECT_THROW(estimate_period_phase(flat), InsufficientData);
    auto broken = synthetic(1.0, 0.0, 30.0);
    broken.status = solver::Status::aborted_blowup;
    EXPECT_THROW(estimate_period_phase(broken), InsufficientData);
}

TEST(Milne, SummaryFlag) {
    EXPECT_TRUE(make_summary(0.5, 1.0, 0.0, ParamSource::supplied).e_m_bound_violated);
    EXPECT_FALSE(make_summary(1.0, 1.0, 0.0, ParamSource::supplied).e_m_bound_violated);
    EXPECT_NEAR(make_summary(2.0, 1.0, 3 * pi, ParamSource::computed).delta, pi, 1e-12);
    EXPECT_THROW(make_summary(1.0, 0.0, 0.0, ParamSource::computed), DomainError);
}

TEST(MilneProperty, LagrangianMinusHamiltonianIsTwiceThePotential) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> up(-3, 3), ut(0, 5);
    const auto m = default_medium();
    for (int i = 0; i < 1000; ++i) {
        const MilneState y{up(rng), up(rng)};
        const double t = ut(rng);
        const double lhs = lagrangian_density(y, kWater, m, t) - hamiltonian_density(y, kWater, m, t);
        const double v = potential_density(y.p, kWater, m, t);
        ASSERT_NEAR(lhs, 2 * v, 1e-12 * std::max(std::abs(2 * v), 1e-300));
    }
}

TEST(MilneProperty, EnergyEnvelopeRoundTrip) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ue(0.5, 5), utau(0, 2 * pi), ut(0.01, 6);
    const auto m = default_medium();
    int checked = 0;
    while (checked < 1000) {
        const double em = ue(rng), tau = utau(rng), t = ut(rng);
        const auto e = envelope_q(em, tau, kWater, m, t);
        if (e.q_squared < 0) continue;
        const double back = milne_energy({std::sqrt(e.q_squared), 0.0}, kWater, m, t);
        // real q = sqrt(R) carries the opposite sign of the i^2 branch
        const double expected = -em * std::cos(2 * t - tau);
        ASSERT_NEAR(back, expected, 1e-9 * std::max(std::abs(expected), 1e-12));
        ++checked;
    }
}

TEST(MilneProperty, PlusMinusCancel) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-4, 4), ut(0.01, 8);
    const auto m = default_medium();
    for (int i = 0; i < 500; ++i) {
        const auto q = q_plus_minus_squared(u(rng), u(rng), kWater, m, ut(rng));
        ASSERT_EQ(q.plus_sq + q.minus_sq, 0.0);
    }
}

TEST(MilneProperty, EnvelopePeriodicWithFrozenCoefficients) {
    const auto m = default_medium();
    const double den = envelope_denominator(kWater, m, 1.7);
    for (double t : {0.0, 0.4, 1.3, 2.9}) {
        const auto a = envelope_from_denominator(1.3, 0.6, t, den);
        const auto b = envelope_from_denominator(1.3, 0.6, t + pi, den);
        EXPECT_NEAR(a.q_squared, b.q_squared, 1e-15);
    }
}
