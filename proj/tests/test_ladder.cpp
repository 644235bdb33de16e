#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "recoil/ladder.hpp"
#include "support/oracles.hpp"

using namespace recoil;

namespace {

constexpr double pi = std::numbers::pi;

PhysicalConfig five_kev() {
    PhysicalConfig c;
    c.electron_kinetic_kev = 5.0;
    c.photon_energy_ev = {2.33};
    c.interaction_length_um = 400.0;
    c.coupling_g_qu = 0.1;
    c.truncation_n_max = 8;
    return c;
}

}  // namespace

TEST(Wavenumber, ZeroAtRest) { EXPECT_EQ(electron_wavenumber(constants::electron_rest_kev), 0.0); }

TEST(Wavenumber, BelowRestEnergyThrows) {
    EXPECT_THROW(electron_wavenumber(500.0), DomainError);
}

TEST(Wavenumber, RoundTripAcrossKineticRange) {
    for (double ekin = 0.5; ekin <= 300.0; ekin *= 1.37) {
        const double total = ekin + constants::electron_rest_kev;
        const double back = electron_total_energy(electron_wavenumber(total));
        EXPECT_NEAR((back - constants::electron_rest_kev) / ekin, 1.0, 1e-12) << ekin;
    }
}

TEST(Wavenumber, MatchesExtendedPrecisionAt200keV) {
    const double total = 200.0 + constants::electron_rest_kev;
    EXPECT_NEAR(electron_wavenumber(total) / oracle::wavenumber_high_precision(total), 1.0, 1e-13);
}

TEST(Wavenumber, MonotoneIncreasing) {
    double last = -1.0;
    for (double e = constants::electron_rest_kev; e < 900.0; e += 7.0) {
        const double k = electron_wavenumber(e);
        EXPECT_GT(k, last);
        last = k;
    }
}

TEST(WavenumberGap, AgreesWithExtendedPrecisionDifference) {
    const double a = detail::wavenumber_gap(5.0, 2.33e-3);
    const double b = oracle::wavenumber_step(5.0, 2.33);
    EXPECT_NEAR(a / b, 1.0, 1e-14);
}

TEST(Sigma, FullFormulaInverseInLength) {
    EXPECT_DOUBLE_EQ(sigma_full(7.0, 1.5, 300.0), 2.0 * sigma_full(7.0, 1.5, 600.0));
}

TEST(Sigma, FullFormulaAtFiveKeV) {
    // Direct evaluation of the formula with its published prefactor.
    const double p2 = 5.0 * (5.0 + 2.0 * constants::electron_rest_kev);
    const double expected = 1240.0 / (511.0 * 511.0) * std::pow(p2, 1.5) / (2.33 * 2.33 * 400.0);
    EXPECT_NEAR(sigma_full(5.0, 2.33, 400.0), expected, 1e-12);
    EXPECT_NEAR(sigma_full(5.0, 2.33, 400.0), 0.8047, 1e-3);
}

TEST(Sigma, FullFormulaMatchesSincZeroOfExactDispersion) {
    // First zero of sinc(dk_n L / 2) along the emission ladder, n continuous.
    const double ekin = 30.0, ph = 2e-3, length = 500.0;
    const double kappa = oracle::wavenumber_kinetic(ekin) - oracle::wavenumber_kinetic(ekin - ph);
    auto half_phase = [&](double n) {
        const double dk = oracle::wavenumber_kinetic(ekin - (n - 1.0) * ph) -
                          oracle::wavenumber_kinetic(ekin - n * ph) - kappa;
        return dk * length / 2.0 - pi;
    };
    const double n_zero = oracle::bisect(half_phase, 1.5, 100.0);
    EXPECT_NEAR(sigma_full(ekin, 2.0, length) / (n_zero - 1.0), 1.0, 0.01);
}

TEST(Sigma, FullFormulaRejectsNonPositive) {
    EXPECT_THROW(sigma_full(0.0, 1.0, 1.0), DomainError);
    EXPECT_THROW(sigma_full(1.0, -1.0, 1.0), DomainError);
    EXPECT_THROW(sigma_full(1.0, 1.0, 0.0), DomainError);
}

TEST(Sigma, SimpleFormulaExamples) {
    EXPECT_NEAR(sigma_simple(5.0, 2.33, 400.0).value, 155.0 * std::pow(5.0, 1.5) / (2.33 * 2.33 * 400.0), 1e-14);
    EXPECT_NEAR(sigma_simple(5.0, 2.33, 400.0).value, 0.798, 1e-3);
    EXPECT_DOUBLE_EQ(sigma_simple(1.0, 1.0, 155.0).value, 1.0);
    EXPECT_NEAR(sigma_simple(3.0, 1.1, 50.0).value, sigma_simple(12.0, 1.1, 400.0).value, 1e-12);
}

TEST(Sigma, SimpleFormulaFlagsHighEnergy) {
    EXPECT_FALSE(sigma_simple(149.0, 1.0, 1.0).outside_validity);
    EXPECT_TRUE(sigma_simple(150.0, 1.0, 1.0).outside_validity);
}

TEST(Sigma, SimpleWithinFivePercentOfFullBelow150keV) {
    for (double e = 0.5; e <= 150.0; e *= 1.2) {
        const double ratio = sigma_simple(e, 2.0, 100.0).value / sigma_full(e, 2.0, 100.0);
        EXPECT_NEAR(ratio, 1.0, 0.05) << e;
    }
}

TEST(NEff, Branches) {
    EXPECT_EQ(n_eff(5.0), 6.0);
    EXPECT_EQ(n_eff(0.5), 2.0);
    EXPECT_EQ(n_eff(1.0), 2.0);
    EXPECT_THROW(n_eff(0.0), DomainError);
}

TEST(PhotonMomentum, OnePhotonClosedForm) {
    const PhysicalConfig c = five_kev();
    EXPECT_DOUBLE_EQ(solve_photon_momentum(c), detail::wavenumber_gap(5.0, 2.33e-3));
}

TEST(PhotonMomentum, TwoPhotonClosedForm) {
    PhysicalConfig c = five_kev();
    c.matched_transition = MatchedTransition::TwoPhotonEmission;
    EXPECT_DOUBLE_EQ(solve_photon_momentum(c), 0.5 * detail::wavenumber_gap(5.0, 2 * 2.33e-3));
}

TEST(PhotonMomentum, GratingShiftsMomentum) {
    PhysicalConfig c = five_kev();
    const double direct = solve_photon_momentum(c);
    c.grating_wavenumber = 0.25 * direct;
    EXPECT_NEAR(solve_photon_momentum(c), 0.75 * direct, 1e-12 * direct);
    c.grating_wavenumber = 2.0 * direct;
    EXPECT_THROW(solve_photon_momentum(c), InfeasiblePhaseMatching);
}

TEST(PhotonMomentum, ResidualAtFiveKeV) {
    const PhysicalConfig c = five_kev();
    const double kappa = solve_photon_momentum(c);
    const double residual = oracle::wavenumber_step(5.0, 2.33) - kappa;
    EXPECT_LT(std::abs(residual * 400.0), 1e-10);
}

TEST(PhysicalPhases, MatchedStepIsZeroAndTelescopes) {
    const LadderPhases p = mismatch_phases_physical(five_kev());
    EXPECT_EQ(p.m_min(), -8);
    EXPECT_EQ(p.m_max(), 0);
    EXPECT_EQ(p.phi(0), 0.0);
    EXPECT_LT(std::abs(p.phi(-1)), 1e-12);
    for (int m = p.m_min(); m < p.m_max(); ++m) EXPECT_NEAR(p.phi(m + 1) - p.phi(m), p.delta(m), 1e-14);
}

TEST(PhysicalPhases, HalfPhaseReachesPiNearSigma) {
    // The step whose half-mismatch equals pi sits one level past sigma.
    PhysicalConfig c;
    c.electron_kinetic_kev = 30.0;
    c.photon_energy_ev = {2.0};
    c.interaction_length_um = 500.0;
    c.truncation_n_max = 40;
    const LadderPhases p = mismatch_phases_physical(c);
    const double sigma = sigma_full(30.0, 2.0, 500.0);
    auto half = [&](int n) { return 0.5 * p.delta(-n); };
    const int n_lo = static_cast<int>(std::floor(sigma + 1.0));
    const double interp = n_lo + (pi - half(n_lo)) / (half(n_lo + 1) - half(n_lo));
    EXPECT_NEAR((interp - 1.0) / sigma, 1.0, 0.02);
}

TEST(PhysicalPhases, MatchesReducedLawForLargeSigma) {
    PhysicalConfig c;
    c.electron_kinetic_kev = 100.0;
    c.photon_energy_ev = {1.0};
    c.interaction_length_um = 50.0;
    c.truncation_n_max = 200;
    const double sigma = sigma_full(100.0, 1.0, 50.0);
    ASSERT_GT(sigma, 100.0);
    const LadderPhases physical = mismatch_phases_physical(c);
    for (int n = 2; n <= static_cast<int>(sigma / 2) && n <= 200; ++n) {
        const double reduced = reduced_phase(-n, sigma, 1, 0.0);
        EXPECT_NEAR(physical.phi(-n) / reduced, 1.0, 0.02) << n;
    }
}

TEST(PhysicalPhases, RestEnergyTruncation) {
    PhysicalConfig c;
    c.electron_kinetic_kev = 0.01;
    c.photon_energy_ev = {3.0};
    c.interaction_length_um = 10.0;
    c.truncation_n_max = 10;
    const LadderPhases p = mismatch_phases_physical(c);
    EXPECT_TRUE(p.truncated_by_rest_energy());
    EXPECT_EQ(p.m_min(), -3);
}

TEST(PhysicalPhases, AbsorptionSideForFockInitialState) {
    PhysicalConfig c = five_kev();
    c.initial_cavity_fock = {3};
    const LadderPhases p = mismatch_phases_physical(c);
    EXPECT_EQ(p.m_max(), 3);
    EXPECT_EQ(p.size(), 12u);
}

TEST(ReducedPhases, FirstOrderLaw) {
    EXPECT_EQ(reduced_phase(0, 3.0, 1, 0.0), 0.0);
    EXPECT_EQ(reduced_phase(-1, 3.0, 1, 0.0), 0.0);
    EXPECT_NEAR(reduced_phase(-2, 2.0, 1, 0.0), -pi, 1e-15);
    for (int n = 1; n < 20; ++n) EXPECT_NEAR(reduced_phase(-n, 7.0, 1, 0.0), -pi * n * (n - 1) / 7.0, 1e-12);
}

TEST(ReducedPhases, SecondOrderLaw) {
    const ReducedConfig c{5.0, 0.3, 2, -30.0, 0, 6};
    const LadderPhases p = mismatch_phases_reduced(c);
    EXPECT_EQ(p.phi(0), 0.0);
    EXPECT_DOUBLE_EQ(p.phi(-1), -30.0);
    EXPECT_NEAR(p.phi(-2), 0.0, 1e-15);
    // Even levels follow the quadratic law in the pair index.
    for (int j = 1; j <= 3; ++j) EXPECT_NEAR(p.phi(-2 * j), -4.0 * pi * j * (j - 1) / 5.0, 1e-12);
}

TEST(ReducedPhases, NoRecoilLimit) {
    const LadderPhases p = reduced_phases(std::numeric_limits<double>::infinity(), 1, 0.0, -5, 2);
    for (double v : p.phiL()) EXPECT_EQ(v, 0.0);
}

TEST(ReducedPhases, ValidationErrors) {
    EXPECT_THROW((ReducedConfig{1.0, 0.1, 1, 2.0, 0, 4}.validate()), DomainError);
    EXPECT_THROW((ReducedConfig{-1.0, 0.1, 1, 0.0, 0, 4}.validate()), DomainError);
    EXPECT_THROW((ReducedConfig{1.0, 0.1, 3, 0.0, 0, 4}.validate()), DomainError);
}

TEST(LadderPhasesType, FromLevelsRequiresZeroAtOrigin) {
    EXPECT_THROW(LadderPhases::from_levels(-1, {0.5, 0.1}), DomainError);
    EXPECT_THROW(LadderPhases::from_levels(1, {0.0, 0.1}), ShapeError);
}

TEST(PhysicalConfigValidation, RejectsBadInputs) {
    PhysicalConfig c = five_kev();
    c.photon_energy_ev = {6000.0};
    EXPECT_THROW(c.validate(), DomainError);
    c = five_kev();
    c.photon_energy_ev = {1.0, 1.0, 1.0};
    EXPECT_THROW(c.validate(), DomainError);
}
