#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "recoil/multimode.hpp"

using namespace recoil;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double coupling_for(double g_eff, double p) { return std::sqrt(g_eff * std::abs(p)); }

PhysicalConfig two_mode_physical(double e1, double e2, MatchedTransition t) {
    PhysicalConfig c;
    c.electron_kinetic_kev = 100.0;
    c.photon_energy_ev = {e1, e2};
    c.interaction_length_um = 50.0;
    c.coupling_g_qu = 0.5;
    c.matched_transition = t;
    return c;
}

}  // namespace

TEST(Lattice, ShapeIndexing) {
    const LatticeShape s(3, {1, 0});
    EXPECT_EQ(s.size(), 16u);
    EXPECT_EQ(s.index(2, 3), 11u);
    EXPECT_EQ(s.node(11), (FockPair{2, 3}));
    EXPECT_EQ(s.electron_level(2, 3), -4);
    EXPECT_THROW(s.index(4, 0), ShapeError);
    EXPECT_THROW(LatticeShape(3, {3, 0}), DomainError);
    EXPECT_THROW(LatticeShape(0, {0, 0}), DomainError);
}

TEST(Lattice, ReducedOrderTwoValues) {
    const double sigma = 2.0, p = -40.0, k = std::numbers::pi / sigma;
    const LatticePhases ph = reduced_lattice_phases(sigma, 2, p, 4);
    EXPECT_EQ(ph.phi(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(ph.phi(1, 0), p);
    EXPECT_DOUBLE_EQ(ph.phi(0, 1), p);
    EXPECT_DOUBLE_EQ(ph.phi(1, 1), 0.0);
    EXPECT_DOUBLE_EQ(ph.phi(2, 2), -8.0 * k);
    EXPECT_DOUBLE_EQ(ph.phi(3, 1), -8.0 * k + 2.0 * (p - k));
}

TEST(Lattice, ReducedOrderOneDependsOnTotalOnly) {
    const LatticePhases ph = reduced_lattice_phases(3.0, 1, 0.0, 5);
    const LadderPhases single = reduced_phases(3.0, 1, 0.0, -10, 0);
    for (int a = 0; a <= 5; ++a)
        for (int b = 0; b <= 5; ++b) EXPECT_NEAR(ph.phi(a, b), single.phi(-(a + b)), 1e-12);
}

TEST(Lattice, PhysicalOnePhotonMatchesSingleModeLadder) {
    PhysicalConfig c = two_mode_physical(2.0, 2.0, MatchedTransition::OnePhotonEmission);
    const LatticePhases ph = physical_lattice_phases(c, 6);
    EXPECT_LT(ph.closure_defect(), 1e-12);
    c.photon_energy_ev = {2.0};
    c.truncation_n_max = 12;
    const LadderPhases single = mismatch_phases_physical(c);
    for (int a = 0; a <= 6; ++a)
        for (int b = 0; b <= 6; ++b)
            EXPECT_NEAR(ph.phi(a, b), single.phi(-(a + b)), 1e-9 * (1.0 + std::abs(single.phi(-(a + b)))));
}

TEST(Lattice, PhysicalJointPairIsMatched) {
    const LatticePhases ph = physical_lattice_phases(two_mode_physical(1.5, 2.5, MatchedTransition::TwoPhotonEmission), 4);
    EXPECT_LT(ph.closure_defect(), 1e-12);
    EXPECT_NEAR(ph.phi(1, 1), 0.0, 1e-9);
    // The single-photon mismatch is split equally between the modes.
    EXPECT_NEAR(ph.phi(1, 0), ph.phi(0, 1), 1e-9);
    EXPECT_NE(ph.phi(1, 0), 0.0);
}

TEST(Lattice, PhysicalNeedsTwoModes) {
    PhysicalConfig c = two_mode_physical(2.0, 2.0, MatchedTransition::OnePhotonEmission);
    c.photon_energy_ev = {2.0};
    EXPECT_THROW(physical_lattice_phases(c, 4), DomainError);
}

TEST(TwoMode, UnitaryAndSymmetric) {
    const LatticePhases ph = reduced_lattice_phases(4.0, 2, -60.0, 14);
    const TwoModeWaveFunction s = evolve_two_mode(ph, 4.0);
    EXPECT_LT(s.norm_drift(), 1e-9);
    for (int a = 0; a <= 14; ++a)
        for (int b = 0; b < a; ++b) EXPECT_NEAR(s.probability(a, b), s.probability(b, a), 1e-10);
}

TEST(TwoMode, SingleModeLimit) {
    for (int order : {1, 2}) {
        const double p = order == 2 ? -50.0 : 0.0;
        const LatticePhases ph = reduced_lattice_phases(3.0, order, p, 12);
        const TwoModeWaveFunction s = evolve_two_mode(ph, 1.3, complex{}, TwoModeWaveFunction::initial(ph.shape()),
                                                      {.boundary_threshold = 1e-6});
        const LadderPhases ladder = ph.mode_one_ladder();
        const WaveFunction w = evolve_exact(ladder, 1.3, WaveFunction::initial(ladder), {.boundary_threshold = 1e-6});
        for (int n = 0; n <= 12; ++n) {
            EXPECT_LT(std::abs(s.amplitude(n, 0) - w.amplitude(-n)), 1e-12) << order << " " << n;
            for (int b = 1; b <= 12; ++b) EXPECT_EQ(s.amplitude(n, b), complex{});
        }
    }
}

TEST(TwoMode, ZeroCouplingStaysPut) {
    const LatticePhases ph = reduced_lattice_phases(1.0, 2, -10.0, 3);
    const TwoModeWaveFunction s = evolve_two_mode(ph, 0.0);
    EXPECT_NEAR(s.probability(0, 0), 1.0, 1e-15);
}

TEST(TwoMode, ShellOverflowThrows) {
    const LatticePhases ph = reduced_lattice_phases(inf, 1, 0.0, 3);
    EXPECT_THROW(evolve_two_mode(ph, 1.5), TruncationOverflow);
}

TEST(TwoMode, ShapeMismatchThrows) {
    const LatticePhases ph = reduced_lattice_phases(1.0, 2, -10.0, 3);
    const LatticeShape other(4, {0, 0});
    EXPECT_THROW(evolve_two_mode(ph, 1.0, std::nullopt, TwoModeWaveFunction::initial(other)), ShapeError);
}

TEST(TwoMode, ThreeLevelFullContrast) {
    // Nodes (0,0), (1,0), (0,1), (1,1): both intermediate nodes detuned
    // equally, so the pair transfer has no residual detuning.
    const double p = -1000.0;
    const LatticePhases ph = reduced_lattice_phases(1.0, 2, p, 1);
    double best = 0.0;
    for (double ge = 0.0; ge < 2.0; ge += 0.005) {
        const TwoModeWaveFunction s = evolve_two_mode(ph, coupling_for(ge, p), {.boundary_threshold = inf});
        best = std::max(best, s.probability(1, 1));
    }
    EXPECT_GT(best, 0.98);
}

TEST(TwoMode, DeterministicPairAtSmallSigma) {
    const double p = -1000.0;
    const LatticePhases ph = reduced_lattice_phases(0.05, 2, p, 1);
    double best = 0.0;
    for (double ge = 0.0; ge < 2.0; ge += 0.005) {
        const TwoModeWaveFunction s = evolve_two_mode(ph, coupling_for(ge, p), {.boundary_threshold = inf});
        best = std::max(best, s.probability(1, 1));
    }
    EXPECT_NEAR(best, 1.0, 2e-2);
}

TEST(TwoMode, TwinBeamRegime) {
    const double p = -1000.0;
    const LatticePhases ph = reduced_lattice_phases(1e5, 2, p, 20);
    for (double ge : {0.1, 0.3}) {
        const TwinStatistics ts = twin_statistics(evolve_two_mode(ph, coupling_for(ge, p)));
        EXPECT_GT(ts.diagonal_weight, 0.99) << ge;
        ASSERT_TRUE(ts.geometric_ratio.has_value());
        for (std::size_t n = 0; n + 1 < ts.diagonal.size() && ts.diagonal[n + 1] > 1e-8; ++n)
            EXPECT_NEAR(ts.diagonal[n + 1] / ts.diagonal[n] / *ts.geometric_ratio, 1.0, 0.05) << ge << " " << n;
        EXPECT_NEAR(ts.mode1.mean_photons, ts.mode2.mean_photons, 1e-10);
    }
}

TEST(TwoMode, GhzAtSmallSigma) {
    const double p = -160.0;
    const LatticePhases ph = reduced_lattice_phases(0.05, 2, p, 4);
    const TwoModeWaveFunction s = evolve_two_mode(ph, coupling_for(0.4, p), {.boundary_threshold = 1e-6});
    const PhaseFit fit = best_phase_fidelity(s, [](double phase) { return ghz_reference(phase, 4); });
    EXPECT_GT(fit.fidelity, 0.99);
}

TEST(TwinStats, ExactTwinBeamFit) {
    const TwoModeReference ref = twin_beam_reference(0.6, 0.4, 30);
    const TwoModeWaveFunction s(ref.shape, ref.amplitudes);
    const TwinStatistics ts = twin_statistics(s);
    EXPECT_NEAR(ts.diagonal_weight, 1.0, 1e-12);
    EXPECT_NEAR(*ts.geometric_ratio, std::pow(std::tanh(0.6), 2), 1e-10);
    EXPECT_NEAR(fidelity(s, ref), 1.0, 1e-12);
    EXPECT_NEAR(ts.mode1.mean_photons, std::pow(std::sinh(0.6), 2), 1e-6);
}

TEST(TwinStats, FitNeedsThreePoints) {
    const TwoModeWaveFunction s(LatticeShape(2, {0, 0}), {1.0, 0, 0, 0, 0, 0, 0, 0, 0});
    EXPECT_FALSE(twin_statistics(s).geometric_ratio.has_value());
}

TEST(References, TwinFromMeanAndGhz) {
    const TwoModeReference t = twin_beam_from_mean(0.5, 0.0, 80);
    double mean = 0.0;
    for (int n = 0; n <= 80; ++n) mean += n * std::norm(t.amplitude(n, n));
    EXPECT_NEAR(mean, 0.5, 1e-10);
    const TwoModeReference g = ghz_reference(0.0, 2);
    EXPECT_NEAR(std::norm(g.amplitude(0, 0)) + std::norm(g.amplitude(1, 1)), 1.0, 1e-15);
    EXPECT_THROW(twin_beam_reference(-1.0, 0.0, 4), DomainError);
}

TEST(References, FidelityRejectsFockStart) {
    const LatticePhases ph = reduced_lattice_phases(1.0, 2, -10.0, 3, {1, 0});
    EXPECT_THROW(fidelity(TwoModeWaveFunction::initial(ph.shape()), ghz_reference(0.0, 3)), ShapeError);
}
