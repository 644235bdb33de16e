#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "recoil/pinem.hpp"
#include "support/oracles.hpp"

using namespace recoil;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

double rms_width(const ElectronSpectrum& s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < s.levels.size(); ++i) acc += s.levels[i] * double(s.levels[i]) * s.probabilities[i];
    return std::sqrt(acc);
}

std::vector<double> matched_pair_revivals(double sigma, double g_max) {
    PinemScanSpec spec;
    spec.sigma = sigma;
    spec.g_values = uniform_grid(0.0, g_max, 0.01);
    const auto scan = pinem_scan(spec);
    return detect_revivals(spec.g_values, revival_trace(scan, RevivalTrace::MatchedPair), 0.2);
}

}  // namespace

TEST(Pinem, ZeroCouplingStaysAtZeroLoss) {
    const ElectronSpectrum s = pinem_evolve(make_pinem_config(4.0, 0.0));
    EXPECT_EQ(s.probability(0), 1.0);
}

TEST(Pinem, NoRecoilBesselSidebands) {
    const ElectronSpectrum s = pinem_evolve(make_pinem_config(inf, 1.2));
    for (int m = -8; m <= 8; ++m) EXPECT_NEAR(s.probability(m), oracle::bessel_j_sq(m, 2.4), 1e-12) << m;
}

TEST(Pinem, NoRecoilSymmetry) {
    const ElectronSpectrum s = pinem_evolve(make_pinem_config(inf, 3.7));
    for (int m = 1; m <= 20; ++m) EXPECT_NEAR(s.probability(m), s.probability(-m), 1e-10);
}

TEST(Pinem, SmallSigmaRabi) {
    const ElectronSpectrum s = pinem_evolve(make_pinem_config(0.5, pi / 2));
    EXPECT_NEAR(s.probability(-1), 1.0, 5e-2);
}

TEST(Pinem, Unitarity) {
    for (double sigma : {0.5, 3.0, 10.0, inf})
        for (double g : {0.5, 4.0, 12.0}) EXPECT_NEAR(pinem_evolve(make_pinem_config(sigma, g)).total(), 1.0, 1e-9);
}

TEST(Pinem, RecoilAsymmetryFavoursEmission) {
    for (double g : {1.0, 3.0, 6.0}) {
        const ElectronSpectrum s = pinem_evolve(make_pinem_config(4.0, g));
        double loss = 0.0, gain = 0.0;
        for (std::size_t i = 0; i < s.levels.size(); ++i) {
            if (s.levels[i] < 0) loss += s.probabilities[i];
            if (s.levels[i] > 0) gain += s.probabilities[i];
        }
        EXPECT_GT(loss, gain) << g;
    }
}

TEST(Pinem, SupportBoundedBelowFirstRevival) {
    const double sigma = 5.0;
    for (double g = 0.5; g < first_revival_fit(sigma) * 0.85; g += 0.5) {
        const ElectronSpectrum s = pinem_evolve(make_pinem_config(sigma, g));
        double outside = 0.0;
        for (std::size_t i = 0; i < s.levels.size(); ++i)
            if (std::abs(s.levels[i]) > sigma + 4.0 * std::sqrt(g)) outside += s.probabilities[i];
        EXPECT_LT(outside, 1e-3) << g;
    }
}

TEST(Pinem, BoundaryOverflowAsksForMoreSidebands) {
    EXPECT_THROW(pinem_evolve(make_pinem_config(inf, 5.0, 1, 0.0, 4)), TruncationOverflow);
}

TEST(Pinem, ConfigValidation) {
    PinemConfig c = make_pinem_config(2.0, 1.0);
    c.classical_coupling_g = -1.0;
    EXPECT_THROW(c.validate(), DomainError);
    c = make_pinem_config(2.0, 1.0);
    c.phases = reduced_phases(2.0, 1, 0.0, -5, 3);
    EXPECT_THROW(c.validate(), ShapeError);
}

TEST(Pinem, ScanGrowsSidebandsOnOverflow) {
    PinemScanSpec spec;
    spec.sigma = inf;
    spec.g_values = {0.0, 1.0, 8.0};
    const auto scan = pinem_scan(spec);
    ASSERT_EQ(scan.size(), 3u);
    for (const auto& p : scan) EXPECT_NEAR(p.spectrum.total(), 1.0, 1e-9);
    EXPECT_NEAR(scan[2].spectrum.probability(3), oracle::bessel_j_sq(3, 16.0), 1e-10);
}

TEST(Pinem, ScanIndependentOfWorkerCount) {
    PinemScanSpec spec;
    spec.sigma = 3.0;
    spec.g_values = uniform_grid(0.0, 4.0, 0.25);
    const auto a = pinem_scan(spec, 1);
    const auto b = pinem_scan(spec, 3);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].spectrum.probabilities, b[i].spectrum.probabilities);
}

TEST(Pinem, EmptyScanIsConfigError) { EXPECT_THROW(pinem_scan(PinemScanSpec{}), ConfigError); }

// --- revival detection -------------------------------------------------------

TEST(Revivals, MonotoneTraceHasNone) {
    const std::vector<double> g = uniform_grid(0.0, 5.0, 0.01);
    std::vector<double> y;
    for (double x : g) y.push_back(std::exp(-x));
    EXPECT_TRUE(detect_revivals(g, y).empty());
}

TEST(Revivals, ProminenceIsMeasuredFromHigherSaddle) {
    const std::vector<double> x{0, 1, 2, 3, 4, 5, 6};
    const std::vector<double> y{0.0, 1.0, 0.2, 0.5, 0.4, 0.9, 0.0};
    const auto peaks = find_peaks(x, y);
    ASSERT_EQ(peaks.size(), 3u);
    EXPECT_DOUBLE_EQ(peaks[0].prominence, 1.0);
    EXPECT_DOUBLE_EQ(peaks[1].prominence, 0.1);
    EXPECT_DOUBLE_EQ(peaks[2].prominence, 0.7);
    EXPECT_EQ(detect_revivals(x, y, 0.5), (std::vector<double>{1.0, 5.0}));
}

TEST(Revivals, RejectsBadInput) {
    EXPECT_THROW(detect_revivals({0.0, 1.0, 3.0}, {0.0, 1.0, 0.0}), DomainError);
    EXPECT_THROW(detect_revivals({0.0, 1.0}, {0.0}), ShapeError);
    EXPECT_THROW(detect_revivals({0.0, 1.0}, {0.0, 1.0}, 0.0), DomainError);
}

TEST(Revivals, FirstRevivalAtSigmaFive) {
    const auto r = matched_pair_revivals(5.0, 10.0);
    ASSERT_FALSE(r.empty());
    EXPECT_NEAR(r.front() / first_revival_fit(5.0), 1.0, 0.15);
}

TEST(Revivals, SecondRevivalAtSigmaThree) {
    const auto r = matched_pair_revivals(3.0, 14.0);
    ASSERT_GE(r.size(), 2u);
    EXPECT_NEAR(r[1] / second_revival_fit(3.0), 1.0, 0.15);
}

// --- two-photon PINEM ----------------------------------------------------------

TEST(TwoPhotonPinem, ZeroCoupling) {
    const ElectronSpectrum s = two_photon_pinem_evolve(make_pinem_config(0.3, 0.0, 2, -100.0));
    EXPECT_EQ(s.probability(0), 1.0);
}

TEST(TwoPhotonPinem, RequiresOddMismatch) {
    EXPECT_THROW(two_photon_pinem_evolve(make_pinem_config(0.3, 1.0, 2, 0.0)), DomainError);
    EXPECT_THROW(two_photon_pinem_evolve(make_pinem_config(0.3, 1.0, 1, 0.0)), DomainError);
}

TEST(TwoPhotonPinem, EvenSidebandsDominate) {
    const ElectronSpectrum s = two_photon_pinem_evolve(make_pinem_config(inf, 20.0, 2, -1000.0));
    double odd = 0.0;
    for (std::size_t i = 0; i < s.levels.size(); ++i)
        if (s.levels[i] % 2 != 0) odd += s.probabilities[i];
    EXPECT_LT(odd, 0.01);
}

TEST(TwoPhotonPinem, ZeroLevelRevivalsAtMultiplesOfPi) {
    const double p = -1000.0;
    const std::vector<double> g_eff = uniform_grid(0.0, 3.5 * pi, 0.01);
    PinemScanSpec spec;
    spec.sigma = 0.3;
    spec.matched_order = 2;
    spec.one_photon_mismatch = p;
    for (double ge : g_eff) spec.g_values.push_back(std::sqrt(ge * std::abs(p)));
    const auto r = detect_revivals(g_eff, revival_trace(pinem_scan(spec), RevivalTrace::ZeroLoss), 0.3);
    ASSERT_EQ(r.size(), 3u);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(r[k] / ((k + 1) * pi), 1.0, 0.10) << k;
}

TEST(TwoPhotonPinem, WidthGrowsQuadratically) {
    for (double g : {10.0, 20.0}) {
        const double w1 = rms_width(two_photon_pinem_evolve(make_pinem_config(inf, g, 2, -1000.0)));
        const double w2 = rms_width(two_photon_pinem_evolve(make_pinem_config(inf, 2 * g, 2, -1000.0)));
        EXPECT_NEAR(w2 / w1, 4.0, 0.8) << g;
        const double o1 = rms_width(pinem_evolve(make_pinem_config(inf, g)));
        const double o2 = rms_width(pinem_evolve(make_pinem_config(inf, 2 * g)));
        EXPECT_NEAR(o2 / o1, 2.0, 1e-6);
    }
}
