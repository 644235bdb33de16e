#pragma once

// Stimulated (classical-field) interaction: the same autonomized propagator
// with every photon factor set to 1, over a ladder symmetric in m.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "recoil/engines.hpp"
#include "recoil/errors.hpp"
#include "recoil/ladder.hpp"
#include "recoil/observables.hpp"
#include "recoil/parallel.hpp"

namespace recoil {

struct PinemConfig {
    double classical_coupling_g = 0.0;  // g_Qu times the field amplitude
    LadderPhases phases;                // m in [-M, M]
    int matched_order = 1;

    int sidebands() const { return phases.m_max(); }

    void validate() const {
        if (!(classical_coupling_g >= 0.0) || !std::isfinite(classical_coupling_g))
            throw DomainError("classical coupling must be finite and non-negative");
        if (matched_order != 1 && matched_order != 2) throw DomainError("matched order must be 1 or 2");
        if (phases.size() == 0 || phases.m_min() != -phases.m_max())
            throw ShapeError("PINEM ladder must be symmetric around m = 0");
    }
};

/// Sideband count per side. 8 (sigma + g) is always enough; recoil confines
/// the spectrum to roughly sigma + 4 sqrt(g) and the no-recoil Bessel
/// envelope ends near 2g, so the smaller bound is used. The post-run
/// boundary check guards the choice.
inline int default_sidebands(double sigma, double g) {
    const double loose = 8.0 * (sigma + g);
    const double recoil = 2.0 * sigma + 4.0 * std::sqrt(g) + 12.0;
    const double bessel = 4.0 * g + 30.0;
    const double m = std::min({loose, recoil, bessel});
    return std::max(4, static_cast<int>(std::ceil(m)));
}

/// Reduced phases over [-M, M]; absorption steps use the same law as emission.
inline LadderPhases pinem_phases(double sigma, int matched_order, double one_photon_mismatch, int sidebands) {
    if (sidebands < 1) throw DomainError("sideband count must be positive");
    return reduced_phases(sigma, matched_order, one_photon_mismatch, -sidebands, sidebands);
}

inline PinemConfig make_pinem_config(double sigma, double g, int matched_order = 1,
                                     double one_photon_mismatch = 0.0,
                                     std::optional<int> sidebands = std::nullopt) {
    const double recoil_sigma = std::isinf(sigma) ? std::numeric_limits<double>::max() / 16 : sigma;
    const int m = sidebands.value_or(default_sidebands(recoil_sigma, g));
    return {g, pinem_phases(sigma, matched_order, one_photon_mismatch, m), matched_order};
}

inline WaveFunction pinem_state(const PinemConfig& config, double boundary_threshold = 1e-8) {
    config.validate();
    EvolveOptions opt;
    opt.boundary_threshold = boundary_threshold;
    return evolve_exact(config.phases, config.classical_coupling_g,
                        WaveFunction::initial_classical(config.phases), opt);
}

inline ElectronSpectrum pinem_evolve(const PinemConfig& config, double boundary_threshold = 1e-8) {
    return electron_spectrum(pinem_state(config, boundary_threshold));
}

inline ElectronSpectrum two_photon_pinem_evolve(const PinemConfig& config, double boundary_threshold = 1e-8) {
    if (config.matched_order != 2) throw DomainError("two-photon PINEM needs matched order 2");
    if (config.phases.phi(-1) == 0.0)
        throw DomainError("two-photon PINEM needs a non-zero odd-level mismatch");
    return pinem_evolve(config, boundary_threshold);
}

// ---------------------------------------------------------------------------
// Coupling scans and revivals

struct PinemScanPoint {
    double g = 0.0;
    int sidebands = 0;
    ElectronSpectrum spectrum;
};

struct PinemScanSpec {
    double sigma = 1.0;
    int matched_order = 1;
    double one_photon_mismatch = 0.0;
    std::vector<double> g_values;
    double boundary_threshold = 1e-8;
    int max_sidebands = 4096;
};

/// Evolves every g value; the sideband count doubles on boundary overflow.
inline std::vector<PinemScanPoint> pinem_scan(const PinemScanSpec& spec, int workers = 1) {
    if (spec.g_values.empty()) throw ConfigError("empty coupling grid");
    std::vector<PinemScanPoint> out(spec.g_values.size());
    parallel_for(spec.g_values.size(), workers, [&](std::size_t i) {
        const double g = spec.g_values[i];
        PinemConfig cfg = make_pinem_config(spec.sigma, g, spec.matched_order, spec.one_photon_mismatch);
        while (true) {
            try {
                out[i] = {g, cfg.sidebands(), pinem_evolve(cfg, spec.boundary_threshold)};
                return;
            } catch (const TruncationOverflow&) {
                const int next = 2 * cfg.sidebands();
                if (next > spec.max_sidebands) throw;
                cfg = make_pinem_config(spec.sigma, g, spec.matched_order, spec.one_photon_mismatch, next);
            }
        }
    });
    return out;
}

enum class RevivalTrace {
    ZeroLoss,     // P_0
    MatchedPair,  // P_0 + P_-1, the resonant pair of a matched one-photon ladder
};

inline std::vector<double> revival_trace(const std::vector<PinemScanPoint>& scan, RevivalTrace kind) {
    std::vector<double> out;
    out.reserve(scan.size());
    for (const auto& p : scan) {
        double v = p.spectrum.probability(0);
        if (kind == RevivalTrace::MatchedPair) v += p.spectrum.probability(-1);
        out.push_back(v);
    }
    return out;
}

struct Peak {
    std::size_t index = 0;
    double position = 0.0;
    double value = 0.0;
    double prominence = 0.0;
};

/// Interior local maxima with their topographic prominence: height above the
/// higher of the two lowest points separating the peak from taller terrain
/// (or the trace end) on each side. Flat tops report their middle sample.
inline std::vector<Peak> find_peaks(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ShapeError("trace and grid lengths differ");
    std::vector<Peak> peaks;
    const std::size_t n = y.size();
    std::size_t i = 1;
    while (i + 1 < n) {
        if (y[i] > y[i - 1]) {
            std::size_t j = i;
            while (j + 1 < n && y[j + 1] == y[i]) ++j;
            if (j + 1 < n && y[j + 1] < y[i]) {
                const std::size_t mid = (i + j) / 2;
                double left_min = y[i];
                for (std::size_t k = i; k-- > 0;) {
                    if (y[k] > y[i]) break;
                    left_min = std::min(left_min, y[k]);
                }
                double right_min = y[i];
                for (std::size_t k = j + 1; k < n; ++k) {
                    if (y[k] > y[i]) break;
                    right_min = std::min(right_min, y[k]);
                }
                peaks.push_back({mid, x[mid], y[mid], y[i] - std::max(left_min, right_min)});
            }
            i = j + 1;
        } else {
            ++i;
        }
    }
    return peaks;
}

inline constexpr double default_revival_prominence = 0.05;

/// Coupling values of revivals: peaks of the trace with at least the given
/// prominence, ascending. The grid must be uniform.
inline std::vector<double> detect_revivals(const std::vector<double>& g, const std::vector<double>& trace,
                                           double prominence = default_revival_prominence) {
    if (!(prominence > 0.0)) throw DomainError("prominence must be positive");
    if (g.size() != trace.size()) throw ShapeError("trace and grid lengths differ");
    if (g.size() >= 3) {
        const double step = g[1] - g[0];
        if (!(step > 0.0)) throw DomainError("coupling grid must be increasing");
        for (std::size_t i = 2; i < g.size(); ++i)
            if (std::abs((g[i] - g[i - 1]) - step) > 1e-9 * std::max(1.0, std::abs(g[i])))
                throw DomainError("coupling grid must be uniform");
    }
    std::vector<double> out;
    for (const Peak& p : find_peaks(g, trace))
        if (p.prominence >= prominence) out.push_back(p.position);
    return out;
}

/// Empirical revival-position fits.
inline double first_revival_fit(double sigma) { return 0.84 * sigma + 1.66; }
inline double second_revival_fit(double sigma) { return 3.28 * sigma + 1.95; }

/// Uniform grid [lo, hi] with the given step, endpoints included.
inline std::vector<double> uniform_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) throw DomainError("invalid grid");
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + static_cast<double>(i) * step;
    return out;
}

}  // namespace recoil
