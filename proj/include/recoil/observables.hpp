#pragma once

// Photon statistics, electron spectra and fidelities extracted from evolved
// ladder states.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "recoil/errors.hpp"
#include "recoil/wavefunction.hpp"

namespace recoil {

struct PhotonStatistics {
    std::vector<double> probabilities;  // P(n), n = 0..size-1
    double mean_photons = 0.0;
    std::optional<double> g2;  // empty when the mean is below 1e-12

    bool g2_defined() const { return g2.has_value(); }
};

/// Statistics of an arbitrary photon-number distribution.
inline PhotonStatistics statistics_from_distribution(std::vector<double> p) {
    PhotonStatistics out;
    double first = 0.0, second = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) {
        const double nd = static_cast<double>(n);
        first += nd * p[n];
        second += nd * (nd - 1.0) * p[n];
    }
    out.probabilities = std::move(p);
    out.mean_photons = first;
    if (first >= 1e-12) out.g2 = second / (first * first);
    return out;
}

/// P(n) = |C_m|^2 with n = initial_fock - m; perfect electron-photon
/// correlation makes this the cavity distribution.
inline PhotonStatistics photon_statistics(const WaveFunction& state, int initial_fock) {
    if (initial_fock < state.m_max()) throw ShapeError("initial Fock number below the ladder top");
    std::vector<double> p(static_cast<std::size_t>(initial_fock - state.m_min() + 1), 0.0);
    for (int m = state.m_min(); m <= state.m_max(); ++m)
        p[static_cast<std::size_t>(initial_fock - m)] = state.probability(m);
    return statistics_from_distribution(std::move(p));
}

inline PhotonStatistics photon_statistics(const WaveFunction& state) {
    if (!state.quantized()) throw ShapeError("classical ladder has no photon statistics");
    return photon_statistics(state, *state.initial_fock());
}

inline double squeezed_vacuum_g2_reference(double mean) {
    if (!(mean > 0.0)) throw DomainError("mean photon number must be positive");
    return 3.0 + 1.0 / mean;
}

/// Effective two-photon coupling g^2 / (-phi_-1 L).
inline double two_photon_g_eff(double g_qu, double one_photon_mismatch_phase) {
    if (one_photon_mismatch_phase == 0.0)
        throw DomainError("two-photon reduction needs a non-zero one-photon mismatch");
    return g_qu * g_qu / (-one_photon_mismatch_phase);
}

// ---------------------------------------------------------------------------
// Reference states

enum class ReferenceKind { Bell, NOON2, GHZ, SqueezedVacuum, TwinBeam, WeakCoherent };

inline const char* to_string(ReferenceKind k) {
    switch (k) {
        case ReferenceKind::Bell: return "bell";
        case ReferenceKind::NOON2: return "noon";
        case ReferenceKind::GHZ: return "ghz";
        case ReferenceKind::SqueezedVacuum: return "squeezed_vacuum";
        case ReferenceKind::TwinBeam: return "twin_beam";
        case ReferenceKind::WeakCoherent: return "weak_coherent";
    }
    return "?";
}

/// Reference over ladder levels, same indexing as WaveFunction: level m
/// carries the electron at Omega_0 + m omega and -m photons from vacuum.
struct ReferenceState {
    ReferenceKind kind = ReferenceKind::Bell;
    int m_min = 0;
    std::vector<complex> amplitudes;  // ascending m, ends at m = 0
    double squeezing_r = 0.0;
    double phase = 0.0;
    complex alpha{};

    int m_max() const { return m_min + static_cast<int>(amplitudes.size()) - 1; }
    complex amplitude(int m) const {
        if (m < m_min || m > m_max()) return {};
        return amplitudes[static_cast<std::size_t>(m - m_min)];
    }
};

namespace detail {

inline ReferenceState from_photon_amplitudes(ReferenceKind kind, const std::vector<complex>& c) {
    ReferenceState out;
    out.kind = kind;
    out.m_min = -static_cast<int>(c.size()) + 1;
    out.amplitudes.assign(c.rbegin(), c.rend());
    double norm = 0.0;
    for (const auto& a : out.amplitudes) norm += std::norm(a);
    for (auto& a : out.amplitudes) a /= std::sqrt(norm);
    return out;
}

}  // namespace detail

/// (|0,0> + e^{i phase} |-1,1>) / sqrt 2.
inline ReferenceState bell_reference(double phase = 0.0) {
    ReferenceState r = detail::from_photon_amplitudes(ReferenceKind::Bell, {1.0, std::polar(1.0, phase)});
    r.phase = phase;
    return r;
}

/// (|0,0> + e^{i phase} |-2,2>) / sqrt 2.
inline ReferenceState noon_reference(double phase = 0.0) {
    ReferenceState r =
        detail::from_photon_amplitudes(ReferenceKind::NOON2, {1.0, 0.0, std::polar(1.0, phase)});
    r.phase = phase;
    return r;
}

/// Single-mode squeezed vacuum truncated at n_max photons and renormalized.
inline ReferenceState squeezed_vacuum_reference(double r, double phase, int n_max) {
    if (!(r >= 0.0)) throw DomainError("squeezing parameter must be non-negative");
    if (n_max < 0) throw DomainError("n_max must be non-negative");
    std::vector<complex> c(static_cast<std::size_t>(n_max + 1), complex{});
    const double t = std::tanh(r);
    for (int k = 0; 2 * k <= n_max; ++k) {
        // sqrt((2k)!) / (2^k k!) tanh^k / sqrt(cosh r)
        double mag = 0.5 * std::lgamma(2.0 * k + 1.0) - k * std::log(2.0) - std::lgamma(k + 1.0) -
                     0.5 * std::log(std::cosh(r));
        if (k > 0) {
            if (t == 0.0) break;
            mag += k * std::log(t);
        }
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        c[static_cast<std::size_t>(2 * k)] = sign * std::exp(mag) * std::polar(1.0, k * phase);
    }
    ReferenceState out = detail::from_photon_amplitudes(ReferenceKind::SqueezedVacuum, c);
    out.squeezing_r = r;
    out.phase = phase;
    return out;
}

/// Coherent state e^{-|a|^2/2} a^n / sqrt(n!), truncated at n_max.
inline ReferenceState weak_coherent_reference(complex alpha, int n_max) {
    if (n_max < 0) throw DomainError("n_max must be non-negative");
    std::vector<complex> c(static_cast<std::size_t>(n_max + 1));
    const double a = std::abs(alpha);
    const double arg = std::arg(alpha);
    for (int n = 0; n <= n_max; ++n) {
        const double mag =
            a == 0.0 ? (n == 0 ? 1.0 : 0.0)
                     : std::exp(-0.5 * a * a + n * std::log(a) - 0.5 * std::lgamma(n + 1.0));
        c[static_cast<std::size_t>(n)] = std::polar(mag, n * arg);
    }
    ReferenceState out = detail::from_photon_amplitudes(ReferenceKind::WeakCoherent, c);
    out.alpha = alpha;
    return out;
}

/// |<ref|psi>|^2. The state must be a vacuum-start ladder covering every
/// populated reference level.
inline double fidelity(const WaveFunction& state, const ReferenceState& reference) {
    if (state.quantized() && *state.initial_fock() != 0)
        throw ShapeError("reference states are defined for an initially empty cavity");
    complex overlap{};
    for (int m = reference.m_min; m <= reference.m_max(); ++m) {
        const complex r = reference.amplitude(m);
        if (m < state.m_min() || m > state.m_max()) {
            if (std::norm(r) > 1e-20) throw ShapeError("reference populates levels outside the state's ladder");
            continue;
        }
        overlap += std::conj(r) * state.amplitude(m);
    }
    return std::norm(overlap);
}

struct PhaseFit {
    double fidelity = 0.0;
    double phase = 0.0;
};

/// Maximizes f over [0, 2 pi): coarse grid then golden-section refinement.
inline PhaseFit maximize_over_phase(const std::function<double(double)>& f, double tol = 1e-6) {
    constexpr int grid = 72;
    const double two_pi = 2.0 * std::numbers::pi;
    const double step = two_pi / grid;
    int best = 0;
    double best_val = -1.0;
    for (int i = 0; i < grid; ++i) {
        const double v = f(i * step);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    double a = (best - 1) * step, b = (best + 1) * step;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    PhaseFit fit{best_val, best * step};
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if (fm > fit.fidelity) fit = {fm, mid};
    fit.phase = std::fmod(fit.phase + two_pi, two_pi);
    return fit;
}

/// Fidelity maximized over the free phase of a reference family.
inline PhaseFit best_phase_fidelity(const WaveFunction& state,
                                    const std::function<ReferenceState(double)>& family,
                                    double tol = 1e-6) {
    return maximize_over_phase([&](double phase) { return fidelity(state, family(phase)); }, tol);
}

/// Squeezed vacuum with sinh^2 r = mean; phase fitted to `state` when given.
inline ReferenceState sv_reference_from_mean(double mean, int n_max,
                                             const WaveFunction* state = nullptr) {
    if (!(mean >= 0.0)) throw DomainError("mean photon number must be non-negative");
    const double r = std::asinh(std::sqrt(mean));
    double phase = 0.0;
    if (state) {
        phase = best_phase_fidelity(*state, [&](double ph) { return squeezed_vacuum_reference(r, ph, n_max); })
                    .phase;
    }
    return squeezed_vacuum_reference(r, phase, n_max);
}

/// Fidelity against a single-mode reference family, maximized over its free
/// phase. SV and coherent amplitudes follow the state's mean photon number.
inline double best_reference_fidelity(const WaveFunction& state, ReferenceKind kind) {
    const int n_max = -state.m_min();
    switch (kind) {
        case ReferenceKind::Bell:
            return best_phase_fidelity(state, [](double ph) { return bell_reference(ph); }).fidelity;
        case ReferenceKind::NOON2:
            return best_phase_fidelity(state, [](double ph) { return noon_reference(ph); }).fidelity;
        case ReferenceKind::SqueezedVacuum: {
            const double mean = photon_statistics(state).mean_photons;
            return fidelity(state, sv_reference_from_mean(mean, n_max, &state));
        }
        case ReferenceKind::WeakCoherent: {
            const double a = std::sqrt(photon_statistics(state).mean_photons);
            return best_phase_fidelity(state, [&](double ph) {
                       return weak_coherent_reference(std::polar(a, ph), n_max);
                   }).fidelity;
        }
        default: throw DomainError("reference kind needs a two-mode state");
    }
}

// ---------------------------------------------------------------------------
// Electron spectrum

struct ElectronSpectrum {
    std::vector<int> levels;  // energy offset in units of omega
    std::vector<double> probabilities;
    // Gaussian-broadened density on a uniform grid; empty when broadening is 0.
    std::vector<double> trace_energy;
    std::vector<double> trace_density;

    double total() const {
        double s = 0.0;
        for (double p : probabilities) s += p;
        return s;
    }
    double probability(int m) const {
        const auto it = std::find(levels.begin(), levels.end(), m);
        return it == levels.end() ? 0.0 : probabilities[static_cast<std::size_t>(it - levels.begin())];
    }
};

inline constexpr double default_broadening = 0.15;

inline ElectronSpectrum electron_spectrum(const WaveFunction& state, double broadening_sigma = 0.0) {
    if (!(broadening_sigma >= 0.0)) throw DomainError("broadening must be non-negative");
    ElectronSpectrum out;
    for (int m = state.m_min(); m <= state.m_max(); ++m) {
        out.levels.push_back(m);
        out.probabilities.push_back(state.probability(m));
    }
    if (broadening_sigma > 0.0) {
        const double step = std::min(0.05, broadening_sigma / 5.0);
        const double lo = state.m_min() - 5.0 * broadening_sigma;
        const double hi = state.m_max() + 5.0 * broadening_sigma;
        const auto count = static_cast<std::size_t>(std::ceil((hi - lo) / step)) + 1;
        const double norm = 1.0 / (broadening_sigma * std::sqrt(2.0 * std::numbers::pi));
        out.trace_energy.resize(count);
        out.trace_density.assign(count, 0.0);
        for (std::size_t i = 0; i < count; ++i) {
            const double x = lo + static_cast<double>(i) * step;
            out.trace_energy[i] = x;
            double d = 0.0;
            for (std::size_t k = 0; k < out.levels.size(); ++k) {
                const double z = (x - out.levels[k]) / broadening_sigma;
                if (std::abs(z) < 12.0) d += out.probabilities[k] * std::exp(-0.5 * z * z);
            }
            out.trace_density[i] = d * norm;
        }
    }
    return out;
}

/// Smallest n with P(n+1) < P(n)/drop_factor and every later P(k) below
/// P(n)/drop_factor as well.
inline std::optional<int> cutoff_position(const PhotonStatistics& stats, double drop_factor = 10.0) {
    if (!(drop_factor > 1.0)) throw DomainError("drop factor must exceed 1");
    const auto& p = stats.probabilities;
    if (p.size() < 2) return std::nullopt;
    // suffix_max[k] = max P(j) over j >= k
    std::vector<double> suffix_max(p.size() + 1, 0.0);
    for (std::size_t k = p.size(); k-- > 0;) suffix_max[k] = std::max(p[k], suffix_max[k + 1]);
    for (std::size_t n = 0; n + 1 < p.size(); ++n) {
        if (p[n] <= 0.0) continue;
        if (suffix_max[n + 1] < p[n] / drop_factor) return static_cast<int>(n);
    }
    return std::nullopt;
}

}  // namespace recoil
