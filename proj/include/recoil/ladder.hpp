#pragma once

// Level structure of the electron-photon ladder: relativistic dispersion,
// transition mismatches, cumulative autonomization phases, and the recoil
// parameter sigma.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "recoil/errors.hpp"

namespace recoil {

namespace constants {
inline constexpr double hbar_c_kev_nm = 0.19732698;
inline constexpr double hbar_c_kev_um = hbar_c_kev_nm * 1e-3;
inline constexpr double electron_rest_kev = 510.99895;
// hc in eV*nm, for wavelength <-> photon energy conversion.
inline constexpr double hc_ev_nm = 1239.84198;
}  // namespace constants

enum class MatchedTransition { OnePhotonEmission, TwoPhotonEmission, Custom };

struct PhysicalConfig {
    double electron_kinetic_kev = 0.0;
    std::vector<double> photon_energy_ev;  // one entry per cavity mode
    double interaction_length_um = 0.0;
    double coupling_g_qu = 0.0;
    MatchedTransition matched_transition = MatchedTransition::OnePhotonEmission;
    std::vector<double> custom_photon_momentum;  // rad/um per mode, Custom only
    double grating_wavenumber = 0.0;             // rad/um, 0 = direct matching
    std::vector<int> initial_cavity_fock;        // per mode
    int truncation_n_max = 16;

    std::size_t mode_count() const { return photon_energy_ev.size(); }

    void validate() const {
        if (!(electron_kinetic_kev > 0.0))
            throw DomainError("electron kinetic energy must be positive");
        if (photon_energy_ev.empty() || photon_energy_ev.size() > 2)
            throw DomainError("mode count must be 1 or 2");
        for (double e : photon_energy_ev) {
            if (!(e > 0.0)) throw DomainError("photon energy must be positive");
            if (!(e * 1e-3 < electron_kinetic_kev))
                throw DomainError("photon energy must be below the electron kinetic energy");
        }
        if (!(interaction_length_um > 0.0))
            throw DomainError("interaction length must be positive");
        if (!(coupling_g_qu >= 0.0)) throw DomainError("coupling must be non-negative");
        if (!(grating_wavenumber >= 0.0))
            throw DomainError("grating wavenumber must be non-negative");
        if (matched_transition == MatchedTransition::Custom &&
            custom_photon_momentum.size() != photon_energy_ev.size())
            throw DomainError("custom photon momentum needs one value per mode");
        if (!initial_cavity_fock.empty() && initial_cavity_fock.size() != photon_energy_ev.size())
            throw DomainError("initial Fock state needs one entry per mode");
        for (int n : initial_cavity_fock)
            if (n < 0) throw DomainError("initial Fock occupation must be non-negative");
        if (truncation_n_max < 1) throw DomainError("truncation n_max must be positive");
    }

    int initial_fock(std::size_t mode = 0) const {
        return initial_cavity_fock.empty() ? 0 : initial_cavity_fock.at(mode);
    }
};

struct ReducedConfig {
    double sigma = 1.0;  // +inf means no recoil
    double coupling_g_qu = 0.0;
    int matched_order = 1;
    double one_photon_mismatch_phase = 0.0;
    int initial_cavity_fock = 0;
    int truncation_n_max = 16;

    void validate() const {
        if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
        if (!(coupling_g_qu >= 0.0)) throw DomainError("coupling must be non-negative");
        if (matched_order != 1 && matched_order != 2)
            throw DomainError("matched order must be 1 or 2");
        if (matched_order == 1 && one_photon_mismatch_phase != 0.0)
            throw DomainError("one-photon mismatch must be 0 when the one-photon step is matched");
        if (!std::isfinite(one_photon_mismatch_phase))
            throw DomainError("one-photon mismatch must be finite");
        if (initial_cavity_fock < 0) throw DomainError("initial Fock occupation must be non-negative");
        if (truncation_n_max < 1) throw DomainError("truncation n_max must be positive");
    }
};

/// Per-level phases of a ladder spanning m in [m_min, m_max], m = 0 the
/// initial electron energy. delta(m) is the dimensionless mismatch of the
/// transition between levels m and m+1, phi(m) the cumulative phase with
/// phi(0) = 0 and phi(m+1) - phi(m) = delta(m).
class LadderPhases {
public:
    LadderPhases() = default;

    /// Builds phases from transition mismatches delta(m), m = m_min..m_max-1.
    static LadderPhases from_transitions(int m_min, int m_max, std::vector<double> delta_kL,
                                         bool truncated = false) {
        check_range(m_min, m_max);
        if (delta_kL.size() != static_cast<std::size_t>(m_max - m_min))
            throw ShapeError("transition count does not match level range");
        LadderPhases out;
        out.m_min_ = m_min;
        out.m_max_ = m_max;
        out.truncated_ = truncated;
        out.delta_ = std::move(delta_kL);
        out.phi_.assign(static_cast<std::size_t>(m_max - m_min + 1), 0.0);
        const auto zero = static_cast<std::size_t>(-m_min);
        for (std::size_t i = zero; i + 1 < out.phi_.size(); ++i)
            out.phi_[i + 1] = out.phi_[i] + out.delta_[i];
        for (std::size_t i = zero; i-- > 0;) out.phi_[i] = out.phi_[i + 1] - out.delta_[i];
        return out;
    }

    /// Builds phases from level values; phi(0) must be exactly 0.
    static LadderPhases from_levels(int m_min, std::vector<double> phiL) {
        if (phiL.empty()) throw ShapeError("empty ladder");
        const int m_max = m_min + static_cast<int>(phiL.size()) - 1;
        check_range(m_min, m_max);
        LadderPhases out;
        out.m_min_ = m_min;
        out.m_max_ = m_max;
        out.phi_ = std::move(phiL);
        if (out.phi(0) != 0.0) throw DomainError("phi_0 must be zero");
        out.delta_.resize(out.phi_.size() - 1);
        for (std::size_t i = 0; i < out.delta_.size(); ++i)
            out.delta_[i] = out.phi_[i + 1] - out.phi_[i];
        return out;
    }

    int m_min() const { return m_min_; }
    int m_max() const { return m_max_; }
    std::size_t size() const { return phi_.size(); }
    bool truncated_by_rest_energy() const { return truncated_; }

    double phi(int m) const { return phi_.at(index(m)); }
    double delta(int m) const {
        if (m < m_min_ || m >= m_max_) throw ShapeError("transition outside ladder");
        return delta_[static_cast<std::size_t>(m - m_min_)];
    }
    const std::vector<double>& phiL() const { return phi_; }
    const std::vector<double>& delta_kL() const { return delta_; }

    std::size_t index(int m) const {
        if (m < m_min_ || m > m_max_) throw ShapeError("level outside ladder");
        return static_cast<std::size_t>(m - m_min_);
    }

    LadderPhases negated() const {
        LadderPhases out = *this;
        for (double& p : out.phi_) p = -p;
        for (double& d : out.delta_) d = -d;
        return out;
    }

private:
    static void check_range(int m_min, int m_max) {
        if (m_min > 0 || m_max < 0 || m_min == m_max)
            throw ShapeError("ladder must contain level 0 and at least one transition");
    }

    int m_min_ = 0;
    int m_max_ = 0;
    bool truncated_ = false;
    std::vector<double> delta_;
    std::vector<double> phi_;
};

// ---------------------------------------------------------------------------
// Dispersion

namespace detail {

// Momentum times c, in keV, from the kinetic energy.
inline double momentum_kev(double kinetic_kev) {
    return std::sqrt(kinetic_kev * (kinetic_kev + 2.0 * constants::electron_rest_kev));
}

// k(E) - k(E - step) for kinetic energy E. The energy difference enters
// exactly, so the result is accurate even when step << E.
inline double wavenumber_gap(double upper_kinetic_kev, double step_kev) {
    const double lower = upper_kinetic_kev - step_kev;
    const double sum_total = 2.0 * upper_kinetic_kev - step_kev + 2.0 * constants::electron_rest_kev;
    return step_kev * sum_total /
           (constants::hbar_c_kev_um * (momentum_kev(upper_kinetic_kev) + momentum_kev(lower)));
}

}  // namespace detail

/// Relativistic electron wavenumber k = sqrt(E^2 - E0^2) / (hbar c), rad/um.
inline double electron_wavenumber(double total_energy_kev) {
    const double e0 = constants::electron_rest_kev;
    if (!(total_energy_kev >= e0))
        throw DomainError("total energy below the electron rest energy");
    return std::sqrt((total_energy_kev - e0) * (total_energy_kev + e0)) / constants::hbar_c_kev_um;
}

/// Inverse of electron_wavenumber.
inline double electron_total_energy(double wavenumber_rad_um) {
    if (!(wavenumber_rad_um >= 0.0)) throw DomainError("wavenumber must be non-negative");
    return std::hypot(wavenumber_rad_um * constants::hbar_c_kev_um, constants::electron_rest_kev);
}

// ---------------------------------------------------------------------------
// Recoil parameter

/// Phase-matching width from the full relativistic expression, keeping the
/// 1240/511^2 prefactor as published.
inline double sigma_full(double kinetic_kev, double photon_ev, double length_um) {
    if (!(kinetic_kev > 0.0) || !(photon_ev > 0.0) || !(length_um > 0.0))
        throw DomainError("sigma_full needs positive energy, photon energy and length");
    const double e = kinetic_kev + constants::electron_rest_kev;
    const double e0 = constants::electron_rest_kev;
    const double p2 = (e - e0) * (e + e0);
    return 1240.0 / (511.0 * 511.0) * std::pow(p2, 1.5) / (photon_ev * photon_ev * length_um);
}

struct SigmaEstimate {
    double value = 0.0;
    bool outside_validity = false;  // kinetic energy >= 150 keV
};

/// Low-energy approximation 155 E_kin^{3/2} / (E_ph^2 L).
inline SigmaEstimate sigma_simple(double kinetic_kev, double photon_ev, double length_um) {
    if (!(kinetic_kev > 0.0) || !(photon_ev > 0.0) || !(length_um > 0.0))
        throw DomainError("sigma_simple needs positive energy, photon energy and length");
    return {155.0 * std::pow(kinetic_kev, 1.5) / (photon_ev * photon_ev * length_um),
            kinetic_kev >= 150.0};
}

/// Effective number of coupled levels.
inline double n_eff(double sigma) {
    if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
    return sigma >= 1.0 ? sigma + 1.0 : 2.0;
}

// ---------------------------------------------------------------------------
// Physical ladder

/// Photon momentum (rad/um) of `mode` that phase-matches the configured
/// transition, grating offset included.
inline double solve_photon_momentum(const PhysicalConfig& config, std::size_t mode = 0) {
    config.validate();
    const double ekin = config.electron_kinetic_kev;
    const double ph = config.photon_energy_ev.at(mode) * 1e-3;
    double kappa = 0.0;
    switch (config.matched_transition) {
        case MatchedTransition::OnePhotonEmission:
            kappa = detail::wavenumber_gap(ekin, ph) - config.grating_wavenumber;
            break;
        case MatchedTransition::TwoPhotonEmission:
            if (config.mode_count() == 2) {
                // Joint emission of one photon into each mode; the single-photon
                // mismatch is split equally between the modes.
                const double ph_other = config.photon_energy_ev.at(1 - mode) * 1e-3;
                const double own = detail::wavenumber_gap(ekin, ph);
                const double other = detail::wavenumber_gap(ekin, ph_other);
                const double joint = detail::wavenumber_gap(ekin, ph + ph_other);
                kappa = own - 0.5 * (own + other - joint) - config.grating_wavenumber;
            } else {
                if (!(2.0 * ph < ekin))
                    throw InfeasiblePhaseMatching("two-photon emission exceeds the kinetic energy");
                kappa = 0.5 * detail::wavenumber_gap(ekin, 2.0 * ph) - config.grating_wavenumber;
            }
            break;
        case MatchedTransition::Custom:
            return config.custom_photon_momentum.at(mode);
    }
    if (!(kappa > 0.0))
        throw InfeasiblePhaseMatching("phase matching requires a non-positive photon momentum");
    return kappa;
}

/// Mismatch phases of the single-mode ladder m in [-n_max, n0] from the exact
/// dispersion. Levels whose kinetic energy would be non-positive are cut and
/// flagged.
inline LadderPhases mismatch_phases_physical(const PhysicalConfig& config) {
    config.validate();
    const double ekin = config.electron_kinetic_kev;
    const double ph = config.photon_energy_ev.front() * 1e-3;
    const double kappa = solve_photon_momentum(config, 0) + config.grating_wavenumber;
    const int m_max = config.initial_fock(0);
    int m_min = -config.truncation_n_max;
    bool truncated = false;
    while (ekin + m_min * ph <= 0.0) {
        ++m_min;
        truncated = true;
    }
    if (m_min == 0 && m_max == 0)
        throw DomainError("no emission level fits above the electron rest energy");
    std::vector<double> delta(static_cast<std::size_t>(m_max - m_min));
    for (int m = m_min; m < m_max; ++m) {
        const double gap = detail::wavenumber_gap(ekin + (m + 1) * ph, ph);
        delta[static_cast<std::size_t>(m - m_min)] = (gap - kappa) * config.interaction_length_um;
    }
    return LadderPhases::from_transitions(m_min, m_max, std::move(delta), truncated);
}

/// Reduced (sigma-only) phase law. Linearized recoil makes every transition
/// mismatch grow by 2 pi / sigma per level; order 1 matches the 0 -> -1
/// emission, order 2 matches the 0 -> -2 pair and shifts odd levels by the
/// extra one-photon mismatch so that phi(-1) equals it.
inline double reduced_phase(int m, double sigma, int matched_order, double one_photon_mismatch) {
    const double k = std::isinf(sigma) ? 0.0 : std::numbers::pi / sigma;
    const double md = m;
    if (matched_order == 1) return -k * md * (md + 1.0);
    double phase = -k * md * (md + 2.0);
    if (m % 2 != 0) phase += one_photon_mismatch - k;
    return phase;
}

inline LadderPhases reduced_phases(double sigma, int matched_order, double one_photon_mismatch,
                                   int m_min, int m_max) {
    if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
    if (matched_order != 1 && matched_order != 2) throw DomainError("matched order must be 1 or 2");
    if (m_min > 0 || m_max < 0 || m_min == m_max)
        throw ShapeError("ladder must contain level 0 and at least one transition");
    std::vector<double> phi;
    phi.reserve(static_cast<std::size_t>(m_max - m_min + 1));
    for (int m = m_min; m <= m_max; ++m)
        phi.push_back(m == 0 ? 0.0 : reduced_phase(m, sigma, matched_order, one_photon_mismatch));
    return LadderPhases::from_levels(m_min, std::move(phi));
}

/// Reduced ladder from a config: m_max = initial Fock number.
inline LadderPhases mismatch_phases_reduced(const ReducedConfig& config, int m_min) {
    config.validate();
    return reduced_phases(config.sigma, config.matched_order, config.one_photon_mismatch_phase, m_min,
                          config.initial_cavity_fock);
}

inline LadderPhases mismatch_phases_reduced(const ReducedConfig& config) {
    return mismatch_phases_reduced(config, -config.truncation_n_max);
}

}  // namespace recoil
