#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "recoil/errors.hpp"
#include "recoil/ladder.hpp"

namespace recoil {

using complex = std::complex<double>;

/// Amplitudes C_m over ladder levels m in [m_min, m_max], stored in
/// ascending m. For a quantized cavity prepared in Fock state n0 level m
/// carries n0 - m photons; a classical-field (PINEM) ladder has no photon
/// label.
class WaveFunction {
public:
    WaveFunction() = default;

    WaveFunction(int m_min, std::vector<complex> amplitudes, std::optional<int> initial_fock)
        : m_min_(m_min), amplitudes_(std::move(amplitudes)), initial_fock_(initial_fock) {
        if (amplitudes_.empty()) throw ShapeError("empty wavefunction");
        if (initial_fock_ && m_max() > *initial_fock_)
            throw ShapeError("level with negative photon occupation");
        norm_drift_ = std::abs(1.0 - norm_squared());
    }

    /// Electron at Omega_0 (m = 0) with the cavity in Fock state m_max.
    static WaveFunction initial(const LadderPhases& phases) {
        return basis(phases, 0, phases.m_max());
    }

    /// Same but for a classical drive: no photon bookkeeping.
    static WaveFunction initial_classical(const LadderPhases& phases) {
        std::vector<complex> amps(phases.size(), complex{});
        amps[phases.index(0)] = 1.0;
        return WaveFunction(phases.m_min(), std::move(amps), std::nullopt);
    }

    static WaveFunction basis(const LadderPhases& phases, int m, int initial_fock) {
        std::vector<complex> amps(phases.size(), complex{});
        amps[phases.index(m)] = 1.0;
        return WaveFunction(phases.m_min(), std::move(amps), initial_fock);
    }

    int m_min() const { return m_min_; }
    int m_max() const { return m_min_ + static_cast<int>(amplitudes_.size()) - 1; }
    std::size_t size() const { return amplitudes_.size(); }
    std::optional<int> initial_fock() const { return initial_fock_; }
    bool quantized() const { return initial_fock_.has_value(); }

    std::span<const complex> amplitudes() const { return amplitudes_; }
    complex amplitude(int m) const { return amplitudes_.at(index(m)); }
    double probability(int m) const { return std::norm(amplitude(m)); }

    /// Photon occupation of level m (quantized ladders only).
    int photon_number(int m) const {
        if (!initial_fock_) throw ShapeError("classical ladder has no photon label");
        return *initial_fock_ - m;
    }

    double norm_squared() const {
        double s = 0.0;
        for (const auto& a : amplitudes_) s += std::norm(a);
        return s;
    }
    double norm_drift() const { return norm_drift_; }

    std::size_t index(int m) const {
        if (m < m_min_ || m > m_max()) throw ShapeError("level outside wavefunction range");
        return static_cast<std::size_t>(m - m_min_);
    }

    bool matches(const LadderPhases& phases) const {
        return phases.m_min() == m_min_ && phases.m_max() == m_max();
    }

private:
    int m_min_ = 0;
    std::vector<complex> amplitudes_;
    std::optional<int> initial_fock_;
    double norm_drift_ = 0.0;
};

}  // namespace recoil
