#pragma once

// Electron coupled to two cavity modes. Amplitudes live on the occupation
// lattice (n1, n2) in [0, n_max]^2; the electron energy follows from energy
// conservation, so each node carries one electron level.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "recoil/engines.hpp"
#include "recoil/errors.hpp"
#include "recoil/expm.hpp"
#include "recoil/ladder.hpp"
#include "recoil/observables.hpp"
#include "recoil/wavefunction.hpp"

namespace recoil {

using FockPair = std::array<int, 2>;

namespace detail {

inline void check_lattice(int n_max, FockPair initial) {
    if (n_max < 1) throw DomainError("lattice n_max must be positive");
    for (int a : initial)
        if (a < 0 || a >= n_max) throw DomainError("initial occupation must lie inside the lattice interior");
}

}  // namespace detail

/// Node-indexed lattice data shared by phases, states and references:
/// row-major in (n1, n2).
class LatticeShape {
public:
    LatticeShape() = default;
    LatticeShape(int n_max, FockPair initial) : n_max_(n_max), initial_(initial) {
        detail::check_lattice(n_max, initial);
    }

    int n_max() const { return n_max_; }
    FockPair initial_fock() const { return initial_; }
    std::size_t side() const { return static_cast<std::size_t>(n_max_ + 1); }
    std::size_t size() const { return side() * side(); }

    std::size_t index(int n1, int n2) const {
        if (n1 < 0 || n2 < 0 || n1 > n_max_ || n2 > n_max_) throw ShapeError("node outside lattice");
        return static_cast<std::size_t>(n1) * side() + static_cast<std::size_t>(n2);
    }
    FockPair node(std::size_t i) const {
        return {static_cast<int>(i / side()), static_cast<int>(i % side())};
    }
    /// Electron level m of a node: photons gained by the cavity, negated.
    int electron_level(int n1, int n2) const { return initial_[0] + initial_[1] - n1 - n2; }
    bool on_shell(int n1, int n2) const { return n1 == n_max_ || n2 == n_max_; }

    bool operator==(const LatticeShape&) const = default;

private:
    int n_max_ = 1;
    FockPair initial_{0, 0};
};

/// Cumulative mismatch phase phi L of every lattice node, zero at the
/// initial occupation.
class LatticePhases {
public:
    LatticePhases() = default;
    LatticePhases(LatticeShape shape, std::vector<double> phiL, double closure_defect = 0.0)
        : shape_(shape), phi_(std::move(phiL)), closure_defect_(closure_defect) {
        if (phi_.size() != shape_.size()) throw ShapeError("phase count does not match lattice");
        const FockPair a = shape_.initial_fock();
        if (phi(a[0], a[1]) != 0.0) throw DomainError("phase of the initial node must be zero");
    }

    const LatticeShape& shape() const { return shape_; }
    int n_max() const { return shape_.n_max(); }
    double phi(int n1, int n2) const { return phi_[shape_.index(n1, n2)]; }
    const std::vector<double>& phiL() const { return phi_; }
    /// Largest disagreement between two paths to the same node (physical
    /// lattices only; relative to the phase magnitudes involved).
    double closure_defect() const { return closure_defect_; }

    /// Phases along the n2 = initial axis as a single-mode ladder.
    LadderPhases mode_one_ladder() const {
        const FockPair a = shape_.initial_fock();
        std::vector<double> phi;
        for (int n1 = n_max(); n1 >= 0; --n1) phi.push_back(this->phi(n1, a[1]));
        return LadderPhases::from_levels(a[0] - n_max(), std::move(phi));
    }

private:
    LatticeShape shape_;
    std::vector<double> phi_;
    double closure_defect_ = 0.0;
};

/// Reduced lattice law. With d_j = n_j - initial_j photons added to mode j
/// and N = d1 + d2:
///   order 1: phi = -pi N (N - 1) / sigma   (every single-photon step matched)
///   order 2: phi = -pi N (N - 2) / sigma + |d1 - d2| (p - pi / sigma)
/// Order 2 matches the joint pair (one photon per mode); every photon left
/// unpaired costs the one-photon offset, as odd levels do on one mode.
inline LatticePhases reduced_lattice_phases(double sigma, int matched_order, double one_photon_mismatch,
                                            int n_max, FockPair initial = {0, 0}) {
    if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
    if (matched_order != 1 && matched_order != 2) throw DomainError("matched order must be 1 or 2");
    if (!std::isfinite(one_photon_mismatch)) throw DomainError("one-photon mismatch must be finite");
    const LatticeShape shape(n_max, initial);
    const double k = std::isinf(sigma) ? 0.0 : std::numbers::pi / sigma;
    std::vector<double> phi(shape.size());
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const FockPair n = shape.node(i);
        const double d1 = n[0] - initial[0], d2 = n[1] - initial[1];
        const double total = d1 + d2;
        if (matched_order == 1) {
            phi[i] = -k * total * (total - 1.0);
        } else {
            phi[i] = -k * total * (total - 2.0) + std::abs(d1 - d2) * (one_photon_mismatch - k);
        }
        if (phi[i] == 0.0) phi[i] = 0.0;  // no negative zero at the origin
    }
    return {shape, std::move(phi)};
}

/// Physical lattice from the exact dispersion and per-mode photon momenta.
/// Node phases are path sums of step mismatches; the path along mode 1
/// first is stored and the path along mode 2 first is compared against it.
inline LatticePhases physical_lattice_phases(const PhysicalConfig& config, int n_max) {
    config.validate();
    if (config.mode_count() != 2) throw DomainError("two-mode lattice needs two photon energies");
    const FockPair a{config.initial_fock(0), config.initial_fock(1)};
    const LatticeShape shape(n_max, a);
    const std::array<double, 2> ph{config.photon_energy_ev[0] * 1e-3, config.photon_energy_ev[1] * 1e-3};
    const std::array<double, 2> kappa{solve_photon_momentum(config, 0) + config.grating_wavenumber,
                                      solve_photon_momentum(config, 1) + config.grating_wavenumber};
    const double length = config.interaction_length_um;
    const double ekin = config.electron_kinetic_kev;

    auto kinetic = [&](int n1, int n2) { return ekin + (a[0] - n1) * ph[0] + (a[1] - n2) * ph[1]; };
    for (int n1 : {0, n_max})
        for (int n2 : {0, n_max})
            if (!(kinetic(n1, n2) > 0.0))
                throw DomainError("lattice reaches non-positive electron kinetic energy; lower n_max");

    // Phase change for adding one photon to mode j at node (n1, n2), and its
    // magnitude scale for the closure tolerance.
    struct Step {
        double value, scale;
    };
    auto add = [&](int j, int n1, int n2) -> Step {
        const double gap = detail::wavenumber_gap(kinetic(n1, n2), ph[static_cast<std::size_t>(j)]);
        return {-(gap - kappa[static_cast<std::size_t>(j)]) * length,
                (std::abs(gap) + std::abs(kappa[static_cast<std::size_t>(j)])) * length};
    };
    // Walks mode `first` from a to its target, then the other mode.
    auto walk = [&](int first, FockPair target) -> Step {
        Step acc{0.0, 0.0};
        FockPair cur = a;
        for (int j : {first, 1 - first}) {
            auto& c = cur[static_cast<std::size_t>(j)];
            const int t = target[static_cast<std::size_t>(j)];
            while (c < t) {
                const Step s = add(j, cur[0], cur[1]);
                acc.value += s.value;
                acc.scale += s.scale;
                ++c;
            }
            while (c > t) {
                --c;
                const Step s = add(j, cur[0], cur[1]);
                acc.value -= s.value;
                acc.scale += s.scale;
            }
        }
        return acc;
    };

    std::vector<double> phi(shape.size());
    double defect = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const FockPair n = shape.node(i);
        const Step one = walk(0, n), two = walk(1, n);
        phi[i] = one.value;
        if (one.scale > 0.0) defect = std::max(defect, std::abs(one.value - two.value) / one.scale);
    }
    if (defect > 1e-12) {
        std::ostringstream msg;
        msg << "lattice phases are path dependent (relative closure defect " << defect << ")";
        throw NumericError(msg.str());
    }
    return {shape, std::move(phi), defect};
}

// ---------------------------------------------------------------------------
// State

class TwoModeWaveFunction {
public:
    TwoModeWaveFunction() = default;
    TwoModeWaveFunction(LatticeShape shape, std::vector<complex> amplitudes)
        : shape_(shape), amps_(std::move(amplitudes)) {
        if (amps_.size() != shape_.size()) throw ShapeError("amplitude count does not match lattice");
        norm_drift_ = std::abs(1.0 - norm_squared());
    }

    /// Electron at Omega_0 with the modes in the Fock pair `initial`.
    static TwoModeWaveFunction initial(const LatticeShape& shape) {
        std::vector<complex> amps(shape.size(), complex{});
        const FockPair a = shape.initial_fock();
        amps[shape.index(a[0], a[1])] = 1.0;
        return {shape, std::move(amps)};
    }

    const LatticeShape& shape() const { return shape_; }
    int n_max() const { return shape_.n_max(); }
    std::span<const complex> amplitudes() const { return amps_; }
    complex amplitude(int n1, int n2) const { return amps_[shape_.index(n1, n2)]; }
    double probability(int n1, int n2) const { return std::norm(amplitude(n1, n2)); }

    double norm_squared() const {
        double s = 0.0;
        for (const auto& c : amps_) s += std::norm(c);
        return s;
    }
    double norm_drift() const { return norm_drift_; }

    /// Population on the outer shell n1 = n_max or n2 = n_max.
    double shell_population() const {
        double s = 0.0;
        for (int k = 0; k <= n_max(); ++k) {
            s += probability(n_max(), k);
            if (k < n_max()) s += probability(k, n_max());
        }
        return s;
    }

private:
    LatticeShape shape_;
    std::vector<complex> amps_;
    double norm_drift_ = 0.0;
};

/// Dense autonomized generator on the lattice: diagonal i phi L, emission
/// into mode j entering with -g_j^* sqrt(n_j + 1), absorption with
/// +g_j sqrt(n_j + 1).
inline Eigen::MatrixXcd two_mode_generator(const LatticePhases& phases, complex g1, complex g2) {
    const LatticeShape& shape = phases.shape();
    const auto n = static_cast<Eigen::Index>(shape.size());
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, n);
    const std::array<complex, 2> g{g1, g2};
    for (std::size_t i = 0; i < shape.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        s(ii, ii) = complex(0.0, phases.phiL()[i]);
        const FockPair node = shape.node(i);
        for (int j = 0; j < 2; ++j) {
            FockPair up = node;
            if (++up[static_cast<std::size_t>(j)] > shape.n_max()) continue;
            const auto k = static_cast<Eigen::Index>(shape.index(up[0], up[1]));
            const double w = std::sqrt(static_cast<double>(up[static_cast<std::size_t>(j)]));
            s(k, ii) = -std::conj(g[static_cast<std::size_t>(j)]) * w;
            s(ii, k) = g[static_cast<std::size_t>(j)] * w;
        }
    }
    return s;
}

/// Exact two-mode evolution over s in [0, 1]. g2 defaults to g1.
inline TwoModeWaveFunction evolve_two_mode(const LatticePhases& phases, complex g1, std::optional<complex> g2,
                                           const TwoModeWaveFunction& init, const EvolveOptions& options = {}) {
    if (!(init.shape() == phases.shape())) throw ShapeError("initial state and lattice phases differ in shape");
    const Eigen::Map<const Eigen::VectorXcd> c0(init.amplitudes().data(),
                                                static_cast<Eigen::Index>(init.amplitudes().size()));
    const Eigen::VectorXcd f =
        expm_anti_hermitian_apply(two_mode_generator(phases, g1, g2.value_or(g1)), 1.0, c0);
    std::vector<complex> amps(static_cast<std::size_t>(f.size()));
    for (std::size_t i = 0; i < amps.size(); ++i)
        amps[i] = f(static_cast<Eigen::Index>(i)) * std::polar(1.0, -phases.phiL()[i]);
    TwoModeWaveFunction out(init.shape(), std::move(amps));
    const double shell = out.shell_population();
    if (shell > options.boundary_threshold) {
        std::ostringstream msg;
        msg << "population " << shell << " reached the lattice shell (threshold " << options.boundary_threshold
            << "); increase n_max";
        throw TruncationOverflow(msg.str(), shell);
    }
    return out;
}

inline TwoModeWaveFunction evolve_two_mode(const LatticePhases& phases, complex g,
                                           const EvolveOptions& options = {}) {
    return evolve_two_mode(phases, g, std::nullopt, TwoModeWaveFunction::initial(phases.shape()), options);
}

// ---------------------------------------------------------------------------
// Observables

struct TwinStatistics {
    PhotonStatistics mode1, mode2;
    std::vector<double> diagonal;  // P(n, n)
    double diagonal_weight = 0.0;
    std::optional<double> geometric_ratio;  // fitted P(n+1,n+1) / P(n,n)
    int fitted_points = 0;
};

/// Per-mode marginals and the diagonal distribution. The geometric ratio is
/// a least-squares fit of log P(n, n) over the leading run of diagonal
/// entries above `tail_floor` (at least three are needed).
inline TwinStatistics twin_statistics(const TwoModeWaveFunction& state, double tail_floor = 1e-10) {
    const int n_max = state.n_max();
    std::vector<double> p1(static_cast<std::size_t>(n_max + 1), 0.0), p2 = p1;
    TwinStatistics out;
    out.diagonal.assign(p1.size(), 0.0);
    for (int a = 0; a <= n_max; ++a)
        for (int b = 0; b <= n_max; ++b) {
            const double p = state.probability(a, b);
            p1[static_cast<std::size_t>(a)] += p;
            p2[static_cast<std::size_t>(b)] += p;
            if (a == b) out.diagonal[static_cast<std::size_t>(a)] = p;
        }
    out.mode1 = statistics_from_distribution(std::move(p1));
    out.mode2 = statistics_from_distribution(std::move(p2));
    for (double d : out.diagonal) out.diagonal_weight += d;

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (std::size_t n = 0; n < out.diagonal.size() && out.diagonal[n] > tail_floor; ++n) {
        const double x = static_cast<double>(n), y = std::log(out.diagonal[n]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    out.fitted_points = count;
    if (count >= 3) out.geometric_ratio = std::exp((count * sxy - sx * sy) / (count * sxx - sx * sx));
    return out;
}

/// Two-mode reference over the same lattice as a state.
struct TwoModeReference {
    ReferenceKind kind = ReferenceKind::GHZ;
    LatticeShape shape;
    std::vector<complex> amplitudes;
    double squeezing_r = 0.0;
    double phase = 0.0;

    complex amplitude(int n1, int n2) const { return amplitudes[shape.index(n1, n2)]; }
};

/// (|0,0,0> + e^{i phase} |-2,1,1>) / sqrt 2.
inline TwoModeReference ghz_reference(double phase, int n_max) {
    TwoModeReference r{ReferenceKind::GHZ, LatticeShape(n_max, {0, 0}), {}, 0.0, phase};
    r.amplitudes.assign(r.shape.size(), complex{});
    r.amplitudes[r.shape.index(0, 0)] = 1.0 / std::numbers::sqrt2;
    r.amplitudes[r.shape.index(1, 1)] = std::polar(1.0 / std::numbers::sqrt2, phase);
    return r;
}

/// Twin beam sum_n (-e^{i phase} tanh r)^n / cosh r |-2n, n, n>, truncated
/// to the lattice and renormalized.
inline TwoModeReference twin_beam_reference(double r, double phase, int n_max) {
    if (!(r >= 0.0)) throw DomainError("squeezing parameter must be non-negative");
    TwoModeReference out{ReferenceKind::TwinBeam, LatticeShape(n_max, {0, 0}), {}, r, phase};
    out.amplitudes.assign(out.shape.size(), complex{});
    const complex q = -std::polar(std::tanh(r), phase);
    complex term = 1.0 / std::cosh(r);
    double norm = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        out.amplitudes[out.shape.index(n, n)] = term;
        norm += std::norm(term);
        term *= q;
    }
    for (auto& a : out.amplitudes) a /= std::sqrt(norm);
    return out;
}

/// Twin beam whose per-mode mean photon number sinh^2 r equals `mean`.
inline TwoModeReference twin_beam_from_mean(double mean, double phase, int n_max) {
    if (!(mean >= 0.0)) throw DomainError("mean photon number must be non-negative");
    return twin_beam_reference(std::asinh(std::sqrt(mean)), phase, n_max);
}

inline double fidelity(const TwoModeWaveFunction& state, const TwoModeReference& reference) {
    const FockPair a = state.shape().initial_fock();
    if (a[0] != 0 || a[1] != 0) throw ShapeError("reference states are defined for an initially empty cavity");
    complex overlap{};
    for (int n1 = 0; n1 <= reference.shape.n_max(); ++n1)
        for (int n2 = 0; n2 <= reference.shape.n_max(); ++n2) {
            const complex r = reference.amplitude(n1, n2);
            if (r == complex{}) continue;
            if (n1 > state.n_max() || n2 > state.n_max())
                throw ShapeError("reference populates nodes outside the state's lattice");
            overlap += std::conj(r) * state.amplitude(n1, n2);
        }
    return std::norm(overlap);
}

inline PhaseFit best_phase_fidelity(const TwoModeWaveFunction& state,
                                    const std::function<TwoModeReference(double)>& family, double tol = 1e-6) {
    return maximize_over_phase([&](double phase) { return fidelity(state, family(phase)); }, tol);
}

}  // namespace recoil
