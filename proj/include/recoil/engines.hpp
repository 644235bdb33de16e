#pragma once

// Evolution of the ladder amplitudes over the dimensionless interaction
// coordinate s in [0, 1] (s = z / L). Phases enter as phi_m L * s and the
// coupling as g_Qu ds, so results depend only on (phi L, g_Qu).

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "recoil/errors.hpp"
#include "recoil/expm.hpp"
#include "recoil/ladder.hpp"
#include "recoil/wavefunction.hpp"

namespace recoil {

enum class Engine { Exact, Numeric, Sinc };

inline const char* to_string(Engine e) {
    switch (e) {
        case Engine::Exact: return "exact";
        case Engine::Numeric: return "ode";
        case Engine::Sinc: return "sinc";
    }
    return "?";
}

inline Engine parse_engine(const std::string& name) {
    if (name == "exact") return Engine::Exact;
    if (name == "ode" || name == "numeric") return Engine::Numeric;
    if (name == "sinc") return Engine::Sinc;
    throw ConfigError("unknown engine '" + name + "' (expected exact, ode or sinc)");
}

struct EvolveOptions {
    // Population allowed on a truncation boundary level before the result is
    // rejected. +inf disables the check.
    double boundary_threshold = 1e-8;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double s_begin = 0.0;
    double s_end = 1.0;
};

namespace detail {

// Photon factor of the bond between levels m and m+1.
inline double bond_weight(const WaveFunction& state, int m) {
    if (!state.quantized()) return 1.0;
    return std::sqrt(static_cast<double>(*state.initial_fock() - m));
}

inline void check_compatible(const LadderPhases& phases, const WaveFunction& init) {
    if (!init.matches(phases)) throw ShapeError("initial state and ladder phases cover different levels");
    if (init.quantized() && *init.initial_fock() != phases.m_max())
        throw ShapeError("ladder top must equal the initial Fock number");
}

// Population sitting on levels that exist only because of truncation.
inline double boundary_population(std::span<const complex> amps, bool quantized) {
    double p = std::norm(amps.front());
    if (!quantized) p = std::max(p, std::norm(amps.back()));
    return p;
}

inline void check_boundary(std::span<const complex> amps, bool quantized, double threshold) {
    const double p = boundary_population(amps, quantized);
    if (p > threshold) {
        std::ostringstream msg;
        msg << "population " << p << " reached the truncation boundary (threshold " << threshold
            << "); increase n_max";
        throw TruncationOverflow(msg.str(), p);
    }
}

inline WaveFunction finish(const WaveFunction& init, std::vector<complex> amps) {
    return WaveFunction(init.m_min(), std::move(amps), init.initial_fock());
}

}  // namespace detail

/// Autonomized generator S L: diagonal i phi_m L, off-diagonal +-g w.
inline TridiagonalGenerator autonomized_generator(const LadderPhases& phases, complex g,
                                                  const WaveFunction& init) {
    TridiagonalGenerator gen;
    gen.diagonal = phases.phiL();
    gen.lower.resize(phases.size() - 1);
    for (int m = phases.m_min(); m < phases.m_max(); ++m)
        gen.lower[static_cast<std::size_t>(m - phases.m_min())] = g * detail::bond_weight(init, m);
    return gen;
}

/// First-order Magnus generator: integral of A(s) over [0, 1].
inline TridiagonalGenerator magnus_generator(const LadderPhases& phases, complex g,
                                             const WaveFunction& init) {
    TridiagonalGenerator gen;
    gen.diagonal.assign(phases.size(), 0.0);
    gen.lower.resize(phases.size() - 1);
    for (int m = phases.m_min(); m < phases.m_max(); ++m) {
        const double half = 0.5 * phases.delta(m);
        const double sinc = half == 0.0 ? 1.0 : std::sin(half) / half;
        gen.lower[static_cast<std::size_t>(m - phases.m_min())] =
            g * detail::bond_weight(init, m) * sinc * std::polar(1.0, -half);
    }
    return gen;
}

/// Exact solution through autonomization: f(1) = exp(S L) f(0),
/// C_m = f_m exp(-i phi_m L).
inline WaveFunction evolve_exact(const LadderPhases& phases, complex g, const WaveFunction& init,
                                 const EvolveOptions& options = {}) {
    detail::check_compatible(phases, init);
    const Eigen::Map<const Eigen::VectorXcd> c0(init.amplitudes().data(),
                                                static_cast<Eigen::Index>(init.size()));
    const Eigen::VectorXcd f = expm_structured_apply(autonomized_generator(phases, g, init), 1.0, c0);
    std::vector<complex> amps(init.size());
    for (std::size_t i = 0; i < amps.size(); ++i)
        amps[i] = f(static_cast<Eigen::Index>(i)) * std::polar(1.0, -phases.phiL()[i]);
    detail::check_boundary(amps, init.quantized(), options.boundary_threshold);
    return detail::finish(init, std::move(amps));
}

/// Sinc (first-order Magnus) model.
inline WaveFunction evolve_sinc(const LadderPhases& phases, complex g, const WaveFunction& init,
                                const EvolveOptions& options = {}) {
    detail::check_compatible(phases, init);
    const Eigen::Map<const Eigen::VectorXcd> c0(init.amplitudes().data(),
                                                static_cast<Eigen::Index>(init.size()));
    const Eigen::VectorXcd c = expm_structured_apply(magnus_generator(phases, g, init), 1.0, c0);
    std::vector<complex> amps(c.data(), c.data() + c.size());
    detail::check_boundary(amps, init.quantized(), options.boundary_threshold);
    return detail::finish(init, std::move(amps));
}

struct NumericTrajectory {
    std::vector<double> s;
    std::vector<std::vector<complex>> amplitudes;
    std::size_t steps = 0;
};

/// Adaptive Dormand-Prince integration of the non-autonomous coefficient ODE
/// dC/ds = A(s) C. No renormalization: norm_drift reports the integrator error.
inline WaveFunction evolve_numeric(const LadderPhases& phases, complex g, const WaveFunction& init,
                                   const EvolveOptions& options = {},
                                   NumericTrajectory* trajectory = nullptr) {
    namespace odeint = boost::numeric::odeint;
    using State = std::vector<complex>;
    detail::check_compatible(phases, init);

    const std::size_t n = init.size();
    std::vector<complex> up(n > 0 ? n - 1 : 0);    // coefficient of C_{m+1} in dC_m
    std::vector<complex> down(n > 0 ? n - 1 : 0);  // coefficient of C_m in dC_{m+1}
    const std::vector<double>& delta = phases.delta_kL();
    for (int m = phases.m_min(); m < phases.m_max(); ++m) {
        const auto k = static_cast<std::size_t>(m - phases.m_min());
        const double w = detail::bond_weight(init, m);
        down[k] = g * w;
        up[k] = -std::conj(g) * w;
    }

    std::vector<complex> rot(n > 0 ? n - 1 : 0);
    auto rhs = [&](const State& c, State& dc, double s) {
        for (std::size_t k = 0; k + 1 < n; ++k) rot[k] = std::polar(1.0, delta[k] * s);
        for (std::size_t i = 0; i < n; ++i) {
            complex v{};
            // dC_m = g w_{m-1} e^{-i D_{m-1} s} C_{m-1} - g* w_m e^{i D_m s} C_{m+1}
            if (i > 0) v += down[i - 1] * std::conj(rot[i - 1]) * c[i - 1];
            if (i + 1 < n) v += up[i] * rot[i] * c[i + 1];
            dc[i] = v;
        }
    };

    State c(init.amplitudes().begin(), init.amplitudes().end());
    const bool quantized = init.quantized();
    std::size_t steps = 0;
    auto observer = [&](const State& x, double s) {
        ++steps;
        detail::check_boundary(x, quantized, options.boundary_threshold);
        if (trajectory) {
            trajectory->s.push_back(s);
            trajectory->amplitudes.push_back(x);
        }
    };

    const double span = options.s_end - options.s_begin;
    if (span != 0.0 && g != complex{}) {
        auto stepper = odeint::make_controlled(options.abs_tol, options.rel_tol,
                                               odeint::runge_kutta_dopri5<State>());
        const double dt0 = std::copysign(std::min(1e-3, std::abs(span)), span);
        odeint::integrate_adaptive(stepper, rhs, c, options.s_begin, options.s_end, dt0, observer);
    } else {
        observer(c, options.s_end);
    }
    if (trajectory) trajectory->steps = steps;
    return detail::finish(init, std::move(c));
}

inline WaveFunction evolve(Engine engine, const LadderPhases& phases, complex g, const WaveFunction& init,
                           const EvolveOptions& options = {}) {
    switch (engine) {
        case Engine::Exact: return evolve_exact(phases, g, init, options);
        case Engine::Numeric: return evolve_numeric(phases, g, init, options);
        case Engine::Sinc: return evolve_sinc(phases, g, init, options);
    }
    throw ConfigError("unknown engine");
}

// ---------------------------------------------------------------------------
// Adaptive truncation

using LadderConfig = std::variant<ReducedConfig, PhysicalConfig>;

inline double coupling_of(const LadderConfig& config) {
    return std::visit([](const auto& c) { return c.coupling_g_qu; }, config);
}

inline int truncation_of(const LadderConfig& config) {
    return std::visit([](const auto& c) { return c.truncation_n_max; }, config);
}

inline LadderConfig with_truncation(LadderConfig config, int n_max) {
    std::visit([n_max](auto& c) { c.truncation_n_max = n_max; }, config);
    return config;
}

inline LadderPhases phases_of(const LadderConfig& config) {
    return std::visit(
        [](const auto& c) -> LadderPhases {
            if constexpr (std::is_same_v<std::decay_t<decltype(c)>, ReducedConfig>)
                return mismatch_phases_reduced(c);
            else
                return mismatch_phases_physical(c);
        },
        config);
}

struct TruncatedEvolution {
    WaveFunction state;
    int n_max = 0;
    LadderPhases phases;
};

/// Doubles n_max until the population of the two lowest ladder levels drops
/// below tail_tolerance.
inline TruncatedEvolution adaptive_truncation(const LadderConfig& config, Engine engine,
                                              double tail_tolerance, int hard_cap = 4096,
                                              EvolveOptions options = {}) {
    if (!(tail_tolerance > 0.0)) throw DomainError("tail tolerance must be positive");
    options.boundary_threshold = std::numeric_limits<double>::infinity();
    int n_max = std::max(2, truncation_of(config));
    while (true) {
        const LadderConfig trial = with_truncation(config, n_max);
        LadderPhases phases = phases_of(trial);
        WaveFunction state =
            evolve(engine, phases, coupling_of(trial), WaveFunction::initial(phases), options);
        const auto amps = state.amplitudes();
        const double tail = std::norm(amps[0]) + (amps.size() > 1 ? std::norm(amps[1]) : 0.0);
        if (tail < tail_tolerance) return {std::move(state), n_max, std::move(phases)};
        if (phases.truncated_by_rest_energy())
            throw ConvergenceError("ladder reached the electron rest energy before the tail converged");
        if (n_max * 2 > hard_cap) {
            std::ostringstream msg;
            msg << "truncation did not converge below n_max = " << hard_cap << " (tail " << tail << ")";
            throw ConvergenceError(msg.str());
        }
        n_max *= 2;
    }
}

}  // namespace recoil
