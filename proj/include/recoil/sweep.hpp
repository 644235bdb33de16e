#pragma once

// One- and two-dimensional parameter sweeps over single-mode ladder
// configurations. Cells are independent; each writes only its own slot.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "recoil/engines.hpp"
#include "recoil/errors.hpp"
#include "recoil/ladder.hpp"
#include "recoil/observables.hpp"
#include "recoil/parallel.hpp"

namespace recoil {

enum class AxisScale { Linear, Log };

struct SweepAxis {
    std::string parameter;
    double min = 0.0;
    double max = 0.0;
    int count = 2;
    AxisScale scale = AxisScale::Linear;

    std::vector<double> grid() const {
        std::vector<double> out(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            const double t = static_cast<double>(i) / (count - 1);
            out[static_cast<std::size_t>(i)] =
                scale == AxisScale::Linear ? min + t * (max - min)
                                           : std::exp(std::log(min) + t * (std::log(max) - std::log(min)));
        }
        out.front() = min;
        out.back() = max;
        return out;
    }
};

enum class SweepObservable { G2, MeanPhotons, Spectrum, Fidelity, ZeroLossTrace };

struct ObservableSelector {
    SweepObservable kind = SweepObservable::G2;
    ReferenceKind reference = ReferenceKind::Bell;  // Fidelity only

    std::string name() const {
        switch (kind) {
            case SweepObservable::G2: return "g2";
            case SweepObservable::MeanPhotons: return "mean_photons";
            case SweepObservable::Spectrum: return "spectrum";
            case SweepObservable::ZeroLossTrace: return "P0_trace";
            case SweepObservable::Fidelity: return std::string("fidelity:") + to_string(reference);
        }
        return "?";
    }
};

inline ObservableSelector parse_observable(const std::string& name) {
    if (name == "g2") return {SweepObservable::G2};
    if (name == "mean_photons") return {SweepObservable::MeanPhotons};
    if (name == "spectrum") return {SweepObservable::Spectrum};
    if (name == "P0_trace") return {SweepObservable::ZeroLossTrace};
    const std::string prefix = "fidelity:";
    if (name.rfind(prefix, 0) == 0) {
        const std::string k = name.substr(prefix.size());
        for (ReferenceKind r : {ReferenceKind::Bell, ReferenceKind::NOON2, ReferenceKind::SqueezedVacuum,
                                ReferenceKind::WeakCoherent})
            if (k == to_string(r)) return {SweepObservable::Fidelity, r};
        throw ConfigError("unsupported single-mode fidelity reference '" + k +
                          "' (expected bell, noon, squeezed_vacuum or weak_coherent)");
    }
    throw ConfigError("unknown observable '" + name + "'");
}

/// Parameters an axis may drive. Reduced: sigma, g, p, g_eff. Physical:
/// ekin_kev, eph_ev, wavelength_nm, length_um, g, grating.
inline const std::vector<std::string>& sweep_parameters(const LadderConfig& base) {
    static const std::vector<std::string> reduced{"sigma", "g", "p", "g_eff"};
    static const std::vector<std::string> physical{"ekin_kev", "eph_ev", "wavelength_nm", "length_um", "g",
                                                   "grating"};
    return std::holds_alternative<ReducedConfig>(base) ? reduced : physical;
}

struct SweepSpec {
    std::vector<SweepAxis> axes;
    LadderConfig base = ReducedConfig{};
    Engine engine = Engine::Exact;
    ObservableSelector observable;
    // Adaptive mode grows n_max per cell until the two lowest levels hold
    // less than tail_tolerance; otherwise n_max is fixed and an overflow
    // marks the cell as failed.
    bool adaptive = false;
    double tail_tolerance = 1e-10;
    EvolveOptions options;

    void validate() const {
        if (axes.empty() || axes.size() > 2) throw ConfigError("a sweep needs one or two axes");
        const auto& allowed = sweep_parameters(base);
        for (const auto& a : axes) {
            if (std::find(allowed.begin(), allowed.end(), a.parameter) == allowed.end())
                throw ConfigError("parameter '" + a.parameter + "' cannot be swept for this config mode");
            if (a.count < 2) throw ConfigError("axis '" + a.parameter + "' needs at least 2 points");
            if (!std::isfinite(a.min) || !std::isfinite(a.max))
                throw ConfigError("axis '" + a.parameter + "' bounds must be finite");
            if (a.scale == AxisScale::Log && !(a.min > 0.0 && a.max > 0.0))
                throw ConfigError("log axis '" + a.parameter + "' needs positive bounds");
        }
        if (axes.size() == 2 && axes[0].parameter == axes[1].parameter)
            throw ConfigError("axes must sweep distinct parameters");
        if (!(tail_tolerance > 0.0)) throw ConfigError("tail tolerance must be positive");
    }
};

/// One evaluated cell: a scalar, a spectrum row, or the kind of the failure.
struct SweepCell {
    std::optional<double> value;
    std::vector<double> row;  // spectrum sweeps: P_m for m = row_m_min ...
    int row_m_min = 0;
    std::string error;  // Error::kind(), or "undefined" for g2 at zero mean

    bool ok() const { return error.empty(); }
};

struct SweepMetadata {
    std::string engine;
    std::string observable;
    double rel_tol = 0.0;
    double abs_tol = 0.0;
    double boundary_threshold = 0.0;
    bool adaptive = false;
    std::string version;
    std::string timestamp;  // UTC, ISO 8601
    int workers = 1;
};

struct SweepResult {
    std::vector<SweepAxis> axes;
    std::vector<std::vector<double>> grids;
    std::vector<SweepCell> cells;  // row-major, axis 0 slowest
    SweepMetadata metadata;

    std::size_t cell_index(std::size_t i, std::size_t j = 0) const {
        return grids.size() == 1 ? i : i * grids[1].size() + j;
    }
    const SweepCell& at(std::size_t i, std::size_t j = 0) const { return cells.at(cell_index(i, j)); }
};

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

#ifndef RECOIL_VERSION
#define RECOIL_VERSION "dev"
#endif

namespace detail {

inline void set_parameter(LadderConfig& config, const std::string& name, double v) {
    if (auto* r = std::get_if<ReducedConfig>(&config)) {
        if (name == "sigma") r->sigma = v;
        else if (name == "g") r->coupling_g_qu = v;
        else if (name == "p") r->one_photon_mismatch_phase = v;
        else throw ConfigError("unknown reduced parameter '" + name + "'");
        return;
    }
    auto& p = std::get<PhysicalConfig>(config);
    if (name == "ekin_kev") p.electron_kinetic_kev = v;
    else if (name == "eph_ev") p.photon_energy_ev.at(0) = v;
    else if (name == "wavelength_nm") {
        if (!(v > 0.0)) throw DomainError("wavelength must be positive");
        p.photon_energy_ev.at(0) = constants::hc_ev_nm / v;
    } else if (name == "length_um") p.interaction_length_um = v;
    else if (name == "g") p.coupling_g_qu = v;
    else if (name == "grating") p.grating_wavenumber = v;
    else throw ConfigError("unknown physical parameter '" + name + "'");
}

// g_eff is resolved last so it sees the cell's one-photon mismatch.
inline LadderConfig cell_config(const SweepSpec& spec, const std::vector<double>& values) {
    LadderConfig config = spec.base;
    std::optional<double> g_eff;
    for (std::size_t a = 0; a < spec.axes.size(); ++a) {
        if (spec.axes[a].parameter == "g_eff") g_eff = values[a];
        else set_parameter(config, spec.axes[a].parameter, values[a]);
    }
    if (g_eff) {
        auto& r = std::get<ReducedConfig>(config);
        if (r.one_photon_mismatch_phase == 0.0) throw DomainError("g_eff needs a non-zero one-photon mismatch");
        if (!(*g_eff >= 0.0)) throw DomainError("g_eff must be non-negative");
        r.coupling_g_qu = std::sqrt(*g_eff * std::abs(r.one_photon_mismatch_phase));
    }
    return config;
}

inline SweepCell evaluate_cell(const SweepSpec& spec, const std::vector<double>& values) {
    SweepCell cell;
    try {
        const LadderConfig config = cell_config(spec, values);
        std::visit([](const auto& c) { c.validate(); }, config);
        WaveFunction state;
        if (spec.adaptive) {
            state = adaptive_truncation(config, spec.engine, spec.tail_tolerance, 4096, spec.options).state;
        } else {
            const LadderPhases phases = phases_of(config);
            state = evolve(spec.engine, phases, coupling_of(config), WaveFunction::initial(phases), spec.options);
        }
        switch (spec.observable.kind) {
            case SweepObservable::G2: {
                const auto g2 = photon_statistics(state).g2;
                if (g2) cell.value = *g2;
                else cell.error = "undefined";
                break;
            }
            case SweepObservable::MeanPhotons: cell.value = photon_statistics(state).mean_photons; break;
            case SweepObservable::ZeroLossTrace: cell.value = state.probability(0); break;
            case SweepObservable::Spectrum:
                cell.row_m_min = state.m_min();
                for (const auto& a : state.amplitudes()) cell.row.push_back(std::norm(a));
                break;
            case SweepObservable::Fidelity: cell.value = best_reference_fidelity(state, spec.observable.reference); break;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        cell = SweepCell{};
        cell.error = e.kind();
    }
    return cell;
}

}  // namespace detail

/// Evaluates every cell once. Output is independent of the worker count.
inline SweepResult run_sweep(const SweepSpec& spec, int workers) {
    spec.validate();
    SweepResult out;
    out.axes = spec.axes;
    for (const auto& a : spec.axes) out.grids.push_back(a.grid());
    const std::size_t n0 = out.grids[0].size();
    const std::size_t n1 = out.grids.size() == 2 ? out.grids[1].size() : 1;
    out.cells.resize(n0 * n1);
    parallel_for(out.cells.size(), workers, [&](std::size_t k) {
        std::vector<double> values{out.grids[0][k / n1]};
        if (out.grids.size() == 2) values.push_back(out.grids[1][k % n1]);
        out.cells[k] = detail::evaluate_cell(spec, values);
    });
    out.metadata = {to_string(spec.engine),
                    spec.observable.name(),
                    spec.options.rel_tol,
                    spec.options.abs_tol,
                    spec.options.boundary_threshold,
                    spec.adaptive,
                    RECOIL_VERSION,
                    utc_timestamp(),
                    workers};
    return out;
}

}  // namespace recoil
