#pragma once

// JSON configuration documents. Every document carries a "mode" key
// ("physical", "reduced", "pinem", "two_mode"); unknown or missing keys
// are reported together as one ConfigError.

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "recoil/engines.hpp"
#include "recoil/errors.hpp"
#include "recoil/ladder.hpp"
#include "recoil/multimode.hpp"
#include "recoil/pinem.hpp"
#include "recoil/sweep.hpp"

namespace recoil::config {

using json = nlohmann::json;

namespace detail {

class KeyChecker {
public:
    KeyChecker(const json& doc, std::string where) : doc_(doc), where_(std::move(where)) {
        if (!doc_.is_object()) throw ConfigError(where_ + ": expected a JSON object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return doc_.contains(key);
    }

    template <class T>
    T required(const std::string& key) {
        if (!has(key)) {
            missing_.push_back(key);
            return T{};
        }
        return get<T>(key);
    }

    template <class T>
    T optional(const std::string& key, T fallback) {
        return has(key) ? get<T>(key) : fallback;
    }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return doc_.at(key);
    }

    /// Throws one ConfigError naming every missing, unknown or mistyped key.
    void finish() const {
        std::vector<std::string> unknown;
        for (const auto& [k, v] : doc_.items())
            if (!seen_.count(k)) unknown.push_back(k);
        if (missing_.empty() && unknown.empty() && bad_.empty()) return;
        std::string msg = where_ + ":";
        auto list = [&](const char* label, const std::vector<std::string>& keys) {
            if (keys.empty()) return;
            msg += std::string(" ") + label;
            for (std::size_t i = 0; i < keys.size(); ++i) msg += (i ? ", " : " ") + keys[i];
            msg += ";";
        };
        list("missing keys", missing_);
        list("unknown keys", unknown);
        list("invalid values for", bad_);
        msg.pop_back();
        throw ConfigError(msg);
    }

private:
    template <class T>
    T get(const std::string& key) {
        try {
            return doc_.at(key).get<T>();
        } catch (const json::exception&) {
            bad_.push_back(key);
            return T{};
        }
    }

    const json& doc_;
    std::string where_;
    std::set<std::string> seen_;
    std::vector<std::string> missing_, bad_;
};

inline double sigma_value(const json& v) {
    if (v.is_string() && (v == "inf" || v == "infinity")) return std::numeric_limits<double>::infinity();
    return v.get<double>();
}

inline double read_sigma(KeyChecker& k) {
    if (!k.has("sigma")) return k.required<double>("sigma");
    try {
        return sigma_value(k.raw("sigma"));
    } catch (const json::exception&) {
        throw ConfigError("sigma must be a number or \"inf\"");
    }
}

inline MatchedTransition parse_transition(const std::string& s) {
    if (s == "one_photon") return MatchedTransition::OnePhotonEmission;
    if (s == "two_photon") return MatchedTransition::TwoPhotonEmission;
    if (s == "custom") return MatchedTransition::Custom;
    throw ConfigError("matched_transition must be one_photon, two_photon or custom");
}

}  // namespace detail

inline std::string mode_of(const json& doc) {
    if (!doc.is_object() || !doc.contains("mode") || !doc["mode"].is_string())
        throw ConfigError("config: missing string key mode");
    const std::string mode = doc["mode"];
    if (mode != "physical" && mode != "reduced" && mode != "pinem" && mode != "two_mode")
        throw ConfigError("config: mode must be physical, reduced, pinem or two_mode");
    return mode;
}

inline json parse_document(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

/// Keys shared by the single-mode run documents.
struct RunOptions {
    Engine engine = Engine::Exact;
    std::vector<std::string> fidelities;  // reference names for evolve
    std::vector<double> g_values;         // evolve: optional coupling list
    bool adaptive = false;
    double tail_tolerance = 1e-10;
    double boundary_threshold = 1e-8;
};

inline ReducedConfig read_reduced(detail::KeyChecker& k) {
    ReducedConfig c;
    c.sigma = detail::read_sigma(k);
    c.coupling_g_qu = k.optional<double>("g", 0.0);
    c.matched_order = k.optional<int>("matched_order", 1);
    c.one_photon_mismatch_phase = k.optional<double>("one_photon_mismatch", 0.0);
    c.initial_cavity_fock = k.optional<int>("initial_fock", 0);
    c.truncation_n_max = k.optional<int>("n_max", 16);
    return c;
}

inline PhysicalConfig read_physical(detail::KeyChecker& k) {
    PhysicalConfig c;
    c.electron_kinetic_kev = k.required<double>("ekin_kev");
    if (k.has("eph_ev")) {
        const json& e = k.raw("eph_ev");
        if (e.is_number()) c.photon_energy_ev = {e.get<double>()};
        else if (e.is_array()) c.photon_energy_ev = e.get<std::vector<double>>();
        else throw ConfigError("eph_ev must be a number or a list");
    } else {
        k.required<double>("eph_ev");
    }
    c.interaction_length_um = k.required<double>("length_um");
    c.coupling_g_qu = k.optional<double>("g", 0.0);
    c.matched_transition = detail::parse_transition(k.optional<std::string>("matched_transition", "one_photon"));
    c.custom_photon_momentum = k.optional<std::vector<double>>("photon_momentum", {});
    c.grating_wavenumber = k.optional<double>("grating", 0.0);
    if (k.has("initial_fock")) {
        const json& f = k.raw("initial_fock");
        c.initial_cavity_fock = f.is_array() ? f.get<std::vector<int>>() : std::vector<int>{f.get<int>()};
    }
    c.truncation_n_max = k.optional<int>("n_max", 16);
    return c;
}

inline RunOptions read_run_options(detail::KeyChecker& k) {
    RunOptions o;
    o.engine = parse_engine(k.optional<std::string>("engine", "exact"));
    o.fidelities = k.optional<std::vector<std::string>>("fidelities", {});
    o.g_values = k.optional<std::vector<double>>("g_values", {});
    o.adaptive = k.optional<bool>("adaptive", false);
    o.tail_tolerance = k.optional<double>("tail_tolerance", 1e-10);
    o.boundary_threshold = k.optional<double>("boundary_threshold", 1e-8);
    return o;
}

struct LadderJob {
    LadderConfig config;
    RunOptions options;
};

/// "physical" or "reduced" document for evolve.
inline LadderJob parse_ladder_job(const json& doc) {
    const std::string mode = mode_of(doc);
    if (mode != "physical" && mode != "reduced")
        throw ConfigError("evolve needs a physical or reduced config, got mode " + mode);
    detail::KeyChecker k(doc, "config");
    k.has("mode");
    LadderJob job;
    if (mode == "reduced") job.config = read_reduced(k);
    else job.config = read_physical(k);
    job.options = read_run_options(k);
    k.finish();
    std::visit([](const auto& c) { c.validate(); }, job.config);
    if (const auto* p = std::get_if<PhysicalConfig>(&job.config); p && p->mode_count() != 1)
        throw ConfigError("single-mode runs need exactly one photon energy; use twomode for two modes");
    return job;
}

struct PinemJob {
    PinemScanSpec scan;
    double prominence = 0.2;
    RevivalTrace trace = RevivalTrace::MatchedPair;
};

inline std::vector<double> read_grid(const json& v) {
    if (v.is_array()) return v.get<std::vector<double>>();
    if (v.is_object()) {
        detail::KeyChecker k(v, "g_values");
        const double lo = k.required<double>("min"), hi = k.required<double>("max"),
                     step = k.required<double>("step");
        k.finish();
        return uniform_grid(lo, hi, step);
    }
    if (v.is_number()) return {v.get<double>()};
    throw ConfigError("g_values must be a number, a list or {min, max, step}");
}

inline PinemJob parse_pinem_job(const json& doc) {
    if (mode_of(doc) != "pinem") throw ConfigError("pinem needs a config with mode pinem");
    detail::KeyChecker k(doc, "config");
    k.has("mode");
    PinemJob job;
    job.scan.sigma = detail::read_sigma(k);
    if (k.has("g_values")) {
        try {
            job.scan.g_values = read_grid(k.raw("g_values"));
        } catch (const json::exception&) {
            throw ConfigError("g_values must hold numbers");
        } catch (const DomainError& e) {
            throw ConfigError(std::string("g_values: ") + e.what());
        }
    } else {
        k.required<double>("g_values");
    }
    job.scan.matched_order = k.optional<int>("matched_order", 1);
    job.scan.one_photon_mismatch = k.optional<double>("one_photon_mismatch", 0.0);
    job.scan.boundary_threshold = k.optional<double>("boundary_threshold", 1e-8);
    job.prominence = k.optional<double>("prominence", 0.2);
    const std::string trace = k.optional<std::string>("trace", "matched_pair");
    k.finish();
    if (trace == "matched_pair") job.trace = RevivalTrace::MatchedPair;
    else if (trace == "zero_loss") job.trace = RevivalTrace::ZeroLoss;
    else throw ConfigError("trace must be matched_pair or zero_loss");
    if (job.scan.g_values.empty()) throw ConfigError("g_values is empty");
    if (!(job.scan.sigma > 0.0)) throw DomainError("sigma must be positive");
    if (job.scan.matched_order != 1 && job.scan.matched_order != 2)
        throw DomainError("matched order must be 1 or 2");
    for (double g : job.scan.g_values)
        if (!(g >= 0.0) || !std::isfinite(g)) throw DomainError("couplings must be finite and non-negative");
    return job;
}

struct TwoModeJob {
    LatticePhases phases;
    double g1 = 0.0;
    double g2 = 0.0;
    double boundary_threshold = 1e-8;
    std::vector<std::string> fidelities;  // ghz, twin_beam
};

/// Reduced lattice (sigma, one_photon_mismatch, ...) or physical lattice
/// (ekin_kev with two photon energies). g2 defaults to g.
inline TwoModeJob parse_two_mode_job(const json& doc) {
    if (mode_of(doc) != "two_mode") throw ConfigError("twomode needs a config with mode two_mode");
    detail::KeyChecker k(doc, "config");
    k.has("mode");
    TwoModeJob job;
    const int n_max = k.optional<int>("n_max", 16);
    std::optional<PhysicalConfig> physical;
    double sigma = 0.0, p = 0.0;
    int order = 2;
    if (k.has("ekin_kev")) {
        physical = read_physical(k);
        job.g1 = physical->coupling_g_qu;
    } else {
        sigma = detail::read_sigma(k);
        order = k.optional<int>("matched_order", 2);
        p = k.optional<double>("one_photon_mismatch", 0.0);
        job.g1 = k.optional<double>("g", 0.0);
    }
    job.g2 = k.optional<double>("g2", job.g1);
    job.boundary_threshold = k.optional<double>("boundary_threshold", 1e-8);
    job.fidelities = k.optional<std::vector<std::string>>("fidelities", {});
    k.finish();
    if (!(job.g1 >= 0.0) || !(job.g2 >= 0.0)) throw DomainError("couplings must be non-negative");
    for (const auto& f : job.fidelities)
        if (f != "ghz" && f != "twin_beam") throw ConfigError("two-mode fidelities must be ghz or twin_beam");
    if (physical) {
        physical->truncation_n_max = n_max;
        job.phases = physical_lattice_phases(*physical, n_max);
    } else {
        job.phases = reduced_lattice_phases(sigma, order, p, n_max);
    }
    return job;
}

inline AxisScale parse_scale(const std::string& s) {
    if (s == "linear") return AxisScale::Linear;
    if (s == "log") return AxisScale::Log;
    throw ConfigError("axis scale must be linear or log");
}

/// A physical or reduced document with an extra "sweep" object:
/// {"axes": [{"parameter", "min", "max", "count", "scale"}], "observable"}.
inline SweepSpec parse_sweep_spec(const json& doc) {
    const std::string mode = mode_of(doc);
    if (mode != "physical" && mode != "reduced")
        throw ConfigError("sweep needs a physical or reduced base config, got mode " + mode);
    detail::KeyChecker k(doc, "config");
    k.has("mode");
    SweepSpec spec;
    if (mode == "reduced") spec.base = read_reduced(k);
    else spec.base = read_physical(k);
    const RunOptions o = read_run_options(k);
    spec.engine = o.engine;
    spec.adaptive = o.adaptive;
    spec.tail_tolerance = o.tail_tolerance;
    spec.options.boundary_threshold = o.boundary_threshold;
    if (!k.has("sweep")) {
        k.required<json>("sweep");
        k.finish();
    }
    const json& sw = k.raw("sweep");
    k.finish();
    if (!o.fidelities.empty() || !o.g_values.empty())
        throw ConfigError("config: fidelities and g_values do not apply to sweeps");

    detail::KeyChecker s(sw, "sweep");
    spec.observable = parse_observable(s.optional<std::string>("observable", "g2"));
    if (s.has("axes")) {
        const json& axes = s.raw("axes");
        if (!axes.is_array()) throw ConfigError("sweep: axes must be a list");
        for (std::size_t i = 0; i < axes.size(); ++i) {
            detail::KeyChecker a(axes[i], "sweep.axes[" + std::to_string(i) + "]");
            SweepAxis axis;
            axis.parameter = a.required<std::string>("parameter");
            axis.min = a.required<double>("min");
            axis.max = a.required<double>("max");
            axis.count = a.required<int>("count");
            const std::string scale = a.optional<std::string>("scale", "linear");
            a.finish();
            axis.scale = parse_scale(scale);
            spec.axes.push_back(axis);
        }
    } else {
        s.required<json>("axes");
    }
    s.finish();
    spec.validate();
    return spec;
}

}  // namespace recoil::config
