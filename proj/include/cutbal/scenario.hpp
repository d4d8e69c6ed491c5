#pragma once

// Scenario = everything needed to reproduce one run: dimension, mode,
// horizon, initial state, schedule, integrator settings, sampling stride and
// seed. Configs are JSON with a fixed key set; unknown keys are rejected so
// typos fail loudly instead of silently using defaults.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cutbal/errors.hpp"
#include "cutbal/matrix.hpp"
#include "cutbal/schedule.hpp"

namespace cutbal {

using json = nlohmann::json;

enum class IntegratorMethod { Rk4, Euler };

struct IntegratorSettings {
    IntegratorMethod method = IntegratorMethod::Rk4;
    double h = 1e-3;
    double tol = 1e-6;
    // Bisect steps that cross endogenous switching surfaces down to 1e-10.
    bool event_refine = true;
    // Additionally treat value-order crossings as events; needed by the
    // sorted-evolution residual machinery, off by default elsewhere.
    bool refine_order_events = false;
};

struct SamplingSettings {
    int stride = 1;
};

struct Scenario {
    int n = 0;
    TimeMode mode = TimeMode::Continuous;
    double horizon = 0.0;
    StateVector x0;
    CoefficientSchedule schedule;
    IntegratorSettings integrator;
    SamplingSettings sampling;
    std::uint64_t seed = 0;
};

namespace detail {

inline void require_keys(const json& obj, const std::string& where,
                         std::initializer_list<const char*> required,
                         std::initializer_list<const char*> optional = {}) {
    if (!obj.is_object()) throw SchemaError(where + ": expected an object");
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : required)
            if (item.key() == k) known = true;
        for (const char* k : optional)
            if (item.key() == k) known = true;
        if (!known) throw SchemaError(where + ": unknown key \"" + item.key() + "\"");
    }
    for (const char* k : required)
        if (!obj.contains(k)) throw SchemaError(where + ": missing key \"" + k + "\"");
}

inline double get_number(const json& obj, const char* key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_number()) throw SchemaError(where + ": \"" + key + "\" must be a number");
    return v.get<double>();
}

inline int get_int(const json& obj, const char* key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) throw SchemaError(where + ": \"" + key + "\" must be an integer");
    return v.get<int>();
}

inline std::string get_string(const json& obj, const char* key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_string()) throw SchemaError(where + ": \"" + key + "\" must be a string");
    return v.get<std::string>();
}

inline CoefficientMatrix parse_matrix(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw SchemaError(where + ": expected a non-empty array of rows");
    const int n = static_cast<int>(v.size());
    CoefficientMatrix a(n);
    for (int i = 0; i < n; ++i) {
        const auto& row = v.at(i);
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw SchemaError(where + ": row " + std::to_string(i + 1) + " must have " +
                              std::to_string(n) + " entries");
        for (int j = 0; j < n; ++j) {
            if (!row.at(j).is_number())
                throw SchemaError(where + ": entries must be numbers");
            a(i, j) = row.at(j).get<double>();
        }
    }
    return a;
}

inline json matrix_to_json(const CoefficientMatrix& a) {
    json rows = json::array();
    for (int i = 0; i < a.n(); ++i) {
        json row = json::array();
        for (int j = 0; j < a.n(); ++j) row.push_back(a(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline CoefficientSchedule parse_schedule(const json& v, std::uint64_t seed, int n) {
    const std::string where = "schedule";
    if (!v.is_object()) throw SchemaError(where + ": expected an object");
    const std::string kind = get_string(v, "kind", where);

    if (kind == "piecewise-constant") {
        require_keys(v, where, {"kind", "pieces"});
        const auto& pieces = v.at("pieces");
        if (!pieces.is_array()) throw SchemaError(where + ": \"pieces\" must be an array");
        std::vector<SchedulePiece> out;
        for (std::size_t k = 0; k < pieces.size(); ++k) {
            const std::string pw = where + ".pieces[" + std::to_string(k) + "]";
            require_keys(pieces.at(k), pw, {"t0", "t1", "matrix"});
            SchedulePiece p;
            p.t0 = get_number(pieces.at(k), "t0", pw);
            p.t1 = get_number(pieces.at(k), "t1", pw);
            p.a = parse_matrix(pieces.at(k).at("matrix"), pw + ".matrix");
            out.push_back(std::move(p));
        }
        return CoefficientSchedule::piecewise_constant(std::move(out));
    }

    if (kind == "closed-form") {
        const std::string id = get_string(v, "id", where);
        if (id == "example1") {
            require_keys(v, where, {"kind", "id"});
            return CoefficientSchedule::example1();
        }
        if (id == "capacitor-network") {
            require_keys(v, where, {"kind", "id", "capacitances"}, {"resistances"});
            const auto& caps = v.at("capacitances");
            if (!caps.is_array()) throw SchemaError(where + ": \"capacitances\" must be an array");
            std::vector<double> c;
            for (const auto& e : caps) {
                if (!e.is_number()) throw SchemaError(where + ": capacitances must be numbers");
                c.push_back(e.get<double>());
            }
            CoefficientMatrix r;
            if (v.contains("resistances")) r = parse_matrix(v.at("resistances"), where + ".resistances");
            return CoefficientSchedule::capacitor_network(std::move(c), std::move(r));
        }
        if (id == "t-quarter") {
            require_keys(v, where, {"kind", "id", "m", "budget"}, {"intra"});
            const int m = get_int(v, "m", where);
            const double budget = get_number(v, "budget", where);
            const double intra = v.contains("intra") ? get_number(v, "intra", where) : 1.0;
            return CoefficientSchedule::t_quarter(m, budget, intra);
        }
        if (id == "constant") {
            require_keys(v, where, {"kind", "id", "matrix"});
            return CoefficientSchedule::constant(parse_matrix(v.at("matrix"), where + ".matrix"));
        }
        if (id == "decaying-tail") {
            require_keys(v, where, {"kind", "id", "base"}, {"rate"});
            const double rate = v.contains("rate") ? get_number(v, "rate", where) : 1.0;
            return CoefficientSchedule::decaying_tail(parse_matrix(v.at("base"), where + ".base"), rate);
        }
        throw SchemaError(where + ": unknown closed form \"" + id + "\"");
    }

    if (kind == "endogenous") {
        const std::string rule = get_string(v, "rule", where);
        if (rule == "bounded-confidence" || rule == "normalized-bounded-confidence") {
            require_keys(v, where, {"kind", "rule", "radius"});
            const double r = get_number(v, "radius", where);
            return rule == "bounded-confidence"
                       ? CoefficientSchedule::bounded_confidence(n, r)
                       : CoefficientSchedule::normalized_bounded_confidence(n, r);
        }
        if (rule == "kernel") {
            require_keys(v, where, {"kind", "rule", "kernel", "radius"}, {"sigma"});
            const std::string kid = get_string(v, "kernel", where);
            const double r = get_number(v, "radius", where);
            const double sigma = v.contains("sigma") ? get_number(v, "sigma", where) : 1.0;
            if (kid == "radially-decreasing-threshold")
                return CoefficientSchedule::kernel(n, KernelId::RadiallyDecreasingThreshold, r, sigma);
            if (kid == "gaussian-truncated")
                return CoefficientSchedule::kernel(n, KernelId::GaussianTruncated, r, sigma);
            throw SchemaError(where + ": unknown kernel \"" + kid + "\"");
        }
        if (rule == "example2") {
            require_keys(v, where, {"kind", "rule"});
            return CoefficientSchedule::example2();
        }
        throw SchemaError(where + ": unknown endogenous rule \"" + rule + "\"");
    }

    if (kind == "random-markov") {
        require_keys(v, where, {"kind", "states", "transition", "dwell"}, {"initial_state"});
        const auto& states = v.at("states");
        if (!states.is_array() || states.empty())
            throw SchemaError(where + ": \"states\" must be a non-empty array of matrices");
        std::vector<CoefficientMatrix> mats;
        for (std::size_t k = 0; k < states.size(); ++k)
            mats.push_back(parse_matrix(states.at(k), where + ".states[" + std::to_string(k) + "]"));
        CoefficientMatrix trans = parse_matrix(v.at("transition"), where + ".transition");
        const double dwell = get_number(v, "dwell", where);
        const int init = v.contains("initial_state") ? get_int(v, "initial_state", where) : 0;
        return CoefficientSchedule::random_markov(std::move(mats), std::move(trans), dwell, seed, init);
    }

    throw SchemaError(where + ": unknown kind \"" + kind + "\"");
}

inline json schedule_to_json(const CoefficientSchedule& s) {
    json v;
    switch (s.kind()) {
        case ScheduleKind::PiecewiseConstant: {
            v["kind"] = "piecewise-constant";
            json pieces = json::array();
            for (const auto& p : s.pieces()) {
                json pv;
                pv["t0"] = p.t0;
                pv["t1"] = p.t1;
                pv["matrix"] = matrix_to_json(p.a);
                pieces.push_back(std::move(pv));
            }
            v["pieces"] = std::move(pieces);
            break;
        }
        case ScheduleKind::ClosedForm:
            v["kind"] = "closed-form";
            switch (s.closed_form_id()) {
                case ClosedFormId::Example1:
                    v["id"] = "example1";
                    break;
                case ClosedFormId::CapacitorNetwork:
                    v["id"] = "capacitor-network";
                    v["capacitances"] = s.capacitances();
                    v["resistances"] = matrix_to_json(s.resistances());
                    break;
                case ClosedFormId::TQuarter:
                    v["id"] = "t-quarter";
                    v["m"] = s.t_quarter_m();
                    v["budget"] = s.t_quarter_budget();
                    v["intra"] = s.t_quarter_intra();
                    break;
                case ClosedFormId::Constant:
                    v["id"] = "constant";
                    v["matrix"] = matrix_to_json(s.constant_matrix());
                    break;
                case ClosedFormId::DecayingTail:
                    v["id"] = "decaying-tail";
                    v["base"] = matrix_to_json(s.constant_matrix());
                    v["rate"] = s.decay_rate();
                    break;
            }
            break;
        case ScheduleKind::Endogenous:
            v["kind"] = "endogenous";
            switch (s.endogenous_id()) {
                case EndogenousId::BoundedConfidence:
                    v["rule"] = "bounded-confidence";
                    v["radius"] = s.radius();
                    break;
                case EndogenousId::NormalizedBoundedConfidence:
                    v["rule"] = "normalized-bounded-confidence";
                    v["radius"] = s.radius();
                    break;
                case EndogenousId::Kernel:
                    v["rule"] = "kernel";
                    v["kernel"] = s.kernel_id() == KernelId::RadiallyDecreasingThreshold
                                      ? "radially-decreasing-threshold"
                                      : "gaussian-truncated";
                    v["radius"] = s.radius();
                    v["sigma"] = s.sigma();
                    break;
                case EndogenousId::Example2:
                    v["rule"] = "example2";
                    break;
            }
            break;
        case ScheduleKind::RandomMarkov: {
            v["kind"] = "random-markov";
            json mats = json::array();
            for (const auto& m : s.markov_states()) mats.push_back(matrix_to_json(m));
            v["states"] = std::move(mats);
            v["transition"] = matrix_to_json(s.markov_transition());
            v["dwell"] = s.markov_dwell();
            v["initial_state"] = s.markov_initial_state();
            break;
        }
    }
    return v;
}

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = kFnvOffset;
    for (unsigned char c : s) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

}  // namespace detail

inline Scenario scenario_from_json(const json& v) {
    const std::string where = "config";
    detail::require_keys(v, where,
                         {"version", "mode", "n", "horizon", "x0", "schedule", "integrator",
                          "sampling", "seed"});
    if (detail::get_string(v, "version", where) != "1")
        throw SchemaError(where + ": unsupported version (expected \"1\")");

    Scenario sc;
    const std::string mode = detail::get_string(v, "mode", where);
    if (mode == "continuous") sc.mode = TimeMode::Continuous;
    else if (mode == "discrete") sc.mode = TimeMode::Discrete;
    else throw SchemaError(where + ": mode must be \"continuous\" or \"discrete\"");

    sc.n = detail::get_int(v, "n", where);
    if (sc.n < 1) throw SchemaError(where + ": n must be >= 1");
    sc.horizon = detail::get_number(v, "horizon", where);
    if (!(sc.horizon > 0.0)) throw SchemaError(where + ": horizon must be positive");
    if (sc.mode == TimeMode::Discrete &&
        (sc.horizon != std::floor(sc.horizon) || sc.horizon < 1.0))
        throw SchemaError(where + ": discrete-mode horizon must be a positive integer step count");

    const auto& x0 = v.at("x0");
    if (!x0.is_array() || static_cast<int>(x0.size()) != sc.n)
        throw SchemaError(where + ": x0 must be an array of length n");
    for (const auto& e : x0) {
        if (!e.is_number()) throw SchemaError(where + ": x0 entries must be numbers");
        sc.x0.push_back(e.get<double>());
    }
    validate_state(sc.x0, where + ".x0");

    const auto& seed = v.at("seed");
    if (!seed.is_number_unsigned() && !seed.is_number_integer())
        throw SchemaError(where + ": seed must be a nonnegative integer");
    if (seed.is_number_integer() && seed.get<std::int64_t>() < 0)
        throw SchemaError(where + ": seed must be a nonnegative integer");
    sc.seed = seed.get<std::uint64_t>();

    const auto& integ = v.at("integrator");
    detail::require_keys(integ, where + ".integrator", {"method", "h", "tol"},
                         {"event_refine", "refine_order_events"});
    const std::string method = detail::get_string(integ, "method", where + ".integrator");
    if (method == "rk4") sc.integrator.method = IntegratorMethod::Rk4;
    else if (method == "euler") sc.integrator.method = IntegratorMethod::Euler;
    else throw SchemaError(where + ": integrator method must be \"rk4\" or \"euler\"");
    sc.integrator.h = detail::get_number(integ, "h", where + ".integrator");
    if (!(sc.integrator.h > 0.0)) throw SchemaError(where + ": integrator h must be positive");
    sc.integrator.tol = detail::get_number(integ, "tol", where + ".integrator");
    if (!(sc.integrator.tol > 0.0)) throw SchemaError(where + ": integrator tol must be positive");
    if (integ.contains("event_refine")) {
        if (!integ.at("event_refine").is_boolean())
            throw SchemaError(where + ": event_refine must be a boolean");
        sc.integrator.event_refine = integ.at("event_refine").get<bool>();
    }
    if (integ.contains("refine_order_events")) {
        if (!integ.at("refine_order_events").is_boolean())
            throw SchemaError(where + ": refine_order_events must be a boolean");
        sc.integrator.refine_order_events = integ.at("refine_order_events").get<bool>();
    }

    const auto& sampling = v.at("sampling");
    detail::require_keys(sampling, where + ".sampling", {"stride"});
    sc.sampling.stride = detail::get_int(sampling, "stride", where + ".sampling");
    if (sc.sampling.stride < 1) throw SchemaError(where + ": sampling stride must be >= 1");

    sc.schedule = detail::parse_schedule(v.at("schedule"), sc.seed, sc.n);
    sc.schedule.finalize(sc.n, sc.horizon, sc.mode);
    return sc;
}

inline Scenario load_scenario(const std::string& text) {
    json v;
    try {
        v = json::parse(text);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("config: invalid JSON: ") + e.what());
    }
    return scenario_from_json(v);
}

inline json scenario_to_json(const Scenario& sc) {
    json v;
    v["version"] = "1";
    v["mode"] = sc.mode == TimeMode::Continuous ? "continuous" : "discrete";
    v["n"] = sc.n;
    v["horizon"] = sc.horizon;
    v["x0"] = sc.x0;
    v["schedule"] = detail::schedule_to_json(sc.schedule);
    v["integrator"]["method"] = sc.integrator.method == IntegratorMethod::Rk4 ? "rk4" : "euler";
    v["integrator"]["h"] = sc.integrator.h;
    v["integrator"]["tol"] = sc.integrator.tol;
    v["integrator"]["event_refine"] = sc.integrator.event_refine;
    v["integrator"]["refine_order_events"] = sc.integrator.refine_order_events;
    v["sampling"]["stride"] = sc.sampling.stride;
    v["seed"] = sc.seed;
    return v;
}

inline std::string save_scenario(const Scenario& sc) { return scenario_to_json(sc).dump(2); }

// Stable identifier for a config + seed; goes into reports so outputs are
// traceable to the exact inputs that produced them.
inline std::string scenario_fingerprint(const Scenario& sc) {
    const std::uint64_t h = detail::fnv1a64(save_scenario(sc));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace cutbal
