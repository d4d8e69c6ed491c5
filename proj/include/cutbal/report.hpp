#pragma once

// Run analysis bundled into a machine-readable document plus a short human
// summary. A report ties every verdict to the operation that produced it and
// records the heuristic rules in force, so two runs with the same config and
// seed serialize byte-identically.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cutbal/balance.hpp"
#include "cutbal/discrete.hpp"
#include "cutbal/errors.hpp"
#include "cutbal/graph.hpp"
#include "cutbal/integrate.hpp"
#include "cutbal/scenario.hpp"
#include "cutbal/sorting.hpp"
#include "cutbal/trajectory.hpp"

namespace cutbal {

constexpr std::size_t kBalanceSampleCap = 2000;  // minimal-K analysis subsamples beyond this
constexpr double kBalanceKCap = 1e3;             // larger sampled K counts as "no finite bound"

struct BalanceSummary {
    bool feasible_at_all_samples = true;
    double max_minimal_k = 1.0;  // over analyzed samples; +inf when some sample is infeasible
    double check_k = 1.0;        // bound the run was verified against (claimed or measured)
    bool balanced_at_check_k = false;
    bool finite_bound = false;   // true when check_k is an actual certificate
    std::size_t analyzed_samples = 0;
    std::vector<std::pair<double, double>> k_series;  // (t, minimal K), +inf = infeasible
};

struct Report {
    std::string name;
    std::string fingerprint;
    int n = 0;
    TimeMode mode = TimeMode::Continuous;
    double horizon = 0.0;
    std::size_t samples = 0;

    BalanceSummary balance;
    ConditionProfile profile0;

    bool converged = false;
    double trailing_spread = 0.0;
    StateVector limits;

    bool weak_equals_strong = false;
    Partition predicted;
    Partition observed;  // empty when not converged
    std::string comparison = "not-converged";
    std::pair<int, int> mismatch_witness{0, 0};

    bool monotonicity_checked = false;
    bool monotone_ok = true;
    double monotonicity_worst_drop = 0.0;
    double monotonicity_slack = 0.0;

    bool residuals_checked = false;
    double residual = 0.0;
    double sorted_residual = 0.0;

    std::string edge_rule;
    double merge_tol = 0.0;

    bool theory_violation = false;
    std::vector<std::string> flags;
};

// claimed_k semantics: NaN = unknown, derive a bound from the samples;
// +inf = the scenario claims no uniform bound exists; finite = verify it.
inline Report analyze_run(const Scenario& sc, const Trajectory& tr, double claimed_k,
                          const std::string& name) {
    tr.check_consistent();
    Report rep;
    rep.name = name;
    rep.fingerprint = scenario_fingerprint(sc);
    rep.n = sc.n;
    rep.mode = sc.mode;
    rep.horizon = sc.horizon;
    rep.samples = tr.size();
    rep.merge_tol = 100.0 * sc.integrator.tol;

    const bool continuous = sc.mode == TimeMode::Continuous;
    rep.profile0 = condition_profile(sc.schedule.at(0.0, sc.x0));

    if (continuous) {
        const std::size_t stride = std::max<std::size_t>(1, tr.size() / kBalanceSampleCap);
        for (std::size_t k = 0; k < tr.size(); k += stride) {
            const MinimalK mk = minimal_cut_balance_k(sc.schedule.at(tr.times[k], tr.states[k]));
            rep.balance.k_series.emplace_back(tr.times[k],
                                              mk.feasible ? mk.k
                                                          : std::numeric_limits<double>::infinity());
            if (!mk.feasible) rep.balance.feasible_at_all_samples = false;
            rep.balance.max_minimal_k = std::max(rep.balance.max_minimal_k,
                                                 rep.balance.k_series.back().second);
            ++rep.balance.analyzed_samples;
        }
        const bool bounded = rep.balance.feasible_at_all_samples &&
                             rep.balance.max_minimal_k <= kBalanceKCap;
        if (std::isnan(claimed_k)) {
            rep.balance.check_k = bounded ? rep.balance.max_minimal_k : 1.0;
            rep.balance.finite_bound = bounded;
            rep.balance.balanced_at_check_k = bounded;
        } else if (std::isinf(claimed_k)) {
            rep.balance.check_k = 1.0;
            rep.balance.finite_bound = false;
            rep.balance.balanced_at_check_k = false;
            if (bounded)
                rep.flags.push_back("claimed unbalanced but a finite bound fits all samples");
        } else {
            bool ok = true;
            for (std::size_t k = 0; k < tr.size() && ok; k += stride)
                ok = verify_cut_balance(sc.schedule.at(tr.times[k], tr.states[k]),
                                        claimed_k * (1.0 + 1e-9))
                         .balanced;
            rep.balance.check_k = claimed_k;
            rep.balance.finite_bound = ok;
            rep.balance.balanced_at_check_k = ok;
            if (!ok) rep.flags.push_back("claimed balance bound fails at some sample");
        }
        if (!rep.balance.finite_bound && (std::isnan(claimed_k) || std::isinf(claimed_k)))
            rep.flags.push_back("no finite cut-balance K at samples");
    } else {
        // Discrete steps were validated during the run; flow balance per step
        // is part of that validation.
        rep.balance.finite_bound = true;
        rep.balance.balanced_at_check_k = true;
    }

    const ConvergenceCheck conv = trailing_window_convergence(tr, sc.integrator.tol);
    rep.converged = conv.converged;
    rep.trailing_spread = conv.trailing_spread;
    rep.limits = tr.final_state();
    if (!rep.converged) {
        double lo = tr.final_state()[0], hi = lo;
        for (std::size_t k = 0; k < tr.size(); ++k)
            if (tr.times[k] >= 0.8 * tr.horizon())
                for (double v : tr.states[k]) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
        std::ostringstream os;
        os << "not converged within horizon; trailing state spread " << format_g17(hi - lo);
        rep.flags.push_back(os.str());
    }

    const InteractionGraph ig = classify_unbounded_edges(tr);
    rep.edge_rule = ig.classification_rule;
    const WeakStrongReport ws = check_weak_equals_strong(ig);
    rep.weak_equals_strong = ws.equal;
    const ClusterPrediction pred = predict_clusters(ig);
    rep.predicted = pred.clusters;
    if (!pred.precondition_met) rep.flags.push_back(pred.note);

    if (rep.converged) {
        rep.observed = limit_partition(tr.final_state(), rep.merge_tol);
        const PartitionComparison cmp = compare_partitions(rep.predicted, rep.observed);
        rep.comparison = to_string(cmp.relation);
        rep.mismatch_witness = cmp.witness;
        if (cmp.relation == PartitionRelation::Mismatch) rep.flags.push_back(cmp.detail);
    }

    if (continuous) {
        const WeightedSumSeries series =
            weighted_sum_series(tr, sc.schedule, rep.balance.finite_bound ? rep.balance.check_k : 1.0);
        rep.monotonicity_checked = true;
        rep.monotonicity_slack = 100.0 * sc.integrator.tol;
        const MonotonicityReport mono = monotonicity_check(series, rep.monotonicity_slack);
        rep.monotone_ok = mono.pass;
        rep.monotonicity_worst_drop = mono.worst_drop;
        if (!mono.pass && rep.balance.finite_bound) {
            std::ostringstream os;
            os << "weighted-sum monitor dropped by " << format_g17(mono.worst_drop) << " at t="
               << format_g17(mono.worst_t) << " (m=" << mono.worst_m << ")";
            rep.flags.push_back(os.str());
        }

        rep.residuals_checked = true;
        rep.residual = residual_check(tr, sc.schedule).max_residual;
        rep.sorted_residual = sorted_evolution_residual(tr, sc.schedule);
    }

    // The theory's conclusions are binding only when its hypothesis (a
    // verified finite bound) holds.
    if (rep.balance.finite_bound) {
        if (!rep.weak_equals_strong) rep.theory_violation = true;
        if (rep.converged && rep.comparison == "mismatch") rep.theory_violation = true;
        if (continuous && !rep.monotone_ok) rep.theory_violation = true;
    }
    return rep;
}

inline nlohmann::json report_to_json(const Report& rep) {
    using nlohmann::json;
    json j;
    j["name"] = rep.name;
    j["fingerprint"] = rep.fingerprint;
    j["n"] = rep.n;
    j["mode"] = rep.mode == TimeMode::Continuous ? "continuous" : "discrete";
    j["horizon"] = rep.horizon;
    j["samples"] = rep.samples;

    json jb;
    jb["feasible_at_all_samples"] = rep.balance.feasible_at_all_samples;
    jb["finite_bound"] = rep.balance.finite_bound;
    jb["check_k"] = rep.balance.check_k;
    jb["balanced_at_check_k"] = rep.balance.balanced_at_check_k;
    jb["analyzed_samples"] = rep.balance.analyzed_samples;
    if (std::isfinite(rep.balance.max_minimal_k))
        jb["max_minimal_k"] = rep.balance.max_minimal_k;
    else
        jb["max_minimal_k"] = "infeasible";
    json series = json::array();
    for (const auto& [t, k] : rep.balance.k_series)
        series.push_back({t, std::isfinite(k) ? json(k) : json("infeasible")});
    jb["k_series"] = std::move(series);
    j["balance"] = std::move(jb);

    json jp;
    jp["symmetric"] = rep.profile0.symmetric;
    jp["type_symmetric"] = rep.profile0.type_symmetric;
    if (std::isfinite(rep.profile0.type_symmetry_k))
        jp["type_symmetry_k"] = rep.profile0.type_symmetry_k;
    jp["average_preserving"] = rep.profile0.average_preserving;
    jp["weighted_average_preserving"] = rep.profile0.weighted_average_preserving;
    jp["preserving_weights"] = rep.profile0.preserving_weights;
    j["condition_profile_t0"] = std::move(jp);

    json jc;
    jc["converged"] = rep.converged;
    jc["trailing_spread"] = rep.trailing_spread;
    jc["limits"] = rep.limits;
    j["convergence"] = std::move(jc);

    json jg;
    jg["weak_equals_strong"] = rep.weak_equals_strong;
    jg["predicted"] = rep.predicted;
    jg["observed"] = rep.observed;
    jg["comparison"] = rep.comparison;
    if (rep.comparison == "mismatch")
        jg["mismatch_witness"] = {rep.mismatch_witness.first, rep.mismatch_witness.second};
    jg["edge_rule"] = rep.edge_rule;
    jg["merge_tol"] = rep.merge_tol;
    j["clusters"] = std::move(jg);

    json jm;
    jm["checked"] = rep.monotonicity_checked;
    jm["pass"] = rep.monotone_ok;
    jm["worst_drop"] = rep.monotonicity_worst_drop;
    jm["slack"] = rep.monotonicity_slack;
    j["monotonicity"] = std::move(jm);

    json jr;
    jr["checked"] = rep.residuals_checked;
    jr["integral_residual"] = rep.residual;
    jr["sorted_residual"] = rep.sorted_residual;
    j["residuals"] = std::move(jr);

    j["flags"] = rep.flags;
    j["theory_violation"] = rep.theory_violation;
    return j;
}

inline std::string report_summary(const Report& rep) {
    std::ostringstream os;
    os << "scenario " << (rep.name.empty() ? "(unnamed)" : rep.name) << "  fingerprint "
       << rep.fingerprint << "\n";
    os << "  mode " << (rep.mode == TimeMode::Continuous ? "continuous" : "discrete") << ", n="
       << rep.n << ", horizon " << format_g17(rep.horizon) << ", samples " << rep.samples << "\n";
    if (rep.mode == TimeMode::Continuous) {
        os << "  cut-balance: ";
        if (rep.balance.finite_bound)
            os << "balanced at K=" << format_g17(rep.balance.check_k) << " across "
               << rep.balance.analyzed_samples << " analyzed samples";
        else
            os << "no finite cut-balance K at samples";
        if (rep.balance.feasible_at_all_samples &&
            std::isfinite(rep.balance.max_minimal_k))
            os << " (max minimal K " << format_g17(rep.balance.max_minimal_k) << ")";
        os << "\n";
        os << "  profile at t=0:" << profile_to_string(rep.profile0) << "\n";
    }
    os << "  convergence: " << (rep.converged ? "yes" : "no") << "; limits";
    for (double v : rep.limits) os << " " << format_g17(v);
    os << "\n";
    os << "  clusters: predicted " << partition_to_string(rep.predicted);
    if (rep.converged)
        os << " observed " << partition_to_string(rep.observed) << " -> " << rep.comparison;
    else
        os << " (no observed clusters: not converged)";
    os << "\n";
    if (rep.monotonicity_checked) {
        const char* status = rep.monotone_ok           ? "nondecreasing"
                             : rep.balance.finite_bound ? "FAILED"
                                                        : "drops (no bound certified, informational)";
        os << "  weighted-sum monitor: " << status << " (worst drop "
           << format_g17(rep.monotonicity_worst_drop) << ", slack "
           << format_g17(rep.monotonicity_slack) << ")\n";
    }
    if (rep.residuals_checked)
        os << "  residuals: integral " << format_g17(rep.residual) << ", sorted "
           << format_g17(rep.sorted_residual) << "\n";
    for (const std::string& f : rep.flags) os << "  flag: " << f << "\n";
    os << "  verdict: " << (rep.theory_violation ? "THEORY VIOLATION" : "consistent") << "\n";
    return os.str();
}

}  // namespace cutbal
