#pragma once

// Subcommand entry points shared by the CLI binary and the tests. Each
// cmd_* function takes parsed options and returns the process exit code:
// 0 success, 1 operational error, 2 theory-violation (or balance check
// failure). Operational errors surface as exceptions for the binary's
// top-level handler; the functions themselves only return 0 or 2.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cutbal/balance.hpp"
#include "cutbal/catalog.hpp"
#include "cutbal/discrete.hpp"
#include "cutbal/errors.hpp"
#include "cutbal/graph.hpp"
#include "cutbal/integrate.hpp"
#include "cutbal/report.hpp"
#include "cutbal/scenario.hpp"
#include "cutbal/sorting.hpp"
#include "cutbal/suites.hpp"
#include "cutbal/trajectory.hpp"

namespace cutbal {

struct RunOptions {
    std::string ref;                  // config file path or catalogue entry name
    std::string out_dir = ".";
    std::optional<int> stride;        // overrides the scenario's sampling stride
    std::optional<double> tol;        // overrides the scenario's tolerance
};

namespace detail {

inline std::string sanitize_run_name(const std::string& raw) {
    std::string name;
    for (char c : raw)
        name += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return name.empty() ? std::string("run") : name;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw SchemaError("write failed for " + path.string());
}

inline std::string trajectory_csv(const Trajectory& tr) {
    std::ostringstream os;
    os << "t";
    for (int i = 1; i <= tr.n(); ++i) os << ",x" << i;
    os << "\n";
    for (std::size_t k = 0; k < tr.size(); ++k) {
        os << format_g17(tr.times[k]);
        for (int i = 0; i < tr.n(); ++i) os << "," << format_g17(tr.states[k][i]);
        os << "\n";
    }
    return os.str();
}

inline std::string sums_csv(const WeightedSumSeries& series) {
    std::ostringstream os;
    os << "t";
    for (std::size_t m = 1; m <= series.s.size(); ++m) os << ",S" << m;
    os << "\n";
    for (std::size_t k = 0; k < series.times.size(); ++k) {
        os << format_g17(series.times[k]);
        for (const auto& row : series.s) os << "," << format_g17(row[k]);
        os << "\n";
    }
    return os.str();
}

// A run reference is either a JSON config on disk or a catalogue name.
inline std::pair<Scenario, std::pair<std::string, double>> resolve_run_ref(
    const std::string& ref) {
    namespace fs = std::filesystem;
    if (fs::exists(fs::path(ref))) {
        std::ifstream in(ref);
        if (!in) throw SchemaError("cannot read config file " + ref);
        std::stringstream buf;
        buf << in.rdbuf();
        const Scenario sc = load_scenario(buf.str());
        return {sc, {sanitize_run_name(fs::path(ref).stem().string()),
                     std::numeric_limits<double>::quiet_NaN()}};
    }
    if (const CatalogEntry* entry = find_catalog_entry(ref))
        return {entry->scenario, {entry->name, entry->claimed_k}};
    throw SchemaError("'" + ref + "' is neither a readable config file nor a catalogue entry; " +
                      "run `cutbal catalog` to list the built-in scenarios");
}

}  // namespace detail

inline int cmd_run(const RunOptions& opt, std::ostream& out = std::cout) {
    namespace fs = std::filesystem;
    auto [sc, name_and_k] = detail::resolve_run_ref(opt.ref);
    const std::string name = name_and_k.first;
    const double claimed_k = name_and_k.second;
    if (opt.stride) {
        if (*opt.stride < 1) throw PreconditionError("stride must be >= 1");
        sc.sampling.stride = *opt.stride;
    }
    if (opt.tol) {
        if (!(*opt.tol > 0.0)) throw PreconditionError("tol must be positive");
        sc.integrator.tol = *opt.tol;
    }

    const Trajectory tr =
        sc.mode == TimeMode::Continuous ? integrate(sc) : dt_run_scenario(sc);
    const Report rep = analyze_run(sc, tr, claimed_k, name);

    fs::create_directories(opt.out_dir);
    const fs::path dir(opt.out_dir);
    detail::write_text_file(dir / (name + "_trajectory.csv"), detail::trajectory_csv(tr));
    const WeightedSumSeries series = weighted_sum_series(
        tr, sc.schedule, rep.balance.finite_bound ? rep.balance.check_k : 1.0);
    detail::write_text_file(dir / (name + "_sums.csv"), detail::sums_csv(series));
    detail::write_text_file(dir / (name + "_edges.txt"),
                            edge_list_text(classify_unbounded_edges(tr)));
    detail::write_text_file(dir / (name + "_report.json"), report_to_json(rep).dump(2) + "\n");

    out << report_summary(rep);
    out << "wrote " << (dir / (name + "_trajectory.csv")).string() << ", "
        << (dir / (name + "_sums.csv")).string() << ", " << (dir / (name + "_edges.txt")).string()
        << ", " << (dir / (name + "_report.json")).string() << "\n";
    return rep.theory_violation ? 2 : 0;
}

// Whitespace-separated numeric matrix; `#` starts a comment, blank lines
// are skipped, and the entry count must be a perfect square.
inline CoefficientMatrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot read matrix file " + path);
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double v = 0.0;
        while (ls >> v) values.push_back(v);
        if (!ls.eof())
            throw SchemaError("matrix file " + path + ": non-numeric token in line '" + line +
                              "'");
    }
    if (values.empty()) throw SchemaError("matrix file " + path + ": no entries");
    int n = static_cast<int>(std::llround(std::sqrt(static_cast<double>(values.size()))));
    if (static_cast<std::size_t>(n) * n != values.size())
        throw SchemaError("matrix file " + path + ": " + std::to_string(values.size()) +
                          " entries do not form a square matrix");
    CoefficientMatrix a(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double v = values[static_cast<std::size_t>(i) * n + j];
            if (!std::isfinite(v) || (i != j && v < 0.0))
                throw SchemaError("matrix file " + path + ": entry (" + std::to_string(i + 1) +
                                  "," + std::to_string(j + 1) + ") must be finite nonnegative");
            a(i, j) = v;
        }
    return a;
}

inline int cmd_check(const std::string& matrix_path, std::optional<double> k,
                     std::ostream& out = std::cout) {
    const CoefficientMatrix a = read_matrix_file(matrix_path);
    const ConditionProfile profile = condition_profile(a);
    out << "n = " << a.n() << "\n";
    out << "profile:" << profile_to_string(profile) << "\n";

    if (k) {
        const CutBalanceVerdict verdict = verify_cut_balance(a, *k);
        if (verdict.balanced) {
            out << "balanced at K = " << format_g17(*k) << "\n";
            return 0;
        }
        out << "not balanced at K = " << format_g17(*k) << " (violating cut "
            << subset_to_string(verdict.violating_cut.value_or(0), a.n()) << ", minimal K "
            << (verdict.report.feasible ? format_g17(verdict.report.minimal_k) : "infeasible")
            << ")\n";
        return 2;
    }
    const MinimalK mk = minimal_cut_balance_k(a);
    if (!mk.feasible) {
        out << "infeasible: no finite K balances this matrix (witness cut "
            << subset_to_string(mk.witness_cut, a.n()) << ")\n";
        return 2;
    }
    out << "minimal K = " << format_g17(mk.k) << "\n";
    return 0;
}

inline int cmd_suite(const std::string& name, long long trials, std::uint64_t seed,
                     std::ostream& out = std::cout) {
    const SuiteResult res = run_suite(name, trials, seed);
    out << suite_summary(res);
    return res.pass ? 0 : 2;
}

inline int cmd_catalog(std::ostream& out = std::cout) {
    for (const CatalogEntry& e : scenario_catalog()) {
        out << e.name << "  (" << (e.scenario.mode == TimeMode::Continuous ? "ct" : "dt")
            << ", n=" << e.scenario.n << ", horizon=" << format_g17(e.scenario.horizon)
            << ", K=" << (std::isfinite(e.claimed_k) ? format_g17(e.claimed_k) : "none") << ")\n"
            << "    " << e.summary << "\n";
    }
    return 0;
}

}  // namespace cutbal
