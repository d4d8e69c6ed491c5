#pragma once

// Persistent-interaction digraph, component analysis, and cluster prediction.
//
// Arc direction follows influence: an arc j -> i means agent i keeps drawing
// on agent j's value (the accrued integral of a_ij never stops growing). The
// limit structure of a balanced run is read off this digraph: its weakly
// connected components are the predicted clusters.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cutbal/errors.hpp"
#include "cutbal/matrix.hpp"
#include "cutbal/trajectory.hpp"

namespace cutbal {

constexpr double kDefaultGrowthFrac = 0.4;  // second-half accrual vs first-half
constexpr double kDefaultAccrualEps = 1e-9;

// Blocks of 1-indexed agents, each block ascending, blocks ordered by leader.
using Partition = std::vector<std::vector<int>>;

struct Digraph {
    int n = 0;
    SquareMatrix<unsigned char> arc{0};  // arc(u, v) != 0 means u -> v, 0-indexed

    Digraph() = default;
    explicit Digraph(int nodes) : n(nodes), arc(nodes, 0) {}
};

struct InteractionGraph {
    Digraph graph;
    CoefficientMatrix weight{0};  // weight(i, j): accrued integral of a_ij, or activation frequency
    std::string classification_rule;
};

// Splits each accrued integral at mid-run: an interaction that keeps firing
// contributes comparably in both halves, while an integrable tail puts almost
// everything in the first half. Finite-horizon stand-in for "grows forever".
inline InteractionGraph classify_unbounded_edges(const Trajectory& tr,
                                                 double growth_frac = kDefaultGrowthFrac,
                                                 double eps_zero = kDefaultAccrualEps) {
    tr.check_consistent();
    if (tr.integrals.size() != tr.size())
        throw PreconditionError("classify_unbounded_edges: trajectory carries no integrals");
    if (tr.size() < 3)
        throw PreconditionError("classify_unbounded_edges: need at least three samples");
    const int n = tr.n();
    const double t_mid = 0.5 * tr.horizon();
    std::size_t mid = 0;
    while (mid + 1 < tr.size() && tr.times[mid + 1] <= t_mid) ++mid;

    InteractionGraph out;
    out.graph = Digraph(n);
    out.weight = tr.integrals.back();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double first = tr.integrals[mid](i, j);
            const double second = out.weight(i, j) - first;
            if (out.weight(i, j) > eps_zero && second >= growth_frac * first)
                out.graph.arc(j, i) = 1;
        }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "arc (j,i) kept when total accrual of integral a_ij > %g and second-half accrual >= "
                  "%g * first-half accrual",
                  eps_zero, growth_frac);
    out.classification_rule = buf;
    return out;
}

// Arc j -> i wherever a_ij exceeds the threshold; used for per-step digraphs.
inline Digraph digraph_from_coefficients(const CoefficientMatrix& a, double threshold) {
    Digraph g(a.n());
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            if (i != j && a(i, j) >= threshold) g.arc(j, i) = 1;
    return g;
}

// Tarjan's algorithm, iterative; returns a component id per node. Nodes are
// visited in index order, so ids are deterministic.
inline std::vector<int> strong_component_ids(const Digraph& g) {
    const int n = g.n;
    std::vector<int> comp(n, -1), low(n, 0), num(n, -1), stk;
    std::vector<unsigned char> on(n, 0);
    std::vector<std::pair<int, int>> frames;  // node, next candidate child
    int counter = 0, ncomp = 0;
    for (int s = 0; s < n; ++s) {
        if (num[s] != -1) continue;
        frames.emplace_back(s, 0);
        while (!frames.empty()) {
            auto& [u, next] = frames.back();
            if (next == 0) {
                num[u] = low[u] = counter++;
                stk.push_back(u);
                on[u] = 1;
            }
            int v = next;
            while (v < n && !(v != u && g.arc(u, v))) ++v;
            if (v < n) {
                next = v + 1;
                if (num[v] == -1) frames.emplace_back(v, 0);
                else if (on[v]) low[u] = std::min(low[u], num[v]);
            } else {
                const int done = u;
                frames.pop_back();
                if (!frames.empty())
                    low[frames.back().first] = std::min(low[frames.back().first], low[done]);
                if (low[done] == num[done]) {
                    while (true) {
                        const int w = stk.back();
                        stk.pop_back();
                        on[w] = 0;
                        comp[w] = ncomp;
                        if (w == done) break;
                    }
                    ++ncomp;
                }
            }
        }
    }
    return comp;
}

inline std::vector<int> weak_component_ids(const Digraph& g) {
    const int n = g.n;
    std::vector<int> comp(n, -1);
    std::vector<int> queue;
    int ncomp = 0;
    for (int s = 0; s < n; ++s) {
        if (comp[s] != -1) continue;
        comp[s] = ncomp;
        queue.assign(1, s);
        while (!queue.empty()) {
            const int u = queue.back();
            queue.pop_back();
            for (int v = 0; v < n; ++v)
                if (comp[v] == -1 && (g.arc(u, v) || g.arc(v, u))) {
                    comp[v] = ncomp;
                    queue.push_back(v);
                }
        }
        ++ncomp;
    }
    return comp;
}

inline Partition components_to_partition(const std::vector<int>& comp) {
    int ncomp = 0;
    for (int c : comp) ncomp = std::max(ncomp, c + 1);
    Partition blocks(ncomp);
    for (std::size_t i = 0; i < comp.size(); ++i)
        blocks[comp[i]].push_back(static_cast<int>(i) + 1);
    for (auto& b : blocks) std::sort(b.begin(), b.end());
    std::sort(blocks.begin(), blocks.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return blocks;
}

inline Partition strongly_connected_components(const Digraph& g) {
    return components_to_partition(strong_component_ids(g));
}
inline Partition strongly_connected_components(const InteractionGraph& g) {
    return strongly_connected_components(g.graph);
}
inline Partition weakly_connected_components(const Digraph& g) {
    return components_to_partition(weak_component_ids(g));
}
inline Partition weakly_connected_components(const InteractionGraph& g) {
    return weakly_connected_components(g.graph);
}

inline Partition canonical_partition(Partition p) {
    for (auto& b : p) std::sort(b.begin(), b.end());
    std::sort(p.begin(), p.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return p;
}

inline int partition_agent_count(const Partition& p) {
    int n = 0;
    for (const auto& b : p) n += static_cast<int>(b.size());
    return n;
}

struct WeakStrongReport {
    bool equal = false;
    Partition weak;
    Partition strong;
    std::pair<int, int> witness{0, 0};  // an arc that leaves a strong component with no way back
    std::string detail;
};

// Balanced interaction makes every weakly connected component strongly
// connected; a one-way arc between strong components certifies the imbalance.
inline WeakStrongReport check_weak_equals_strong(const Digraph& g) {
    WeakStrongReport rep;
    const std::vector<int> s = strong_component_ids(g);
    rep.weak = components_to_partition(weak_component_ids(g));
    rep.strong = components_to_partition(s);
    rep.equal = rep.weak == rep.strong;
    if (!rep.equal) {
        for (int u = 0; u < g.n && rep.witness.first == 0; ++u)
            for (int v = 0; v < g.n; ++v)
                if (v != u && g.arc(u, v) && s[u] != s[v]) {
                    rep.witness = {u + 1, v + 1};
                    break;
                }
        rep.detail = "arc " + std::to_string(rep.witness.first) + " -> " +
                     std::to_string(rep.witness.second) +
                     " leaves its strong component with no return path";
    }
    return rep;
}
inline WeakStrongReport check_weak_equals_strong(const InteractionGraph& g) {
    return check_weak_equals_strong(g.graph);
}

struct ClusterPrediction {
    Partition clusters;             // weakly connected components
    bool precondition_met = false;  // weak components strongly connected
    std::string note;
};

inline ClusterPrediction predict_clusters(const Digraph& g) {
    ClusterPrediction pred;
    const WeakStrongReport ws = check_weak_equals_strong(g);
    pred.clusters = ws.weak;
    pred.precondition_met = ws.equal;
    pred.note = ws.equal ? "weak components are strongly connected"
                         : "theory precondition unmet: " + ws.detail;
    return pred;
}
inline ClusterPrediction predict_clusters(const InteractionGraph& g) {
    return predict_clusters(g.graph);
}

// Single-linkage in one dimension: sort the final values and cut at gaps
// wider than merge_tol.
inline Partition limit_partition(const StateVector& x, double merge_tol) {
    if (x.empty()) return {};
    if (!(merge_tol >= 0.0))
        throw PreconditionError("limit_partition: merge_tol must be nonnegative");
    std::vector<int> order(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return x[a] < x[b] || (x[a] == x[b] && a < b);
    });
    Partition blocks;
    blocks.push_back({order[0] + 1});
    for (std::size_t k = 1; k < order.size(); ++k) {
        if (x[order[k]] - x[order[k - 1]] > merge_tol) blocks.emplace_back();
        blocks.back().push_back(order[k] + 1);
    }
    return canonical_partition(std::move(blocks));
}

inline Partition limit_partition(const Trajectory& tr, double merge_tol, double tol = 1e-6) {
    const ConvergenceCheck conv = trailing_window_convergence(tr, tol);
    if (!conv.converged)
        throw PreconditionError("limit_partition: trajectory not converged (some coordinate still "
                                "moves by " + format_g17(conv.trailing_spread) +
                                " in the trailing window)");
    return limit_partition(tr.final_state(), merge_tol);
}

enum class PartitionRelation { Equal, Refinement, Mismatch };

inline const char* to_string(PartitionRelation r) {
    switch (r) {
        case PartitionRelation::Equal: return "equal";
        case PartitionRelation::Refinement: return "refinement";
        default: return "mismatch";
    }
}

struct PartitionComparison {
    PartitionRelation relation = PartitionRelation::Mismatch;
    std::pair<int, int> witness{0, 0};
    std::string detail;
};

// Predicted clusters may only merge in the observed limit, never split:
// exact match is the generic outcome, a strict refinement is legal (distinct
// components are allowed to land on the same value), and a predicted cluster
// straddling two observed ones falsifies the prediction.
inline PartitionComparison compare_partitions(const Partition& predicted,
                                              const Partition& observed) {
    const Partition pred = canonical_partition(predicted);
    const Partition obs = canonical_partition(observed);
    const int n = partition_agent_count(pred);
    if (n != partition_agent_count(obs))
        throw PreconditionError("compare_partitions: partitions cover different agent sets");

    std::vector<int> obs_block(n + 1, -1);
    for (std::size_t b = 0; b < obs.size(); ++b)
        for (int agent : obs[b]) {
            if (agent < 1 || agent > n || obs_block[agent] != -1)
                throw PreconditionError("compare_partitions: observed is not a partition of 1..n");
            obs_block[agent] = static_cast<int>(b);
        }

    PartitionComparison cmp;
    for (const auto& block : pred)
        for (std::size_t k = 1; k < block.size(); ++k) {
            if (block[k] < 1 || block[k] > n || obs_block[block[k]] == -1)
                throw PreconditionError("compare_partitions: predicted is not a partition of 1..n");
            if (obs_block[block[k]] != obs_block[block[0]]) {
                cmp.relation = PartitionRelation::Mismatch;
                cmp.witness = {block[0], block[k]};
                cmp.detail = "agents " + std::to_string(block[0]) + " and " +
                             std::to_string(block[k]) +
                             " share a predicted cluster but settle on different limits";
                return cmp;
            }
        }
    if (pred == obs) {
        cmp.relation = PartitionRelation::Equal;
        cmp.detail = "predicted and observed clusters coincide";
    } else {
        cmp.relation = PartitionRelation::Refinement;
        cmp.detail = "observed clusters merge some predicted ones";
    }
    return cmp;
}

inline std::string partition_to_string(const Partition& p) {
    std::string s = "{";
    for (std::size_t b = 0; b < p.size(); ++b) {
        s += b ? " {" : "{";
        for (std::size_t k = 0; k < p[b].size(); ++k) {
            if (k) s += ",";
            s += std::to_string(p[b][k]);
        }
        s += "}";
    }
    s += "}";
    return s;
}

// Plain text arc list: "j i w" is an arc j -> i carrying weight w (the
// accrued integral of a_ij or its activation frequency), 1-indexed, sorted
// by (j, i).
inline void write_edge_list(std::ostream& os, const InteractionGraph& g) {
    os << "# persistent interaction arcs: \"j i w\" is an arc j -> i with weight w\n";
    os << "# rule: " << g.classification_rule << "\n";
    os << "# agents: " << g.graph.n << "\n";
    char buf[64];
    for (int j = 0; j < g.graph.n; ++j)
        for (int i = 0; i < g.graph.n; ++i)
            if (g.graph.arc(j, i)) {
                std::snprintf(buf, sizeof buf, "%.17g", g.weight(i, j));
                os << (j + 1) << " " << (i + 1) << " " << buf << "\n";
            }
}

inline std::string edge_list_text(const InteractionGraph& g) {
    std::ostringstream os;
    write_edge_list(os, g);
    return os.str();
}

}  // namespace cutbal
