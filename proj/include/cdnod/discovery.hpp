#pragma once

#include "cdnod/citest.hpp"
#include "cdnod/graph.hpp"
#include "cdnod/hsic.hpp"
#include "cdnod/types.hpp"

#include <string>
#include <vector>

namespace cdnod {

struct DiscoveryConfig {
    double alpha_ci = 0.05;   // CI significance level
    double alpha_dep = 0.10;  // module-dependence threshold for delta scores
    int max_cond_size = 3;
    NullMethod null_method = NullMethod::gamma;
    double kernel_width = 0.0;  // 0 => median heuristic
    double kci_epsilon_scale = 1e-3;
    ModuleGramKind score_kind = ModuleGramKind::gaussian;
    std::uint64_t seed = 0;
    // When false, the surrogate is left out entirely (the PC-without-C
    // ablation used for comparisons).
    bool use_context = true;

    void validate() const;
};

struct AuditEntry {
    enum class Kind { ci_test, dependence, orientation, note };
    Kind kind = Kind::note;
    std::string stage;
    int i = -1, j = -1;
    std::vector<int> cond;
    double statistic = 0.0;
    double p_value = 1.0;
    double statistic_backward = 0.0;  // dependence entries: backward delta
    bool degenerate = false;
    std::string decision;
};

struct PseudoConfounderFinding {
    int a = -1, b = -1;
    bool adjacent = false;  // false: nonadjacent pair from skeleton records
    std::string detail;
};

struct DiscoveryResult {
    MixedGraph graph;  // observed nodes 0..m-1, surrogate = m when present
    std::vector<int> changing_modules;
    SepSetMap sepsets;
    std::vector<PseudoConfounderFinding> pseudo_confounded_pairs;
    std::vector<AuditEntry> audit_log;

    int observed_count() const { return graph.has_surrogate() ? graph.size() - 1 : graph.size(); }
    void refresh_changing_modules();
};

/// Algorithm-1 skeleton and changing-module search on a CI functor; node
/// indices are 0..m-1 plus m for the surrogate. PC-stable scheduling: edge
/// removals commit at the end of each conditioning-cardinality level, the
/// surrogate enters candidate sets only while an endpoint stays
/// context-adjacent, and surrogate edges condition on observed variables
/// only.
DiscoveryResult skeleton_search(int m, const CiFn& ci, const DiscoveryConfig& cfg,
                                std::vector<std::string> names = {});

DiscoveryResult skeleton_and_changing_modules(const Dataset& data, const DiscoveryConfig& cfg);

/// Classifies every nonadjacent pair of context-adjacent variables:
/// "confounded" when no observed subset separates it but some subset plus the
/// surrogate does, "clear" otherwise. Confounded findings are appended to
/// the result; everything is audit-logged.
std::vector<PseudoConfounderFinding> detect_pseudo_confounders(DiscoveryResult& result,
                                                               const CiFn& ci,
                                                               const DiscoveryConfig& cfg);

/// Algorithm 2: orient C -> V_k for every context-adjacent V_k, then settle
/// each unshielded triple C -> V_k - V_l (V_l not context-adjacent) from the
/// recorded separating set of (V_l, C): V_k <- V_l when the set excludes V_k,
/// V_k -> V_l when it includes V_k. New CI tests are issued only when no
/// record exists; conflicting evidence leaves the edge undirected.
void orient_by_invariance(DiscoveryResult& result, const CiFn& ci, const DiscoveryConfig& cfg);

/// Algorithm 3: outer loop over total conditioning cardinality n; for each
/// unoriented adjacent pair of changing-module variables, enumerate minimal
/// deconfounding sets and subsets of minimal potential deconfounding sets
/// (adjacency-anchored), score both directions, and commit decisive verdicts
/// together with the potential-set edge orientations. Pairs whose evaluated
/// modules are all dependent are reported as confounded.
void orient_by_independent_changes(DiscoveryResult& result, const ScoreFn& scores,
                                   const DiscoveryConfig& cfg);

/// Full pipeline: skeleton + changing modules, pseudo-confounder detection,
/// invariance orientation, independent-changes orientation, Meek completion.
DiscoveryResult discover(const Dataset& data, const DiscoveryConfig& cfg);

/// Same pipeline over externally supplied test and score functors (used by
/// oracle-mode checks).
DiscoveryResult discover_with(int m, const CiFn& ci, const ScoreFn& scores,
                              const DiscoveryConfig& cfg, std::vector<std::string> names = {});

/// Algorithm 5: lag-unrolled discovery over blocks of a time series. Output
/// is over the unit graph: m*(P+1) nodes named V(t-P)..V(t) plus the
/// surrogate; lagged edges are oriented by time order, instantaneous edges by
/// the invariance and independent-changes stages on the newest block and
/// replicated across blocks.
DiscoveryResult lagged_discover(const Dataset& series, int max_lag, const DiscoveryConfig& cfg);

/// The lag-unrolled dataset Algorithm 5 works on (exposed for the CLI and
/// tests): T-P rows, m*(P+1) columns, time context.
Dataset unroll_series(const Dataset& series, int max_lag);

}  // namespace cdnod
