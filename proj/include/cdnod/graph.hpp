#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace cdnod {

/// Partially oriented graph over observed variables plus an optional
/// distinguished surrogate node. The surrogate only ever carries outgoing
/// directed or undirected edges.
class MixedGraph {
public:
    MixedGraph() = default;
    explicit MixedGraph(int n, std::vector<std::string> names = {}, int surrogate = -1);

    /// Complete undirected graph (the starting point of skeleton search).
    static MixedGraph complete(int n, std::vector<std::string> names = {}, int surrogate = -1);

    int size() const { return n_; }
    int surrogate() const { return surrogate_; }
    bool has_surrogate() const { return surrogate_ >= 0; }
    const std::vector<std::string>& names() const { return names_; }
    const std::string& name(int i) const { return names_[i]; }

    bool adjacent(int i, int j) const;
    bool undirected(int i, int j) const;
    bool directed(int i, int j) const;  // i -> j

    void add_undirected(int i, int j);
    void add_directed(int i, int j);
    void remove_edge(int i, int j);
    /// Turns an existing edge into i -> j (or adds it directed if absent).
    void orient(int i, int j);

    std::vector<int> neighbors(int i) const;       // any edge
    std::vector<int> undirected_neighbors(int i) const;
    std::vector<int> parents(int i) const;          // j -> i
    std::vector<int> children(int i) const;         // i -> j

    int edge_count() const;
    std::vector<std::pair<int, int>> undirected_edges() const;  // i < j
    std::vector<std::pair<int, int>> directed_edges() const;    // from -> to

    bool directed_part_acyclic() const;
    /// True if adding i -> j would close a directed cycle.
    bool orienting_creates_cycle(int i, int j) const;

    bool operator==(const MixedGraph& other) const;

private:
    void check_node(int i) const;
    std::uint8_t& cell(int i, int j) { return cells_[static_cast<std::size_t>(i) * n_ + j]; }
    std::uint8_t cell(int i, int j) const { return cells_[static_cast<std::size_t>(i) * n_ + j]; }

    int n_ = 0;
    int surrogate_ = -1;
    std::vector<std::string> names_;
    std::vector<std::uint8_t> cells_;  // 0 none, 1 undirected, 2 arrow i->j
};

/// Conditioning set found when an edge was removed; keys are unordered pairs
/// (min, max) over node indices. Sets may include the surrogate index.
using SepSetMap = std::map<std::pair<int, int>, std::vector<int>>;

/// Plain DAG used by oracles and generators.
struct Dag {
    int n = 0;
    std::vector<std::vector<int>> parent_lists;

    explicit Dag(int n_nodes = 0) : n(n_nodes), parent_lists(n_nodes) {}
    void add_edge(int from, int to) { parent_lists[to].push_back(from); }
    bool edge(int from, int to) const;
    std::vector<std::vector<int>> child_lists() const;
    bool acyclic() const;
};

/// Ground-truth generating structure: a DAG over observed variables,
/// changing-module flags, and pseudo-confounder target sets g_l(C).
struct GroundTruthDag {
    Dag dag;
    std::vector<bool> changing;                        // theta_i varies with C
    std::vector<std::vector<int>> confounder_targets;  // one entry per g_l

    int m() const { return dag.n; }
    /// Nodes whose module depends on C: changing flag or confounder target.
    std::vector<bool> context_adjacent() const;
};

/// Standard d-separation decision via Bayes-ball style reachability.
bool d_separated(const Dag& dag, int i, int j, const std::vector<int>& cond);

/// Meek orientation rules R1-R4 applied to a fixed point. Never deletes
/// edges, never creates a new V-structure or a directed cycle, and skips the
/// surrogate node entirely. Throws if the directed part is cyclic.
MixedGraph meek_orient(const MixedGraph& g);

/// All inclusion-minimal deconfounding sets of the adjacent pair (l, k):
/// member sets that contain no possible descendant of either endpoint and
/// block every path whose end edges point into both endpoints. When
/// `anchor_adjacency`, members are restricted to neighbors of l. The list
/// {{}} means the empty set qualifies.
std::vector<std::vector<int>> minimal_deconfounding_sets(const MixedGraph& g, int l, int k,
                                                         bool anchor_adjacency);

/// All inclusion-minimal nonempty potential deconfounding sets of (l, k):
/// members are not definite descendants of the endpoints, not members of any
/// minimal deconfounding set, and jointly block every path that has no arrow
/// out of either endpoint. Empty result means no nonempty set is needed or
/// none qualifies.
std::vector<std::vector<int>> minimal_potential_deconfounding_sets(const MixedGraph& g, int l,
                                                                   int k, bool anchor_adjacency);

}  // namespace cdnod
