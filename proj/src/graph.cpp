#include "cdnod/graph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <stdexcept>

namespace cdnod {

MixedGraph::MixedGraph(int n, std::vector<std::string> names, int surrogate)
    : n_(n), surrogate_(surrogate), names_(std::move(names)), cells_(static_cast<std::size_t>(n) * n, 0) {
    if (n < 0) throw std::invalid_argument("graph: negative node count");
    if (surrogate >= n) throw std::invalid_argument("graph: surrogate index out of range");
    if (names_.empty()) {
        names_.reserve(n);
        for (int i = 0; i < n; ++i)
            names_.push_back(i == surrogate ? "C" : "V" + std::to_string(i + 1));
    }
    if (static_cast<int>(names_.size()) != n) throw std::invalid_argument("graph: name count mismatch");
}

MixedGraph MixedGraph::complete(int n, std::vector<std::string> names, int surrogate) {
    MixedGraph g(n, std::move(names), surrogate);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.add_undirected(i, j);
    return g;
}

void MixedGraph::check_node(int i) const {
    if (i < 0 || i >= n_) throw std::invalid_argument("graph: node index out of range");
}

bool MixedGraph::adjacent(int i, int j) const {
    check_node(i);
    check_node(j);
    return cell(i, j) != 0 || cell(j, i) != 0;
}

bool MixedGraph::undirected(int i, int j) const {
    check_node(i);
    check_node(j);
    return cell(i, j) == 1;
}

bool MixedGraph::directed(int i, int j) const {
    check_node(i);
    check_node(j);
    return cell(i, j) == 2;
}

void MixedGraph::add_undirected(int i, int j) {
    check_node(i);
    check_node(j);
    if (i == j) throw std::invalid_argument("graph: self-loop");
    cell(i, j) = 1;
    cell(j, i) = 1;
}

void MixedGraph::add_directed(int i, int j) {
    check_node(i);
    check_node(j);
    if (i == j) throw std::invalid_argument("graph: self-loop");
    if (j == surrogate_) throw std::invalid_argument("graph: edge into surrogate");
    cell(i, j) = 2;
    cell(j, i) = 0;
}

void MixedGraph::remove_edge(int i, int j) {
    check_node(i);
    check_node(j);
    cell(i, j) = 0;
    cell(j, i) = 0;
}

void MixedGraph::orient(int i, int j) { add_directed(i, j); }

std::vector<int> MixedGraph::neighbors(int i) const {
    check_node(i);
    std::vector<int> out;
    for (int j = 0; j < n_; ++j)
        if (j != i && adjacent(i, j)) out.push_back(j);
    return out;
}

std::vector<int> MixedGraph::undirected_neighbors(int i) const {
    check_node(i);
    std::vector<int> out;
    for (int j = 0; j < n_; ++j)
        if (undirected(i, j)) out.push_back(j);
    return out;
}

std::vector<int> MixedGraph::parents(int i) const {
    check_node(i);
    std::vector<int> out;
    for (int j = 0; j < n_; ++j)
        if (directed(j, i)) out.push_back(j);
    return out;
}

std::vector<int> MixedGraph::children(int i) const {
    check_node(i);
    std::vector<int> out;
    for (int j = 0; j < n_; ++j)
        if (directed(i, j)) out.push_back(j);
    return out;
}

int MixedGraph::edge_count() const {
    int c = 0;
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j)
            if (adjacent(i, j)) ++c;
    return c;
}

std::vector<std::pair<int, int>> MixedGraph::undirected_edges() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j)
            if (undirected(i, j)) out.emplace_back(i, j);
    return out;
}

std::vector<std::pair<int, int>> MixedGraph::directed_edges() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            if (directed(i, j)) out.emplace_back(i, j);
    return out;
}

bool MixedGraph::directed_part_acyclic() const {
    std::vector<int> indeg(n_, 0);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            if (directed(i, j)) ++indeg[j];
    std::deque<int> q;
    for (int i = 0; i < n_; ++i)
        if (indeg[i] == 0) q.push_back(i);
    int seen = 0;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        ++seen;
        for (int j = 0; j < n_; ++j)
            if (directed(v, j) && --indeg[j] == 0) q.push_back(j);
    }
    return seen == n_;
}

bool MixedGraph::orienting_creates_cycle(int i, int j) const {
    // Cycle iff j already reaches i through directed edges.
    std::vector<bool> seen(n_, false);
    std::deque<int> q{j};
    seen[j] = true;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        if (v == i) return true;
        for (int w = 0; w < n_; ++w)
            if (directed(v, w) && !seen[w]) {
                seen[w] = true;
                q.push_back(w);
            }
    }
    return false;
}

bool MixedGraph::operator==(const MixedGraph& other) const {
    return n_ == other.n_ && surrogate_ == other.surrogate_ && names_ == other.names_ &&
           cells_ == other.cells_;
}

bool Dag::edge(int from, int to) const {
    const auto& p = parent_lists[to];
    return std::find(p.begin(), p.end(), from) != p.end();
}

std::vector<std::vector<int>> Dag::child_lists() const {
    std::vector<std::vector<int>> ch(n);
    for (int v = 0; v < n; ++v)
        for (int p : parent_lists[v]) ch[p].push_back(v);
    return ch;
}

bool Dag::acyclic() const {
    std::vector<int> indeg(n, 0);
    for (int v = 0; v < n; ++v) indeg[v] = static_cast<int>(parent_lists[v].size());
    auto children = child_lists();
    std::deque<int> q;
    for (int v = 0; v < n; ++v)
        if (indeg[v] == 0) q.push_back(v);
    int seen = 0;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        ++seen;
        for (int c : children[v])
            if (--indeg[c] == 0) q.push_back(c);
    }
    return seen == n;
}

std::vector<bool> GroundTruthDag::context_adjacent() const {
    std::vector<bool> out = changing;
    out.resize(dag.n, false);
    for (const auto& targets : confounder_targets)
        for (int t : targets) out[t] = true;
    return out;
}

bool d_separated(const Dag& dag, int i, int j, const std::vector<int>& cond) {
    if (i < 0 || i >= dag.n || j < 0 || j >= dag.n || i == j)
        throw std::invalid_argument("d_separated: bad node pair");
    std::vector<bool> in_cond(dag.n, false);
    for (int s : cond) {
        if (s < 0 || s >= dag.n) throw std::invalid_argument("d_separated: unknown node in set");
        if (s == i || s == j) throw std::invalid_argument("d_separated: set contains an endpoint");
        in_cond[s] = true;
    }
    const auto children = dag.child_lists();

    // Ancestors of the conditioning set (including the set itself).
    std::vector<bool> anc(dag.n, false);
    std::deque<int> q;
    for (int s = 0; s < dag.n; ++s)
        if (in_cond[s]) {
            anc[s] = true;
            q.push_back(s);
        }
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (int p : dag.parent_lists[v])
            if (!anc[p]) {
                anc[p] = true;
                q.push_back(p);
            }
    }

    // Reachability over active trails; state = (node, entered-from-child?).
    std::vector<bool> visited_up(dag.n, false), visited_down(dag.n, false);
    std::deque<std::pair<int, bool>> frontier;  // bool up = true: leaving through parents allowed
    frontier.emplace_back(i, true);
    while (!frontier.empty()) {
        auto [v, up] = frontier.front();
        frontier.pop_front();
        auto& mark = up ? visited_up : visited_down;
        if (mark[v]) continue;
        mark[v] = true;
        if (v == j) return false;
        if (up && !in_cond[v]) {
            for (int p : dag.parent_lists[v]) frontier.emplace_back(p, true);
            for (int c : children[v]) frontier.emplace_back(c, false);
        } else if (!up) {
            if (!in_cond[v])
                for (int c : children[v]) frontier.emplace_back(c, false);
            if (anc[v])
                for (int p : dag.parent_lists[v]) frontier.emplace_back(p, true);
        }
    }
    return true;
}

namespace {

bool is_observed(const MixedGraph& g, int v) { return v != g.surrogate(); }

// Meek R1: c -> a, a - b, c and b nonadjacent  =>  a -> b.
bool rule1_applies(const MixedGraph& g, int a, int b) {
    for (int c = 0; c < g.size(); ++c) {
        if (c == a || c == b || !is_observed(g, c)) continue;
        if (g.directed(c, a) && !g.adjacent(c, b)) return true;
    }
    return false;
}

// Meek R2: a -> c -> b, a - b  =>  a -> b.
bool rule2_applies(const MixedGraph& g, int a, int b) {
    for (int c = 0; c < g.size(); ++c) {
        if (c == a || c == b || !is_observed(g, c)) continue;
        if (g.directed(a, c) && g.directed(c, b)) return true;
    }
    return false;
}

// Meek R3: a - c, a - d, c -> b, d -> b, c and d nonadjacent  =>  a -> b.
bool rule3_applies(const MixedGraph& g, int a, int b) {
    for (int c = 0; c < g.size(); ++c) {
        if (c == a || c == b || !is_observed(g, c)) continue;
        if (!(g.undirected(a, c) && g.directed(c, b))) continue;
        for (int d = c + 1; d < g.size(); ++d) {
            if (d == a || d == b || !is_observed(g, d)) continue;
            if (g.undirected(a, d) && g.directed(d, b) && !g.adjacent(c, d)) return true;
        }
    }
    return false;
}

// Meek R4: d -> c -> b with a adjacent to both c and d, b and d nonadjacent
// => a -> b.
bool rule4_applies(const MixedGraph& g, int a, int b) {
    for (int c = 0; c < g.size(); ++c) {
        if (c == a || c == b || !is_observed(g, c)) continue;
        if (!g.directed(c, b) || !g.adjacent(a, c)) continue;
        for (int d = 0; d < g.size(); ++d) {
            if (d == a || d == b || d == c || !is_observed(g, d)) continue;
            if (g.directed(d, c) && g.adjacent(a, d) && !g.adjacent(b, d)) return true;
        }
    }
    return false;
}

}  // namespace

MixedGraph meek_orient(const MixedGraph& g) {
    if (!g.directed_part_acyclic())
        throw std::invalid_argument("meek_orient: directed part is cyclic");
    MixedGraph out = g;
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto [i, j] : out.undirected_edges()) {
            if (!is_observed(out, i) || !is_observed(out, j)) continue;
            for (auto [a, b] : {std::pair{i, j}, std::pair{j, i}}) {
                if (!out.undirected(a, b)) continue;
                if (rule1_applies(out, a, b) || rule2_applies(out, a, b) ||
                    rule3_applies(out, a, b) || rule4_applies(out, a, b)) {
                    if (out.orienting_creates_cycle(a, b)) continue;
                    out.orient(a, b);
                    changed = true;
                }
            }
        }
    }
    return out;
}

namespace {

// Path machinery for the deconfounding-set definitions. Paths are node
// sequences; the surrogate never participates.

std::vector<std::vector<int>> simple_paths(const MixedGraph& g, int l, int k) {
    std::vector<std::vector<int>> paths;
    std::vector<int> cur{l};
    std::vector<bool> on_path(g.size(), false);
    on_path[l] = true;
    std::function<void(int)> dfs = [&](int v) {
        for (int w = 0; w < g.size(); ++w) {
            if (!g.adjacent(v, w) || on_path[w] || w == g.surrogate()) continue;
            if (w == k) {
                if (cur.size() >= 2) {  // exclude the direct edge l - k
                    auto p = cur;
                    p.push_back(k);
                    paths.push_back(std::move(p));
                }
                continue;
            }
            cur.push_back(w);
            on_path[w] = true;
            dfs(w);
            on_path[w] = false;
            cur.pop_back();
        }
    };
    dfs(l);
    return paths;
}

bool definite_collider_on(const MixedGraph& g, const std::vector<int>& path, std::size_t idx) {
    int prev = path[idx - 1], cur = path[idx], next = path[idx + 1];
    return g.directed(prev, cur) && g.directed(next, cur);
}

std::vector<bool> definite_descendants(const MixedGraph& g, int v) {
    std::vector<bool> seen(g.size(), false);
    std::deque<int> q{v};
    while (!q.empty()) {
        int x = q.front();
        q.pop_front();
        for (int w = 0; w < g.size(); ++w)
            if (g.directed(x, w) && !seen[w]) {
                seen[w] = true;
                q.push_back(w);
            }
    }
    seen[v] = false;
    return seen;
}

std::vector<bool> possible_descendants(const MixedGraph& g, int v) {
    std::vector<bool> seen(g.size(), false);
    std::deque<int> q{v};
    while (!q.empty()) {
        int x = q.front();
        q.pop_front();
        for (int w = 0; w < g.size(); ++w) {
            if (w == g.surrogate() || seen[w]) continue;
            if (g.directed(x, w) || g.undirected(x, w)) {
                seen[w] = true;
                q.push_back(w);
            }
        }
    }
    seen[v] = false;
    return seen;
}

// A qualifying path is blocked by Z when some interior Z-member is not a
// definite collider on it, or when it runs through a definite collider none
// of whose definite descendants lies in Z.
bool blocked_by(const MixedGraph& g, const std::vector<int>& path, const std::vector<bool>& in_z) {
    for (std::size_t idx = 1; idx + 1 < path.size(); ++idx) {
        int v = path[idx];
        bool collider = definite_collider_on(g, path, idx);
        if (in_z[v] && !collider) return true;
        if (collider) {
            auto desc = definite_descendants(g, v);
            bool opened = false;
            for (int w = 0; w < g.size(); ++w)
                if (desc[w] && in_z[w]) opened = true;
            if (!opened) return true;
        }
    }
    return false;
}

bool blocks_all(const MixedGraph& g, const std::vector<std::vector<int>>& paths,
                const std::vector<int>& z, int n) {
    std::vector<bool> in_z(n, false);
    for (int v : z) in_z[v] = true;
    for (const auto& p : paths)
        if (!blocked_by(g, p, in_z)) return false;
    return true;
}

std::vector<std::vector<int>> minimal_qualifying_sets(const MixedGraph& g,
                                                      const std::vector<std::vector<int>>& paths,
                                                      const std::vector<int>& candidates) {
    std::vector<std::vector<int>> minimal;
    const int ncand = static_cast<int>(candidates.size());
    // Sizes ascending, lexicographic combinations within a size; any superset
    // of a found set is skipped, so the output is inclusion-incomparable.
    for (int size = 0; size <= ncand; ++size) {
        std::vector<int> comb(size);
        std::function<void(int, int)> walk = [&](int start, int depth) {
            if (depth == size) {
                std::vector<int> set;
                set.reserve(size);
                for (int c : comb) set.push_back(candidates[c]);
                for (const auto& m : minimal)
                    if (std::includes(set.begin(), set.end(), m.begin(), m.end())) return;
                if (blocks_all(g, paths, set, g.size())) minimal.push_back(set);
                return;
            }
            for (int c = start; c < ncand; ++c) {
                comb[depth] = c;
                walk(c + 1, depth + 1);
            }
        };
        walk(0, 0);
        if (size == 0 && !minimal.empty()) break;  // empty set qualifies; nothing else is minimal
    }
    return minimal;
}

void check_pair(const MixedGraph& g, int l, int k) {
    if (l == k || !g.adjacent(l, k))
        throw std::invalid_argument("deconfounding sets: endpoints must be an adjacent pair");
    if (l == g.surrogate() || k == g.surrogate())
        throw std::invalid_argument("deconfounding sets: surrogate cannot be an endpoint");
}

}  // namespace

std::vector<std::vector<int>> minimal_deconfounding_sets(const MixedGraph& g, int l, int k,
                                                         bool anchor_adjacency) {
    check_pair(g, l, k);
    // Paths whose end edges point into both endpoints.
    std::vector<std::vector<int>> qualifying;
    for (auto& p : simple_paths(g, l, k))
        if (g.directed(p[1], p[0]) && g.directed(p[p.size() - 2], p[p.size() - 1]))
            qualifying.push_back(std::move(p));

    auto bad_l = possible_descendants(g, l);
    auto bad_k = possible_descendants(g, k);
    std::vector<int> candidates;
    for (int v = 0; v < g.size(); ++v) {
        if (v == l || v == k || v == g.surrogate()) continue;
        if (bad_l[v] || bad_k[v]) continue;
        if (anchor_adjacency && !g.adjacent(v, l)) continue;
        candidates.push_back(v);
    }
    return minimal_qualifying_sets(g, qualifying, candidates);
}

std::vector<std::vector<int>> minimal_potential_deconfounding_sets(const MixedGraph& g, int l,
                                                                   int k, bool anchor_adjacency) {
    check_pair(g, l, k);
    // Paths with no arrow out of either endpoint.
    std::vector<std::vector<int>> qualifying;
    for (auto& p : simple_paths(g, l, k))
        if (!g.directed(p[0], p[1]) && !g.directed(p[p.size() - 1], p[p.size() - 2]))
            qualifying.push_back(std::move(p));

    std::vector<bool> in_deconf(g.size(), false);
    for (const auto& set : minimal_deconfounding_sets(g, l, k, anchor_adjacency))
        for (int v : set) in_deconf[v] = true;

    auto desc_l = definite_descendants(g, l);
    auto desc_k = definite_descendants(g, k);
    std::vector<int> candidates;
    for (int v = 0; v < g.size(); ++v) {
        if (v == l || v == k || v == g.surrogate()) continue;
        if (desc_l[v] || desc_k[v] || in_deconf[v]) continue;
        if (anchor_adjacency && !g.adjacent(v, l)) continue;
        candidates.push_back(v);
    }
    auto minimal = minimal_qualifying_sets(g, qualifying, candidates);
    // A qualifying empty set means no potential deconfounder is needed.
    if (!minimal.empty() && minimal.front().empty()) return {};
    return minimal;
}

}  // namespace cdnod
