#include "cdnod/discovery.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace cdnod {

namespace {

std::pair<int, int> key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

std::string set_string(const std::vector<int>& s) {
    std::ostringstream out;
    out << "{";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out << ",";
        out << s[i];
    }
    out << "}";
    return out.str();
}

void log_ci(DiscoveryResult& r, const std::string& stage, int i, int j,
            const std::vector<int>& cond, const CITestResult& t, const std::string& decision) {
    AuditEntry e;
    e.kind = AuditEntry::Kind::ci_test;
    e.stage = stage;
    e.i = i;
    e.j = j;
    e.cond = cond;
    e.statistic = t.statistic;
    e.p_value = t.p_value;
    e.degenerate = t.degenerate;
    e.decision = decision;
    r.audit_log.push_back(std::move(e));
}

void log_note(DiscoveryResult& r, const std::string& stage, const std::string& text) {
    AuditEntry e;
    e.kind = AuditEntry::Kind::note;
    e.stage = stage;
    e.decision = text;
    r.audit_log.push_back(std::move(e));
}

void log_orientation(DiscoveryResult& r, const std::string& stage, int from, int to,
                     const std::string& why) {
    AuditEntry e;
    e.kind = AuditEntry::Kind::orientation;
    e.stage = stage;
    e.i = from;
    e.j = to;
    e.decision = why;
    r.audit_log.push_back(std::move(e));
}

/// Size-`size` subsets of `pool` in lexicographic order.
std::vector<std::vector<int>> subsets_of_size(const std::vector<int>& pool, int size) {
    std::vector<std::vector<int>> out;
    if (size > static_cast<int>(pool.size())) return out;
    std::vector<int> comb(size);
    std::function<void(int, int)> walk = [&](int start, int depth) {
        if (depth == size) {
            std::vector<int> s;
            s.reserve(size);
            for (int c : comb) s.push_back(pool[c]);
            out.push_back(std::move(s));
            return;
        }
        for (int c = start; c < static_cast<int>(pool.size()); ++c) {
            comb[depth] = c;
            walk(c + 1, depth + 1);
        }
    };
    walk(0, 0);
    return out;
}

struct EdgeTask {
    int i, j;  // i < j, or (i, c_node)
};

}  // namespace

void DiscoveryConfig::validate() const {
    if (!(alpha_ci > 0.0 && alpha_ci < 1.0))
        throw std::invalid_argument("discovery config: alpha_ci must lie in (0, 1)");
    if (max_cond_size < 0) throw std::invalid_argument("discovery config: max_cond_size >= 0");
    if (!(alpha_dep >= 0.0)) throw std::invalid_argument("discovery config: alpha_dep >= 0");
}

void DiscoveryResult::refresh_changing_modules() {
    changing_modules.clear();
    if (!graph.has_surrogate()) return;
    for (int v : graph.neighbors(graph.surrogate())) changing_modules.push_back(v);
    std::sort(changing_modules.begin(), changing_modules.end());
}

DiscoveryResult skeleton_search(int m, const CiFn& ci, const DiscoveryConfig& cfg,
                                std::vector<std::string> names) {
    cfg.validate();
    if (m < 1) throw std::invalid_argument("skeleton_search: need at least one variable");
    const bool with_c = cfg.use_context;
    const int c_node = m;
    const int n_nodes = with_c ? m + 1 : m;
    if (names.empty())
        for (int i = 0; i < m; ++i) names.push_back("V" + std::to_string(i + 1));
    if (with_c && static_cast<int>(names.size()) == m) names.push_back("C");
    DiscoveryResult result{MixedGraph::complete(n_nodes, std::move(names), with_c ? c_node : -1)};
    auto& g = result.graph;

    for (int level = 0; level <= cfg.max_cond_size; ++level) {
        // PC-stable: all tests at one level run against the level-start
        // adjacency; removals commit afterwards.
        std::vector<std::vector<int>> adj(n_nodes);
        for (int v = 0; v < n_nodes; ++v) adj[v] = g.neighbors(v);
        std::vector<EdgeTask> tasks;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < n_nodes; ++j)
                if (g.adjacent(i, j)) tasks.push_back({i, j});

        std::vector<std::pair<int, int>> removals;
        bool any_pool = false;
        for (const auto& task : tasks) {
            const bool c_edge = with_c && task.j == c_node;
            std::vector<std::vector<int>> pools;
            if (c_edge) {
                // Surrogate edges condition on observed variables only.
                std::vector<int> pool;
                for (int v : adj[task.i])
                    if (v != c_node) pool.push_back(v);
                pools.push_back(std::move(pool));
            } else {
                const bool c_allowed = with_c && (g.adjacent(task.i, c_node) ||
                                                  g.adjacent(task.j, c_node));
                for (int side : {task.i, task.j}) {
                    const int other = side == task.i ? task.j : task.i;
                    std::vector<int> pool;
                    for (int v : adj[side])
                        if (v != other && v != c_node) pool.push_back(v);
                    if (c_allowed) pool.push_back(c_node);
                    pools.push_back(std::move(pool));
                }
            }
            std::set<std::vector<int>> tested;
            bool removed = false;
            for (const auto& pool : pools) {
                if (static_cast<int>(pool.size()) >= level) any_pool = true;
                for (auto& s : subsets_of_size(pool, level)) {
                    if (removed || !tested.insert(s).second) continue;
                    const CITestResult t = ci(task.i, task.j, s);
                    const bool independent = t.p_value > cfg.alpha_ci;
                    log_ci(result, "skeleton", task.i, task.j, s,
                           t, independent ? "independent: remove edge" : "dependent");
                    if (independent) {
                        removals.emplace_back(task.i, task.j);
                        result.sepsets[key(task.i, task.j)] = s;
                        removed = true;
                    }
                }
                if (removed) break;
            }
        }
        for (auto [i, j] : removals) g.remove_edge(i, j);
        if (!any_pool) break;
    }
    result.refresh_changing_modules();
    return result;
}

DiscoveryResult skeleton_and_changing_modules(const Dataset& data, const DiscoveryConfig& cfg) {
    data.validate();
    CiConfig ci_cfg;
    ci_cfg.null_method = cfg.null_method;
    ci_cfg.epsilon_scale = cfg.kci_epsilon_scale;
    ci_cfg.kernel_width = cfg.kernel_width;
    ci_cfg.seed = cfg.seed;
    return skeleton_search(data.m(), make_ci_fn(data, ci_cfg), cfg, data.names);
}

std::vector<PseudoConfounderFinding> detect_pseudo_confounders(DiscoveryResult& result,
                                                               const CiFn& ci,
                                                               const DiscoveryConfig& cfg) {
    std::vector<PseudoConfounderFinding> findings;
    auto& g = result.graph;
    if (!g.has_surrogate()) return findings;
    const int m = result.observed_count();
    const int c_node = g.surrogate();
    // Every nonadjacent pair is classified; only pairs whose removal needed
    // the surrogate in the separating set can turn out confounded, and those
    // are exactly the ones that trigger extra observed-subset tests.
    for (int a = 0; a < m; ++a) {
        for (int b = a + 1; b < m; ++b) {
            if (g.adjacent(a, b)) continue;
            const auto it = result.sepsets.find(key(a, b));
            PseudoConfounderFinding f;
            f.a = a;
            f.b = b;
            f.adjacent = false;
            const bool recorded_with_c =
                it != result.sepsets.end() &&
                std::find(it->second.begin(), it->second.end(), c_node) != it->second.end();
            if (!recorded_with_c) {
                f.detail = "clear: separated without C";
                log_note(result, "pseudo-confounders",
                         "pair (" + g.name(a) + "," + g.name(b) + ") clear");
                findings.push_back(f);
                continue;
            }
            // Separated only together with C so far; rule out every observed
            // subset before claiming a confounder.
            std::vector<int> others;
            for (int v = 0; v < m; ++v)
                if (v != a && v != b) others.push_back(v);
            bool separated_without_c = false;
            for (int size = 0; size <= cfg.max_cond_size && !separated_without_c; ++size) {
                for (auto& s : subsets_of_size(others, size)) {
                    const CITestResult t = ci(a, b, s);
                    const bool independent = t.p_value > cfg.alpha_ci;
                    log_ci(result, "pseudo-confounders", a, b, s, t,
                           independent ? "independent without C" : "dependent");
                    if (independent) {
                        separated_without_c = true;
                        break;
                    }
                }
            }
            if (separated_without_c) {
                f.detail = "clear: separated without C";
            } else {
                f.detail = "confounded: separated only with C (sepset " +
                           set_string(it->second) + ")";
                result.pseudo_confounded_pairs.push_back(f);
            }
            log_note(result, "pseudo-confounders",
                     "pair (" + g.name(a) + "," + g.name(b) + ") " + f.detail);
            findings.push_back(f);
        }
    }
    return findings;
}

namespace {

using EdgeFilter = std::function<bool(int, int)>;

void orient_by_invariance_impl(DiscoveryResult& result, const CiFn& ci,
                               const DiscoveryConfig& cfg, const EdgeFilter& allowed) {
    auto& g = result.graph;
    if (!g.has_surrogate()) return;
    const int c_node = g.surrogate();
    const int m = result.observed_count();

    for (int k = 0; k < g.size(); ++k)
        if (k != c_node && g.undirected(k, c_node)) {
            g.orient(c_node, k);
            log_orientation(result, "invariance", c_node, k, "surrogate edges point outward");
        }

    for (int k = 0; k < m; ++k) {
        if (!g.adjacent(k, c_node)) continue;
        for (int l = 0; l < m; ++l) {
            if (l == k || !g.undirected(k, l) || g.adjacent(l, c_node)) continue;
            if (!allowed(k, l)) continue;
            // Separating sets of (l, C); normally one is on record from the
            // skeleton phase.
            std::vector<std::vector<int>> sep_sets;
            const auto it = result.sepsets.find(key(l, c_node));
            if (it != result.sepsets.end()) {
                sep_sets.push_back(it->second);
            } else {
                // No record: search neighbors of l for separating sets.
                std::vector<int> pool;
                for (int v : g.neighbors(l))
                    if (v != c_node) pool.push_back(v);
                for (int size = 0; size <= cfg.max_cond_size; ++size)
                    for (auto& s : subsets_of_size(pool, size)) {
                        const CITestResult t = ci(l, c_node, s);
                        log_ci(result, "invariance", l, c_node, s, t,
                               t.p_value > cfg.alpha_ci ? "separating set" : "dependent");
                        if (t.p_value > cfg.alpha_ci) sep_sets.push_back(s);
                    }
            }
            if (sep_sets.empty()) continue;
            bool saw_excluding = false, saw_including = false;
            for (const auto& s : sep_sets) {
                if (std::find(s.begin(), s.end(), k) == s.end())
                    saw_excluding = true;
                else
                    saw_including = true;
            }
            if (saw_excluding && saw_including) {
                log_note(result, "invariance",
                         "conflicting invariance evidence on " + g.name(k) + " - " + g.name(l) +
                             "; left undirected");
                continue;
            }
            const int from = saw_excluding ? l : k;
            const int to = saw_excluding ? k : l;
            if (g.orienting_creates_cycle(from, to)) {
                log_note(result, "invariance", "orienting " + g.name(from) + " -> " + g.name(to) +
                                                   " would close a cycle; left undirected");
                continue;
            }
            g.orient(from, to);
            log_orientation(result, "invariance", from, to,
                            saw_excluding ? "separating set of (V_l, C) excludes V_k"
                                          : "separating set of (V_l, C) includes V_k");
        }
    }
    result.refresh_changing_modules();
}

void orient_by_independent_changes_impl(DiscoveryResult& result, const ScoreFn& scores,
                                        const DiscoveryConfig& cfg, const EdgeFilter& allowed) {
    auto& g = result.graph;
    if (!g.has_surrogate()) return;
    const int c_node = g.surrogate();
    const int m = result.observed_count();

    auto changing = [&](int v) { return g.adjacent(v, c_node); };
    std::map<std::pair<int, int>, bool> all_dependent;
    std::map<std::pair<int, int>, int> evaluations;

    auto candidate_blocks = [&](int a, int b, int n) {
        // Unions Z1 u Z2n with |Z1| + |Z2n| = n, deconfounding sets and
        // potential-set subsets anchored at either endpoint.
        std::vector<std::vector<int>> blocks;
        std::set<std::vector<int>> seen;
        for (auto [l, k] : {std::pair{a, b}, std::pair{b, a}}) {
            const auto z1s = minimal_deconfounding_sets(g, l, k, true);
            const auto z2s = minimal_potential_deconfounding_sets(g, l, k, true);
            for (const auto& z1 : z1s) {
                const int need = n - static_cast<int>(z1.size());
                if (need < 0) continue;
                std::vector<std::vector<int>> extensions;
                if (need == 0) {
                    extensions.push_back({});
                } else {
                    for (const auto& z2 : z2s) {
                        std::vector<int> usable;
                        for (int v : z2)
                            if (std::find(z1.begin(), z1.end(), v) == z1.end()) usable.push_back(v);
                        for (auto& sub : subsets_of_size(usable, need)) extensions.push_back(sub);
                    }
                }
                for (const auto& ext : extensions) {
                    std::vector<int> z = z1;
                    z.insert(z.end(), ext.begin(), ext.end());
                    std::sort(z.begin(), z.end());
                    if (seen.insert(z).second) blocks.push_back(z);
                }
            }
        }
        return blocks;
    };

    auto max_cardinality = [&](int a, int b) {
        int best = -1;
        for (auto [l, k] : {std::pair{a, b}, std::pair{b, a}}) {
            const auto z1s = minimal_deconfounding_sets(g, l, k, true);
            const auto z2s = minimal_potential_deconfounding_sets(g, l, k, true);
            int z2_max = 0;
            for (const auto& z2 : z2s) z2_max = std::max(z2_max, static_cast<int>(z2.size()));
            for (const auto& z1 : z1s)
                best = std::max(best, static_cast<int>(z1.size()) + z2_max);
        }
        return best;
    };

    for (int n = 0; n <= m; ++n) {
        bool any_candidates = false;
        bool restart = true;
        while (restart) {
            restart = false;
            std::vector<std::pair<int, int>> pairs;
            for (int a = 0; a < m; ++a)
                for (int b = a + 1; b < m; ++b)
                    if (g.undirected(a, b) && changing(a) && changing(b) && allowed(a, b))
                        pairs.emplace_back(a, b);
            for (auto [a, b] : pairs) {
                if (!g.undirected(a, b)) continue;  // oriented earlier in this sweep
                if (max_cardinality(a, b) >= n) any_candidates = true;
                for (const auto& z : candidate_blocks(a, b, n)) {
                    auto [fwd, bwd] = scores(a, b, z);
                    AuditEntry e;
                    e.kind = AuditEntry::Kind::dependence;
                    e.stage = "independent-changes";
                    e.i = a;
                    e.j = b;
                    e.cond = z;
                    e.statistic = fwd.delta;
                    e.statistic_backward = bwd.delta;
                    e.degenerate = fwd.degenerate || bwd.degenerate;
                    const DirectionDecision d = decide_direction(fwd, bwd, cfg.alpha_dep);
                    ++evaluations[key(a, b)];
                    const bool dependent_both =
                        !fwd.degenerate && !bwd.degenerate && fwd.delta > cfg.alpha_dep &&
                        bwd.delta > cfg.alpha_dep;
                    auto dep_it = all_dependent.find(key(a, b));
                    if (dep_it == all_dependent.end())
                        all_dependent[key(a, b)] = dependent_both;
                    else
                        dep_it->second = dep_it->second && dependent_both;

                    int from = -1, to = -1;
                    switch (d) {
                        case DirectionDecision::forward: from = a; to = b; break;
                        case DirectionDecision::backward: from = b; to = a; break;
                        case DirectionDecision::confounded: e.decision = "both dependent"; break;
                        case DirectionDecision::undecided: e.decision = "undecided"; break;
                    }
                    if (from >= 0) {
                        if (g.orienting_creates_cycle(from, to)) {
                            e.decision = "decisive but cycle-blocked";
                            result.audit_log.push_back(std::move(e));
                            continue;
                        }
                        e.decision = g.name(from) + " -> " + g.name(to);
                        result.audit_log.push_back(std::move(e));
                        g.orient(from, to);
                        log_orientation(result, "independent-changes", from, to,
                                        "independent-change scores with Z=" + set_string(z));
                        // Undirected edges from potential-set members become
                        // parent edges of the pair.
                        for (int v : z)
                            for (int endpoint : {a, b})
                                if (g.undirected(v, endpoint) &&
                                    !g.orienting_creates_cycle(v, endpoint)) {
                                    g.orient(v, endpoint);
                                    log_orientation(result, "independent-changes", v, endpoint,
                                                    "potential deconfounder adjacent to oriented pair");
                                }
                        restart = true;
                        break;
                    }
                    result.audit_log.push_back(std::move(e));
                }
                if (restart) break;
            }
        }
        if (!any_candidates && n > 0) break;
    }

    for (const auto& [pair, dependent] : all_dependent) {
        if (!dependent || !g.undirected(pair.first, pair.second)) continue;
        PseudoConfounderFinding f;
        f.a = pair.first;
        f.b = pair.second;
        f.adjacent = true;
        f.detail = "confounded: all measured modules dependent (" +
                   std::to_string(evaluations[pair]) + " evaluations)";
        result.pseudo_confounded_pairs.push_back(f);
        log_note(result, "independent-changes",
                 "pair (" + g.name(pair.first) + "," + g.name(pair.second) + ") " + f.detail);
    }
    result.refresh_changing_modules();
}

EdgeFilter allow_all() {
    return [](int, int) { return true; };
}

void check_stage_invariants(const DiscoveryResult& before, const DiscoveryResult& after,
                            const std::string& stage) {
    const auto& ga = after.graph;
    if (!ga.directed_part_acyclic())
        throw std::logic_error(stage + ": directed part became cyclic");
    if (ga.has_surrogate() && !ga.parents(ga.surrogate()).empty())
        throw std::logic_error(stage + ": edge oriented toward the surrogate");
    const auto& gb = before.graph;
    for (int i = 0; i < gb.size(); ++i)
        for (int j = i + 1; j < gb.size(); ++j)
            if (gb.adjacent(i, j) != ga.adjacent(i, j))
                throw std::logic_error(stage + ": adjacency changed by an orientation stage");
}

}  // namespace

void orient_by_invariance(DiscoveryResult& result, const CiFn& ci, const DiscoveryConfig& cfg) {
    const DiscoveryResult before = result;
    orient_by_invariance_impl(result, ci, cfg, allow_all());
    check_stage_invariants(before, result, "invariance");
}

void orient_by_independent_changes(DiscoveryResult& result, const ScoreFn& scores,
                                   const DiscoveryConfig& cfg) {
    const DiscoveryResult before = result;
    orient_by_independent_changes_impl(result, scores, cfg, allow_all());
    check_stage_invariants(before, result, "independent-changes");
}

DiscoveryResult discover_with(int m, const CiFn& ci, const ScoreFn& scores,
                              const DiscoveryConfig& cfg, std::vector<std::string> names) {
    DiscoveryResult result = skeleton_search(m, ci, cfg, std::move(names));
    detect_pseudo_confounders(result, ci, cfg);
    orient_by_invariance(result, ci, cfg);
    orient_by_independent_changes(result, scores, cfg);
    const DiscoveryResult before = result;
    result.graph = meek_orient(result.graph);
    check_stage_invariants(before, result, "meek");
    result.refresh_changing_modules();
    return result;
}

DiscoveryResult discover(const Dataset& data, const DiscoveryConfig& cfg) {
    data.validate();
    CiConfig ci_cfg;
    ci_cfg.null_method = cfg.null_method;
    ci_cfg.epsilon_scale = cfg.kci_epsilon_scale;
    ci_cfg.kernel_width = cfg.kernel_width;
    ci_cfg.seed = cfg.seed;
    ScoreConfig score_cfg;
    score_cfg.kind = cfg.score_kind;
    score_cfg.kernel_width = cfg.kernel_width;
    score_cfg.seed = cfg.seed;
    return discover_with(data.m(), make_ci_fn(data, ci_cfg), make_score_fn(data, score_cfg), cfg,
                         data.names);
}

Dataset unroll_series(const Dataset& series, int max_lag) {
    series.validate();
    if (series.context_kind != ContextKind::time)
        throw std::invalid_argument("lagged discovery: series must be time-indexed");
    const int t_len = series.n();
    const int m = series.m();
    const int p = max_lag;
    if (p < 1) throw std::invalid_argument("lagged discovery: max lag must be >= 1");
    if (t_len <= 10 * (p + 1))
        throw std::invalid_argument("lagged discovery: series too short for requested lag");
    const int rows = t_len - p;
    Dataset unit;
    unit.values = Matrix(rows, m * (p + 1));
    unit.context = Matrix(rows, 1);
    unit.context_kind = ContextKind::time;
    for (int t = 0; t < rows; ++t) unit.context(t, 0) = t + 1;
    for (int block = 0; block < p + 1; ++block) {
        const int lag = p - block;
        for (int v = 0; v < m; ++v) {
            unit.values.col(block * m + v) = series.values.col(v).segment(block, rows);
            unit.names.push_back(series.names[v] +
                                 (lag == 0 ? "(t)" : "(t-" + std::to_string(lag) + ")"));
        }
    }
    return unit;
}

DiscoveryResult lagged_discover(const Dataset& series, int max_lag, const DiscoveryConfig& cfg) {
    cfg.validate();
    const Dataset unit = unroll_series(series, max_lag);
    const int m = series.m();
    const int p = max_lag;
    const int n_unit = m * (p + 1);
    const int c_node = n_unit;

    CiConfig ci_cfg;
    ci_cfg.null_method = cfg.null_method;
    ci_cfg.epsilon_scale = cfg.kci_epsilon_scale;
    ci_cfg.kernel_width = cfg.kernel_width;
    ci_cfg.seed = cfg.seed;
    const CiFn ci = make_ci_fn(unit, ci_cfg);

    auto names = unit.names;
    names.push_back("C");
    DiscoveryResult result{MixedGraph::complete(n_unit + 1, names, c_node)};
    auto& g = result.graph;
    auto newest = [&](int v) { return p * m + v; };
    auto block_of = [&](int node) { return node / m; };
    auto var_of = [&](int node) { return node % m; };

    // Step 2: changing modules, tested on the newest block and propagated to
    // every lag copy.
    if (cfg.use_context) {
        for (int level = 0; level <= cfg.max_cond_size; ++level) {
            std::vector<std::pair<int, int>> removals;
            bool any_pool = false;
            for (int i = 0; i < m; ++i) {
                const int node = newest(i);
                if (!g.adjacent(node, c_node)) continue;
                std::vector<int> pool;
                for (int v = 0; v < m; ++v)
                    if (v != i && g.adjacent(node, newest(v))) pool.push_back(newest(v));
                if (static_cast<int>(pool.size()) >= level) any_pool = true;
                for (auto& s : subsets_of_size(pool, level)) {
                    const CITestResult t = ci(node, c_node, s);
                    const bool independent = t.p_value > cfg.alpha_ci;
                    log_ci(result, "lagged-changing", node, c_node, s, t,
                           independent ? "independent: stationary module" : "dependent");
                    if (independent) {
                        removals.emplace_back(i, 0);
                        result.sepsets[key(node, c_node)] = s;
                        break;
                    }
                }
            }
            for (auto [i, unused] : removals)
                for (int block = 0; block <= p; ++block) g.remove_edge(block * m + i, c_node);
            if (!any_pool) break;
        }
    } else {
        for (int node = 0; node < n_unit; ++node) g.remove_edge(node, c_node);
    }

    // Step 3: lagged skeleton. Each cross-block pair is decided on its
    // newest representative and the removal propagates to all shifts.
    for (int level = 0; level <= cfg.max_cond_size; ++level) {
        std::vector<std::vector<int>> adj(n_unit + 1);
        for (int v = 0; v <= n_unit; ++v) adj[v] = g.neighbors(v);
        std::vector<std::pair<int, int>> removals;
        bool any_pool = false;
        for (int lag = 1; lag <= p; ++lag) {
            for (int i = 0; i < m; ++i) {
                for (int j = 0; j < m; ++j) {
                    const int node_new = newest(i);
                    const int node_old = (p - lag) * m + j;
                    if (!g.adjacent(node_new, node_old)) continue;
                    const bool c_allowed = cfg.use_context && (g.adjacent(node_new, c_node) ||
                                                               g.adjacent(node_old, c_node));
                    std::set<std::vector<int>> tested;
                    bool removed = false;
                    for (int side : {node_new, node_old}) {
                        const int other = side == node_new ? node_old : node_new;
                        std::vector<int> pool;
                        for (int v : adj[side])
                            if (v != other && v != c_node) pool.push_back(v);
                        if (c_allowed) pool.push_back(c_node);
                        if (static_cast<int>(pool.size()) >= level) any_pool = true;
                        for (auto& s : subsets_of_size(pool, level)) {
                            if (removed || !tested.insert(s).second) continue;
                            const CITestResult t = ci(node_new, node_old, s);
                            const bool independent = t.p_value > cfg.alpha_ci;
                            log_ci(result, "lagged-skeleton", node_new, node_old, s, t,
                                   independent ? "independent: remove lag edge" : "dependent");
                            if (independent) {
                                removals.emplace_back(node_new, node_old);
                                result.sepsets[key(node_new, node_old)] = s;
                                removed = true;
                            }
                        }
                        if (removed) break;
                    }
                }
            }
        }
        for (auto [node_new, node_old] : removals) {
            const int lag = block_of(node_new) - block_of(node_old);
            const int i = var_of(node_new), j = var_of(node_old);
            for (int k = 0; k <= p - lag; ++k)
                g.remove_edge((p - k) * m + i, (p - lag - k) * m + j);
        }
        if (!any_pool) break;
    }

    // Step 4: instantaneous skeleton on the newest block, conditioning
    // additionally on lagged common causes; removals propagate to all blocks.
    for (int level = 0; level <= cfg.max_cond_size; ++level) {
        std::vector<std::pair<int, int>> removals;
        bool any_pool = false;
        for (int i = 0; i < m; ++i) {
            for (int j = i + 1; j < m; ++j) {
                const int node_i = newest(i), node_j = newest(j);
                if (!g.adjacent(node_i, node_j)) continue;
                std::vector<int> lagged_common;
                for (int node = 0; node < p * m; ++node)
                    if (g.adjacent(node, node_i) && g.adjacent(node, node_j))
                        lagged_common.push_back(node);
                const bool c_allowed = cfg.use_context && (g.adjacent(node_i, c_node) ||
                                                           g.adjacent(node_j, c_node));
                std::set<std::vector<int>> tested;
                bool removed = false;
                for (int side : {node_i, node_j}) {
                    const int other = side == node_i ? node_j : node_i;
                    std::vector<int> pool;
                    for (int v = 0; v < m; ++v) {
                        const int node = newest(v);
                        if (node != side && node != other && g.adjacent(side, node))
                            pool.push_back(node);
                    }
                    for (int node : lagged_common)
                        if (std::find(pool.begin(), pool.end(), node) == pool.end())
                            pool.push_back(node);
                    if (c_allowed) pool.push_back(c_node);
                    if (static_cast<int>(pool.size()) >= level) any_pool = true;
                    for (auto& s : subsets_of_size(pool, level)) {
                        if (removed || !tested.insert(s).second) continue;
                        const CITestResult t = ci(node_i, node_j, s);
                        const bool independent = t.p_value > cfg.alpha_ci;
                        log_ci(result, "lagged-instantaneous", node_i, node_j, s, t,
                               independent ? "independent: remove instantaneous edge" : "dependent");
                        if (independent) {
                            removals.emplace_back(i, j);
                            result.sepsets[key(node_i, node_j)] = s;
                            removed = true;
                        }
                    }
                    if (removed) break;
                }
            }
        }
        for (auto [i, j] : removals)
            for (int block = 0; block <= p; ++block) g.remove_edge(block * m + i, block * m + j);
        if (!any_pool) break;
    }

    // The future cannot cause the past: orient surviving cross-block edges.
    for (int node_a = 0; node_a < n_unit; ++node_a)
        for (int node_b = 0; node_b < n_unit; ++node_b)
            if (block_of(node_a) < block_of(node_b) && g.undirected(node_a, node_b)) {
                g.orient(node_a, node_b);
                log_orientation(result, "lagged-orientation", node_a, node_b, "time order");
            }
    result.refresh_changing_modules();

    // Instantaneous orientation on the newest block, then replicated.
    auto newest_only = [&](int a, int b) {
        return block_of(a) == p && block_of(b) == p;
    };
    orient_by_invariance_impl(result, ci, cfg, newest_only);
    ScoreConfig score_cfg;
    score_cfg.kind = cfg.score_kind;
    score_cfg.kernel_width = cfg.kernel_width;
    score_cfg.seed = cfg.seed;
    orient_by_independent_changes_impl(result, make_score_fn(unit, score_cfg), cfg, newest_only);

    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (i == j || !g.directed(newest(i), newest(j))) continue;
            for (int block = 0; block < p; ++block)
                if (g.undirected(block * m + i, block * m + j)) {
                    g.orient(block * m + i, block * m + j);
                    log_orientation(result, "lagged-orientation", block * m + i, block * m + j,
                                    "replicated from newest block");
                }
        }

    if (!g.directed_part_acyclic())
        throw std::logic_error("lagged discovery: directed part became cyclic");
    result.refresh_changing_modules();
    return result;
}

}  // namespace cdnod
