#include "helpers.hpp"

#include <cmath>

namespace cdnod::testing {

GroundTruthDag fig1_truth() {
    GroundTruthDag truth;
    truth.dag = Dag(4);
    truth.dag.add_edge(0, 1);
    truth.dag.add_edge(1, 2);
    truth.dag.add_edge(2, 3);
    truth.changing = {false, false, false, false};
    truth.confounder_targets = {{1, 3}};
    return truth;
}

MixedGraph fig5_graph() {
    MixedGraph g(5);
    g.add_directed(2, 0);   // V3 -> V1
    g.add_directed(0, 1);   // V1 -> V2
    g.add_directed(3, 1);   // V4 -> V2
    g.add_undirected(4, 0); // V5 - V1
    g.add_directed(4, 1);   // V5 -> V2
    g.add_directed(2, 4);   // V3 -> V5
    g.add_directed(3, 4);   // V4 -> V5
    return g;
}

GroundTruthDag fig4_truth() {
    GroundTruthDag truth;
    truth.dag = Dag(4);
    truth.dag.add_edge(2, 0);  // V3 -> V1
    truth.dag.add_edge(0, 1);  // V1 -> V2
    truth.dag.add_edge(3, 1);  // V4 -> V2
    truth.dag.add_edge(2, 3);  // V3 -> V4
    truth.changing = {true, true, true, true};
    return truth;
}

Dag random_dag(int n, double edge_prob, std::mt19937_64& rng) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    Dag dag(n);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (unit(rng) < edge_prob) dag.add_edge(order[a], order[b]);
    return dag;
}

MixedGraph pattern_with_background(const Dag& dag, double background_prob, std::mt19937_64& rng) {
    MixedGraph g(dag.n);
    for (int v = 0; v < dag.n; ++v)
        for (int p : dag.parent_lists[v]) g.add_undirected(p, v);
    // V-structures of the DAG.
    for (int b = 0; b < dag.n; ++b) {
        const auto& ps = dag.parent_lists[b];
        for (std::size_t x = 0; x < ps.size(); ++x)
            for (std::size_t y = x + 1; y < ps.size(); ++y)
                if (!dag.edge(ps[x], ps[y]) && !dag.edge(ps[y], ps[x])) {
                    if (g.undirected(ps[x], b)) g.orient(ps[x], b);
                    if (g.undirected(ps[y], b)) g.orient(ps[y], b);
                }
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int v = 0; v < dag.n; ++v)
        for (int p : dag.parent_lists[v])
            if (g.undirected(p, v) && unit(rng) < background_prob) g.orient(p, v);
    return g;
}

Dataset two_var_changing_pair(int n, bool heterogeneous, std::uint64_t seed) {
    SynthSpec spec;
    spec.m = 2;
    spec.edge_prob = 1.0;
    spec.n_changing = 2;
    spec.n_total = n;
    spec.regime = heterogeneous ? RegimeKind::heterogeneous : RegimeKind::nonstationary;
    spec.seed = seed;
    GroundTruthDag truth;
    truth.dag = Dag(2);
    truth.dag.add_edge(0, 1);
    truth.changing = {true, true};
    auto [data, unused] = heterogeneous ? gen_heterogeneous(truth, spec)
                                        : gen_nonstationary(truth, spec);
    return data;
}

Dataset lagged_two_var_series(int t_len, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // Slowly varying coefficients: smooth sinusoids with random phases keep
    // every module nonstationary without hand-tuning a GP draw.
    auto drift = [&](double lo, double hi) {
        const double phase = unit(rng) * 2.0 * M_PI;
        const double cycles = 1.0 + unit(rng);
        return [=](int t) {
            const double s = 0.5 + 0.5 * std::sin(2.0 * M_PI * cycles * t / t_len + phase);
            return lo + (hi - lo) * s;
        };
    };
    auto a11 = drift(0.2, 0.8), b21 = drift(0.8, 1.6), c21 = drift(0.5, 1.2),
         d22 = drift(0.2, 0.7), s1 = drift(0.6, 1.4), s2 = drift(0.6, 1.4);
    Matrix values(t_len, 2);
    double v1_prev = normal(rng), v2_prev = normal(rng);
    for (int t = 0; t < t_len; ++t) {
        const double v1 = a11(t) * v1_prev + s1(t) * normal(rng);
        const double v2 = b21(t) * v1 + c21(t) * v1_prev + d22(t) * v2_prev + s2(t) * normal(rng);
        values(t, 0) = v1;
        values(t, 1) = v2;
        v1_prev = v1;
        v2_prev = v2;
    }
    return make_time_dataset(std::move(values), {"V1", "V2"});
}

}  // namespace cdnod::testing
