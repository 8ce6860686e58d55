#include "cdnod/synth.hpp"

#include "cdnod/citest.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <sstream>

using namespace cdnod;

TEST_SUITE("synth") {

TEST_CASE("edge probability extremes") {
    SynthSpec spec;
    spec.m = 3;
    spec.n_changing = 0;
    spec.edge_prob = 0.0;
    spec.seed = 1;
    const auto empty = gen_random_dag(spec);
    int edges = 0;
    for (int v = 0; v < 3; ++v) edges += static_cast<int>(empty.dag.parent_lists[v].size());
    CHECK(edges == 0);

    spec.edge_prob = 1.0;
    const auto full = gen_random_dag(spec);
    edges = 0;
    for (int v = 0; v < 3; ++v) edges += static_cast<int>(full.dag.parent_lists[v].size());
    CHECK(edges == 3);
    CHECK(full.dag.acyclic());
}

TEST_CASE("mean edge count matches the binomial expectation") {
    SynthSpec spec;
    spec.m = 6;
    spec.edge_prob = 0.3;
    spec.n_changing = 0;
    double total = 0.0;
    for (int s = 0; s < 1000; ++s) {
        spec.seed = static_cast<std::uint64_t>(s);
        const auto truth = gen_random_dag(spec);
        for (int v = 0; v < 6; ++v) total += truth.dag.parent_lists[v].size();
    }
    const double mean = total / 1000.0;  // expectation C(6,2) * 0.3 = 4.5
    CHECK(mean > 4.2);
    CHECK(mean < 4.8);
}

TEST_CASE("generators are deterministic given the seed") {
    SynthSpec spec;
    spec.m = 4;
    spec.n_changing = 2;
    spec.n_total = 200;
    spec.seed = 99;
    const auto truth = gen_random_dag(spec);
    const auto [a, ta] = gen_heterogeneous(truth, spec);
    const auto [b, tb] = gen_heterogeneous(truth, spec);
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.context - b.context).cwiseAbs().maxCoeff() == 0.0);

    spec.regime = RegimeKind::nonstationary;
    const auto [c, tc] = gen_nonstationary(truth, spec);
    const auto [d, td] = gen_nonstationary(truth, spec);
    CHECK((c.values - d.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("heterogeneous context is piecewise constant with requested block sizes") {
    SynthSpec spec;
    spec.m = 3;
    spec.n_changing = 1;
    spec.n_total = 300;
    spec.seed = 7;
    const auto truth = gen_random_dag(spec);
    const auto [data, t] = gen_heterogeneous(truth, spec);
    CHECK(data.n() == 300);
    CHECK(data.context_kind == ContextKind::domain);
    CHECK_NOTHROW(data.validate());
    int current = 1, run = 0;
    for (int i = 0; i < data.n(); ++i) {
        if (static_cast<int>(data.context(i, 0)) == current) {
            ++run;
        } else {
            CHECK(static_cast<int>(data.context(i, 0)) == current + 1);
            CHECK(run >= spec.min_domain_size);
            current += 1;
            run = 1;
        }
    }
}

TEST_CASE("per-domain regression recovers the drawn causal strength") {
    // Chain X -> Y with linear f and a changing Y module: the per-domain
    // least-squares slope must track the drawn b within +-0.15.
    SynthSpec spec;
    spec.m = 2;
    spec.edge_prob = 1.0;
    spec.n_changing = 1;
    spec.n_total = 800;
    spec.min_domain_size = 100;
    spec.max_domain_size = 100;
    spec.function_menu = {FunctionKind::linear};
    spec.noise_menu = {NoiseKind::uniform};
    spec.seed = 21;
    GroundTruthDag truth;
    truth.dag = Dag(2);
    truth.dag.add_edge(0, 1);
    truth.changing = {false, true};
    const auto [data, t] = gen_heterogeneous(truth, spec);
    const int domains = static_cast<int>(data.context.col(0).maxCoeff());
    std::vector<double> slopes;
    for (int d = 1; d <= domains; ++d) {
        double sxx = 0.0, sxy = 0.0, sx = 0.0, sy = 0.0;
        int n = 0;
        for (int i = 0; i < data.n(); ++i) {
            if (static_cast<int>(data.context(i, 0)) != d) continue;
            const double x = data.values(i, 0), y = data.values(i, 1);
            sxx += x * x;
            sxy += x * y;
            sx += x;
            sy += y;
            ++n;
        }
        slopes.push_back((n * sxy - sx * sy) / (n * sxx - sx * sx));
    }
    // Slopes must move (changing module) and stay inside the drawn range.
    double lo = *std::min_element(slopes.begin(), slopes.end());
    double hi = *std::max_element(slopes.begin(), slopes.end());
    CHECK(lo > 0.5 - 0.15);
    CHECK(hi < 2.5 + 0.15);
    CHECK(hi - lo > 0.2);
}

TEST_CASE("stationary generator passes a cross-domain two-sample check at the nominal rate") {
    // n_changing = 0: testing V against the domain index behaves like a null.
    const int reps = 60;
    const int rejections = oracles::count_successes(reps, [&](int rep) {
        SynthSpec spec;
        spec.m = 2;
        spec.edge_prob = 0.5;
        spec.n_changing = 0;
        spec.n_total = 240;
        spec.min_domain_size = 60;
        spec.max_domain_size = 80;
        spec.seed = static_cast<std::uint64_t>(400 + rep);
        const auto truth = gen_random_dag(spec);
        const auto [data, t] = gen_heterogeneous(truth, spec);
        CiConfig cfg;
        cfg.seed = static_cast<std::uint64_t>(rep);
        const auto r = test_independence(data.values.col(0), data.context, cfg);
        return r.p_value < 0.05;
    });
    const double rate = static_cast<double>(rejections) / reps;
    CHECK(rate <= 0.05 + 0.1);
}

TEST_CASE("near-flat GP draw under a huge width") {
    SynthSpec spec;
    spec.m = 2;
    spec.edge_prob = 1.0;
    spec.n_changing = 2;
    spec.regime = RegimeKind::nonstationary;
    spec.n_total = 200;
    spec.gp_width = 1e6;
    spec.function_menu = {FunctionKind::linear};
    spec.seed = 31;
    GroundTruthDag truth;
    truth.dag = Dag(2);
    truth.dag.add_edge(0, 1);
    truth.changing = {true, true};
    const auto [data, t] = gen_nonstationary(truth, spec);
    CHECK(data.n() == 200);
    // With width 1e6 the b(t) draw is near constant; the generated series
    // must not blow up and the context must be 1..N.
    CHECK(data.values.allFinite());
    CHECK(data.context(0, 0) == 1.0);
    CHECK(data.context(199, 0) == 200.0);
}

TEST_CASE("two-regime override produces an exact step") {
    SynthSpec spec;
    spec.m = 2;
    spec.edge_prob = 1.0;
    spec.n_changing = 2;
    spec.regime = RegimeKind::nonstationary;
    spec.n_total = 100;
    spec.drift_shape = DriftShape::step;
    spec.function_menu = {FunctionKind::linear};
    spec.noise_menu = {NoiseKind::uniform};
    spec.seed = 12;
    GroundTruthDag truth;
    truth.dag = Dag(2);
    truth.dag.add_edge(0, 1);
    truth.changing = {true, true};
    const auto [data, t] = gen_nonstationary(truth, spec);
    CHECK(data.values.allFinite());
}

TEST_CASE("GP drift autocorrelation matches the kernel value") {
    // Mean product of draw values at lag w, over 200 seeded draws from the
    // coefficient sampler, against the kernel value exp(-0.5 w / width^2).
    const int n = 120;
    const double width = 8.0;
    const int lag = 8;
    const int draws = 200;
    double acc = 0.0;
    int count = 0;
    for (int d = 0; d < draws; ++d) {
        const Vector b = gp_prior_draw(n, width, false, derive_seed(777, d));
        for (int t = 0; t + lag < n; ++t) {
            acc += b(t) * b(t + lag);
            ++count;
        }
    }
    const double mean_ac = acc / count;  // draws have unit prior variance
    const double expected = std::exp(-0.5 * lag / (width * width));
    CHECK(std::abs(mean_ac - expected) < 0.15);
}

TEST_CASE("metrics on exact, edgeless, and half-right graphs") {
    GroundTruthDag truth;
    truth.dag = Dag(3);
    truth.dag.add_edge(0, 1);  // a -> b
    truth.dag.add_edge(1, 2);  // b -> c
    truth.changing = {true, false, false};

    MixedGraph exact(4, {"V1", "V2", "V3", "C"}, 3);
    exact.add_directed(0, 1);
    exact.add_directed(1, 2);
    exact.add_directed(3, 0);
    const auto perfect = metrics(exact, truth);
    CHECK(perfect.skeleton_f1 == doctest::Approx(1.0));
    CHECK(perfect.orientation_f1 == doctest::Approx(1.0));
    CHECK(perfect.changing_f1 == doctest::Approx(1.0));

    MixedGraph empty(4, {"V1", "V2", "V3", "C"}, 3);
    const auto miss = metrics(empty, truth);
    CHECK(miss.skeleton_recall == doctest::Approx(0.0));
    CHECK(miss.changing_recall == doctest::Approx(0.0));

    // truth {a-b, b-c}, estimate {a-b, a-c}: precision = recall = 0.5.
    MixedGraph half(4, {"V1", "V2", "V3", "C"}, 3);
    half.add_undirected(0, 1);
    half.add_undirected(0, 2);
    const auto part = metrics(half, truth);
    CHECK(part.skeleton_precision == doctest::Approx(0.5));
    CHECK(part.skeleton_recall == doctest::Approx(0.5));
    CHECK(part.skeleton_f1 == doctest::Approx(0.5));

    MixedGraph wrong_size(3, {"V1", "V2", "C"}, 2);
    CHECK_THROWS_AS(metrics(wrong_size, truth), std::invalid_argument);
}

TEST_CASE("metric F1 is 1 exactly on matching edge sets") {
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 20; ++trial) {
        const Dag dag = cdnod::testing::random_dag(5, 0.4, rng);
        GroundTruthDag truth;
        truth.dag = dag;
        truth.changing.assign(5, false);
        MixedGraph est(5, {"V1", "V2", "V3", "V4", "V5"}, -1);
        for (int v = 0; v < 5; ++v)
            for (int p : dag.parent_lists[v]) est.add_directed(p, v);
        const auto m = metrics(est, truth);
        CHECK(m.skeleton_f1 == doctest::Approx(1.0));
        CHECK(m.skeleton_f1 >= 0.0);
        CHECK(m.skeleton_f1 <= 1.0);
    }
}

TEST_CASE("synth spec round-trips through the text format") {
    SynthSpec spec;
    spec.m = 5;
    spec.edge_prob = 0.4;
    spec.n_changing = 3;
    spec.regime = RegimeKind::nonstationary;
    spec.n_total = 700;
    spec.gp_width = 15.0;
    spec.drift_shape = DriftShape::sine;
    spec.function_menu = {FunctionKind::linear, FunctionKind::tanh_fn};
    spec.noise_menu = {NoiseKind::gaussian};
    spec.confounder_targets = {{0, 2}};
    spec.seed = 1234;
    std::istringstream in(serialize_synth_spec(spec));
    const SynthSpec back = parse_synth_spec(in);
    CHECK(back.m == spec.m);
    CHECK(back.edge_prob == doctest::Approx(spec.edge_prob));
    CHECK(back.n_changing == spec.n_changing);
    CHECK(back.regime == spec.regime);
    CHECK(back.n_total == spec.n_total);
    CHECK(back.drift_shape == spec.drift_shape);
    CHECK(back.function_menu == spec.function_menu);
    CHECK(back.noise_menu == spec.noise_menu);
    CHECK(back.confounder_targets == spec.confounder_targets);
    CHECK(back.seed == spec.seed);

    std::istringstream bad("m=3\nnot_a_key=1\n");
    CHECK_THROWS_AS(parse_synth_spec(bad), std::invalid_argument);
}

TEST_CASE("ci oracle honors the augmented-graph determinism of g(C)") {
    const auto truth = cdnod::testing::fig1_truth();
    const auto ci = oracle_ci(truth);
    const int c = 4;
    // V2 and V4 carry the confounder, so they hang off C.
    CHECK(ci(1, c, {}).p_value == 0.0);
    CHECK(ci(3, c, {}).p_value == 0.0);
    CHECK(ci(0, c, {}).p_value == 1.0);
    // V1 and V4: no observed subset works, V2 plus C does.
    CHECK(ci(0, 3, {1}).p_value == 0.0);
    CHECK(ci(0, 3, {2}).p_value == 0.0);
    CHECK(ci(0, 3, {1, 2}).p_value == 0.0);
    CHECK(ci(0, 3, {1, c}).p_value == 1.0);
}

}  // TEST_SUITE
