#include "cdnod/discovery.hpp"
#include "cdnod/io.hpp"
#include "cdnod/knv.hpp"
#include "cdnod/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <numeric>
#include <thread>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct CommonFlags {
    double alpha_ci = 0.05;
    double alpha_dep = 0.10;
    int max_cond_size = 3;
    std::string kernel_width = "median";
    std::string null_method = "gamma";
    std::uint64_t seed = 0;
    std::string audit_log;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--alpha-ci", flags.alpha_ci, "CI significance level");
    cmd->add_option("--alpha-dep", flags.alpha_dep, "module-dependence threshold");
    cmd->add_option("--max-cond-size", flags.max_cond_size, "largest conditioning set");
    cmd->add_option("--kernel-width", flags.kernel_width, "median or a positive number");
    cmd->add_option("--null", flags.null_method, "gamma or permutation");
    cmd->add_option("--seed", flags.seed, "run seed");
    cmd->add_option("--audit-log", flags.audit_log, "write the decision audit log here");
}

cdnod::DiscoveryConfig to_config(const CommonFlags& flags) {
    cdnod::DiscoveryConfig cfg;
    cfg.alpha_ci = flags.alpha_ci;
    cfg.alpha_dep = flags.alpha_dep;
    cfg.max_cond_size = flags.max_cond_size;
    cfg.seed = flags.seed;
    if (flags.kernel_width != "median") {
        cfg.kernel_width = std::stod(flags.kernel_width);
        if (!(cfg.kernel_width > 0)) throw std::invalid_argument("--kernel-width must be positive");
    }
    if (flags.null_method == "gamma")
        cfg.null_method = cdnod::NullMethod::gamma;
    else if (flags.null_method == "permutation")
        cfg.null_method = cdnod::NullMethod::permutation;
    else
        throw std::invalid_argument("--null must be gamma or permutation");
    cfg.validate();
    return cfg;
}

void maybe_write_audit(const CommonFlags& flags, const cdnod::DiscoveryResult& result) {
    if (flags.audit_log.empty()) return;
    std::ofstream out(flags.audit_log);
    if (!out) throw std::invalid_argument("cannot write audit log: " + flags.audit_log);
    out << cdnod::serialize_audit_log(result.audit_log);
}

int run_discover(const std::string& input, const std::string& output,
                 const std::string& context_col, const std::string& domains_file,
                 const std::string& context_kind, const CommonFlags& flags) {
    auto table = cdnod::read_csv(input);
    const auto kind = context_kind == "domain" ? cdnod::ContextKind::domain
                                               : cdnod::ContextKind::time;
    auto data = cdnod::dataset_from_csv(table, context_col, domains_file, kind);
    const auto cfg = to_config(flags);
    const auto result = cdnod::discover(data, cfg);
    const auto doc = cdnod::make_graph_document(result, cfg);
    cdnod::write_graph_document(output, doc);
    maybe_write_audit(flags, result);
    std::cout << cdnod::summarize(result);
    std::cout << "graph document written to " << output << "\n";
    return kExitOk;
}

int run_driving_force(const std::string& input, const std::string& output,
                      const std::string& target, const std::vector<std::string>& parents, int k,
                      const std::string& context_col, const std::string& domains_file,
                      const std::string& context_kind, const CommonFlags& flags) {
    auto table = cdnod::read_csv(input);
    const auto kind = context_kind == "domain" ? cdnod::ContextKind::domain
                                               : cdnod::ContextKind::time;
    auto data = cdnod::dataset_from_csv(table, context_col, domains_file, kind);
    auto find = [&](const std::string& name) {
        for (std::size_t i = 0; i < data.names.size(); ++i)
            if (data.names[i] == name) return static_cast<int>(i);
        std::string available;
        for (const auto& n : data.names) available += " " + n;
        throw std::invalid_argument("unknown column '" + name + "'; available:" + available);
    };
    const int y = find(target);
    std::vector<int> xs;
    for (const auto& p : parents) xs.push_back(find(p));

    cdnod::KnvConfig cfg;
    cfg.seed = flags.seed;
    if (flags.kernel_width != "median") cfg.kernel_width = std::stod(flags.kernel_width);
    const auto force = cdnod::estimate_driving_force(data, y, xs, k, cfg);
    if (force.truncated)
        std::cerr << "warning: requested " << k << " components, numerical rank allows only "
                  << force.eigenvalues.size() << "\n";

    // Plot-ready CSV ordered by context.
    std::vector<int> order(data.n());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return data.context(a, 0) < data.context(b, 0); });
    cdnod::CsvTable out_table;
    out_table.header.push_back("context");
    for (int c = 0; c < force.components.cols(); ++c)
        out_table.header.push_back("component_" + std::to_string(c + 1));
    out_table.values = cdnod::Matrix(data.n(), force.components.cols() + 1);
    for (int r = 0; r < data.n(); ++r) {
        out_table.values(r, 0) = data.context(order[r], 0);
        for (int c = 0; c < force.components.cols(); ++c)
            out_table.values(r, c + 1) = force.components(order[r], c);
    }
    cdnod::write_csv(output, out_table);

    std::cout << "eigenvalue  explained_fraction\n";
    for (int i = 0; i < force.eigenvalues.size(); ++i)
        std::cout << force.eigenvalues(i) << "  " << force.explained_fraction(i) << "\n";
    std::cout << "driving-force CSV written to " << output << "\n";
    return kExitOk;
}

int run_benchmark(const std::string& spec_path, int reps, const std::string& output,
                  bool with_ablation, const CommonFlags& flags) {
    const auto base_spec = cdnod::parse_synth_spec_file(spec_path);
    const auto cfg = to_config(flags);
    if (reps < 1) throw std::invalid_argument("--reps must be >= 1");

    struct RepRow {
        cdnod::GraphMetrics cdnod_metrics;
        cdnod::GraphMetrics ablation_metrics;
    };
    std::vector<RepRow> rows(reps);
    std::atomic<int> next{0};
    auto worker = [&]() {
        while (true) {
            const int rep = next.fetch_add(1);
            if (rep >= reps) return;
            auto spec = base_spec;
            spec.seed = cdnod::derive_seed(flags.seed, static_cast<std::uint64_t>(rep));
            const auto truth = cdnod::gen_random_dag(spec);
            const auto [data, gt] = spec.regime == cdnod::RegimeKind::heterogeneous
                                        ? cdnod::gen_heterogeneous(truth, spec)
                                        : cdnod::gen_nonstationary(truth, spec);
            auto rep_cfg = cfg;
            rep_cfg.seed = spec.seed;
            rows[rep].cdnod_metrics = cdnod::metrics(cdnod::discover(data, rep_cfg).graph, gt);
            if (with_ablation) {
                auto ablation_cfg = rep_cfg;
                ablation_cfg.use_context = false;
                rows[rep].ablation_metrics =
                    cdnod::metrics(cdnod::discover(data, ablation_cfg).graph, gt);
            }
        }
    };
    const int n_threads =
        std::max(1, std::min<int>(reps, static_cast<int>(std::thread::hardware_concurrency())));
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::vector<std::string> metric_names = {"skeleton_f1",  "skeleton_precision",
                                             "skeleton_recall", "orientation_f1",
                                             "changing_f1",  "changing_precision",
                                             "changing_recall"};
    auto values_of = [](const cdnod::GraphMetrics& g) {
        return std::vector<double>{g.skeleton_f1,  g.skeleton_precision, g.skeleton_recall,
                                   g.orientation_f1, g.changing_f1,      g.changing_precision,
                                   g.changing_recall};
    };
    cdnod::CsvTable table;
    table.header.push_back("rep");
    for (const auto& name : metric_names) table.header.push_back(name);
    if (with_ablation)
        for (const auto& name : metric_names) table.header.push_back("ablation_" + name);
    const int ncol = static_cast<int>(table.header.size());
    table.values = cdnod::Matrix(reps + 2, ncol);
    for (int rep = 0; rep < reps; ++rep) {
        table.values(rep, 0) = rep;
        auto vals = values_of(rows[rep].cdnod_metrics);
        if (with_ablation) {
            auto abl = values_of(rows[rep].ablation_metrics);
            vals.insert(vals.end(), abl.begin(), abl.end());
        }
        for (std::size_t c = 0; c < vals.size(); ++c)
            table.values(rep, static_cast<int>(c) + 1) = vals[c];
    }
    // Summary rows: mean then stddev (marked in the rep column as -1 / -2).
    for (int c = 1; c < ncol; ++c) {
        double mean = table.values.col(c).head(reps).mean();
        double var = 0.0;
        for (int rep = 0; rep < reps; ++rep)
            var += (table.values(rep, c) - mean) * (table.values(rep, c) - mean);
        var = reps > 1 ? var / (reps - 1) : 0.0;
        table.values(reps, c) = mean;
        table.values(reps + 1, c) = std::sqrt(var);
    }
    table.values(reps, 0) = -1;
    table.values(reps + 1, 0) = -2;
    cdnod::write_csv(output, table);
    std::cout << "benchmark summary (mean over " << reps << " reps):\n";
    for (int c = 1; c < ncol; ++c)
        std::cout << "  " << table.header[c] << " = " << table.values(reps, c) << "\n";
    std::cout << "benchmark table written to " << output << "\n";
    return kExitOk;
}

int run_lagged(const std::string& input, const std::string& output, int max_lag,
               const CommonFlags& flags) {
    auto table = cdnod::read_csv(input);
    auto data = cdnod::dataset_from_csv(table, "", "", cdnod::ContextKind::time);
    if (max_lag < 1) throw std::invalid_argument("--max-lag must be >= 1 (instantaneous-only runs use discover)");
    if (max_lag >= data.n() / 10)
        throw std::invalid_argument("--max-lag too large for the series length");
    const auto cfg = to_config(flags);
    const auto result = cdnod::lagged_discover(data, max_lag, cfg);
    const auto doc = cdnod::make_graph_document(result, cfg);
    cdnod::write_graph_document(output, doc);
    maybe_write_audit(flags, result);
    std::cout << cdnod::summarize(result);
    std::cout << "unit-graph document written to " << output << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CD-NOD: causal discovery from heterogeneous/nonstationary data"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto* discover_cmd = app.add_subcommand("discover", "learn a causal graph from a CSV");
    std::string input, output = "graph.json", context_col, domains_file, context_kind = "time";
    discover_cmd->add_option("--input", input, "input CSV")->required();
    discover_cmd->add_option("--output", output, "graph document path");
    discover_cmd->add_option("--context-col", context_col, "context column name");
    discover_cmd->add_option("--domains-file", domains_file, "per-row domain index file");
    discover_cmd->add_option("--context-kind", context_kind, "domain or time");
    add_common(discover_cmd, flags);

    auto* force_cmd = app.add_subcommand("driving-force", "estimate a module's driving force");
    std::string force_input, force_output = "driving_force.csv", target;
    std::vector<std::string> parents;
    std::string force_context_col, force_domains, force_kind = "time";
    int k = 0;
    force_cmd->add_option("--input", force_input, "input CSV")->required();
    force_cmd->add_option("--output", force_output, "output CSV path");
    force_cmd->add_option("--target", target, "target column")->required();
    force_cmd->add_option("--parents", parents, "parent columns")->delimiter(',');
    force_cmd->add_option("-k,--components", k, "component count (0 = auto)");
    force_cmd->add_option("--context-col", force_context_col, "context column name");
    force_cmd->add_option("--domains-file", force_domains, "per-row domain index file");
    force_cmd->add_option("--context-kind", force_kind, "domain or time");
    add_common(force_cmd, flags);

    auto* bench_cmd = app.add_subcommand("benchmark", "generate-discover-score loop");
    std::string spec_path, bench_output = "benchmark.csv";
    int reps = 20;
    bool with_ablation = false;
    bench_cmd->add_option("--spec", spec_path, "synth spec file")->required();
    bench_cmd->add_option("--reps", reps, "number of repetitions");
    bench_cmd->add_option("--output", bench_output, "metrics table path");
    bench_cmd->add_flag("--ablation", with_ablation, "also run the PC-without-C ablation");
    add_common(bench_cmd, flags);

    auto* lagged_cmd = app.add_subcommand("lagged", "lag-unrolled discovery on a time series");
    std::string lagged_input, lagged_output = "unit_graph.json";
    int max_lag = 1;
    lagged_cmd->add_option("--input", lagged_input, "input CSV")->required();
    lagged_cmd->add_option("--output", lagged_output, "unit-graph document path");
    lagged_cmd->add_option("--max-lag", max_lag, "largest time lag P");
    add_common(lagged_cmd, flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (discover_cmd->parsed())
            return run_discover(input, output, context_col, domains_file, context_kind, flags);
        if (force_cmd->parsed())
            return run_driving_force(force_input, force_output, target, parents, k,
                                     force_context_col, force_domains, force_kind, flags);
        if (bench_cmd->parsed())
            return run_benchmark(spec_path, reps, bench_output, with_ablation, flags);
        if (lagged_cmd->parsed()) return run_lagged(lagged_input, lagged_output, max_lag, flags);
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
