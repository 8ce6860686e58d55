#include "cdnod/synth.hpp"

#include "cdnod/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>

namespace cdnod {

namespace {

double f1_of(double precision, double recall) {
    if (precision + recall <= 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

double safe_ratio(int num, int den, bool both_empty) {
    if (den == 0) return both_empty ? 1.0 : 0.0;
    return static_cast<double>(num) / den;
}

struct NodeModel {
    FunctionKind fn = FunctionKind::linear;
    Vector mixture_weights;  // Dirichlet(1,1,1,1) over the four base functions
    NoiseKind noise = NoiseKind::uniform;
    double fixed_b = 1.0;  // stationary nodes
};

double base_fn(FunctionKind kind, double v) {
    switch (kind) {
        case FunctionKind::linear: return v;
        case FunctionKind::cubic: return v * v * v;
        case FunctionKind::tanh_fn: return std::tanh(v);
        case FunctionKind::sinc: return v == 0.0 ? 1.0 : std::sin(v) / v;
        default: return v;
    }
}

double apply_fn(const NodeModel& model, double v) {
    if (model.fn != FunctionKind::mixture) return base_fn(model.fn, v);
    static const FunctionKind bases[4] = {FunctionKind::linear, FunctionKind::cubic,
                                          FunctionKind::tanh_fn, FunctionKind::sinc};
    double out = 0.0;
    for (int i = 0; i < 4; ++i) out += model.mixture_weights(i) * base_fn(bases[i], v);
    return out;
}

NodeModel draw_node_model(const SynthSpec& spec, std::mt19937_64& rng) {
    NodeModel model;
    std::vector<FunctionKind> fns(spec.function_menu.begin(), spec.function_menu.end());
    std::vector<NoiseKind> noises(spec.noise_menu.begin(), spec.noise_menu.end());
    model.fn = fns[std::uniform_int_distribution<int>(0, static_cast<int>(fns.size()) - 1)(rng)];
    model.noise =
        noises[std::uniform_int_distribution<int>(0, static_cast<int>(noises.size()) - 1)(rng)];
    if (model.fn == FunctionKind::mixture) {
        model.mixture_weights = Vector(4);
        std::gamma_distribution<double> g(1.0, 1.0);
        double total = 0.0;
        for (int i = 0; i < 4; ++i) {
            model.mixture_weights(i) = g(rng);
            total += model.mixture_weights(i);
        }
        model.mixture_weights /= total;
    }
    model.fixed_b = std::uniform_real_distribution<double>(0.5, 2.5)(rng);
    return model;
}

double draw_noise(NoiseKind kind, std::mt19937_64& rng) {
    if (kind == NoiseKind::uniform)
        return std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
    return std::normal_distribution<double>(0.0, 1.0)(rng);
}

std::vector<int> topological_order(const Dag& dag) {
    std::vector<int> indeg(dag.n, 0), order;
    for (int v = 0; v < dag.n; ++v) indeg[v] = static_cast<int>(dag.parent_lists[v].size());
    auto children = dag.child_lists();
    std::vector<int> stack;
    for (int v = 0; v < dag.n; ++v)
        if (indeg[v] == 0) stack.push_back(v);
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        order.push_back(v);
        for (int c : children[v])
            if (--indeg[c] == 0) stack.push_back(c);
    }
    if (static_cast<int>(order.size()) != dag.n)
        throw std::invalid_argument("generator: ground truth graph is cyclic");
    return order;
}

/// Zero-mean GP draw over t = 1..n with the kernel as printed in the source
/// setting: exp(-0.5 |t-t'| / width^2), or the squared form when requested.
Vector gp_draw(int n, double width, bool squared, std::mt19937_64& rng) {
    Matrix k(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double d = std::abs(static_cast<double>(i - j));
            double e = squared ? d * d : d;
            k(i, j) = std::exp(-0.5 * e / (width * width));
        }
    k.diagonal().array() += 1e-8;
    Eigen::LLT<Matrix> llt(k);
    Vector z(n);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < n; ++i) z(i) = normal(rng);
    return llt.matrixL() * z;
}

Vector drift_profile(const SynthSpec& spec, int n, std::mt19937_64& rng) {
    switch (spec.drift_shape) {
        case DriftShape::step: {
            Vector b(n);
            const double lo = std::uniform_real_distribution<double>(0.5, 1.0)(rng);
            const double hi = std::uniform_real_distribution<double>(2.0, 2.5)(rng);
            for (int t = 0; t < n; ++t) b(t) = t < n / 2 ? lo : hi;
            return b;
        }
        case DriftShape::sine: {
            Vector b(n);
            const double phase = std::uniform_real_distribution<double>(0.0, 2.0 * M_PI)(rng);
            for (int t = 0; t < n; ++t)
                b(t) = 1.5 + std::sin(2.0 * M_PI * 1.5 * t / n + phase);
            return b;
        }
        default:
            return gp_draw(n, spec.gp_width, spec.gp_squared_exponential, rng);
    }
}

}  // namespace

void SynthSpec::validate() const {
    if (m < 1) throw std::invalid_argument("synth spec: m must be >= 1");
    if (edge_prob < 0.0 || edge_prob > 1.0)
        throw std::invalid_argument("synth spec: edge_prob must lie in [0, 1]");
    if (n_changing < 0 || n_changing > m)
        throw std::invalid_argument("synth spec: n_changing must lie in [0, m]");
    if (regime == RegimeKind::heterogeneous) {
        if (min_domain_size < 2 || max_domain_size < min_domain_size)
            throw std::invalid_argument("synth spec: domain sizes must satisfy 2 <= min <= max");
    } else {
        if (n_total < 50) throw std::invalid_argument("synth spec: nonstationary N must be >= 50");
        if (!(gp_width > 0.0)) throw std::invalid_argument("synth spec: gp_width must be > 0");
    }
    for (const auto& targets : confounder_targets)
        for (int t : targets)
            if (t < 0 || t >= m) throw std::invalid_argument("synth spec: confounder target out of range");
}

GroundTruthDag gen_random_dag(const SynthSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(derive_seed(spec.seed, 0x646167ULL));
    std::vector<int> order(spec.m);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    GroundTruthDag truth;
    truth.dag = Dag(spec.m);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int a = 0; a < spec.m; ++a)
        for (int b = a + 1; b < spec.m; ++b)
            if (unit(rng) < spec.edge_prob) truth.dag.add_edge(order[a], order[b]);
    std::vector<int> nodes(spec.m);
    std::iota(nodes.begin(), nodes.end(), 0);
    std::shuffle(nodes.begin(), nodes.end(), rng);
    truth.changing.assign(spec.m, false);
    for (int i = 0; i < spec.n_changing; ++i) truth.changing[nodes[i]] = true;
    truth.confounder_targets = spec.confounder_targets;
    return truth;
}

std::pair<Dataset, GroundTruthDag> gen_heterogeneous(const GroundTruthDag& dag,
                                                     const SynthSpec& spec) {
    spec.validate();
    if (dag.m() != spec.m) throw std::invalid_argument("generator: dag size mismatch");
    std::mt19937_64 rng(derive_seed(spec.seed, 0x686574ULL));

    // Partition N into domain sizes, each inside [min, max]: draw freely while
    // enough room remains, then close with one or two in-range blocks.
    std::vector<int> domain_sizes;
    int remaining = spec.n_total;
    const int lo = spec.min_domain_size, hi = spec.max_domain_size;
    if (remaining < lo) throw std::invalid_argument("generator: total below one domain");
    while (remaining > lo + hi) {
        int s = std::uniform_int_distribution<int>(lo, hi)(rng);
        s = std::min(s, remaining - lo);  // keep the tail feasible
        domain_sizes.push_back(s);
        remaining -= s;
    }
    if (remaining <= hi) {
        domain_sizes.push_back(remaining);
    } else {
        domain_sizes.push_back(remaining - lo);
        domain_sizes.push_back(lo);
    }
    const int n = spec.n_total;
    const int n_domains = static_cast<int>(domain_sizes.size());
    const auto order = topological_order(dag.dag);

    std::vector<NodeModel> models;
    models.reserve(spec.m);
    for (int v = 0; v < spec.m; ++v) models.push_back(draw_node_model(spec, rng));

    // Per-domain b (per incoming edge) and sigma for changing nodes.
    std::uniform_real_distribution<double> b_dist(0.5, 2.5), var_dist(1.0, 3.0);
    std::map<std::pair<int, int>, std::vector<double>> domain_b;  // (child, parent) -> per-domain
    std::vector<std::vector<double>> domain_sigma(spec.m);
    for (int v = 0; v < spec.m; ++v) {
        if (dag.changing[v]) {
            domain_sigma[v].resize(n_domains);
            for (int d = 0; d < n_domains; ++d) domain_sigma[v][d] = std::sqrt(var_dist(rng));
            for (int p : dag.dag.parent_lists[v]) {
                auto& bs = domain_b[{v, p}];
                bs.resize(n_domains);
                for (int d = 0; d < n_domains; ++d) bs[d] = b_dist(rng);
            }
        }
    }

    // Pseudo confounders: one constant per domain, additive on each target.
    std::vector<std::vector<double>> confounder_values(dag.confounder_targets.size());
    std::uniform_real_distribution<double> g_dist(-2.0, 2.0);
    for (auto& vals : confounder_values) {
        vals.resize(n_domains);
        for (int d = 0; d < n_domains; ++d) vals[d] = g_dist(rng);
    }

    Dataset data;
    data.values = Matrix::Zero(n, spec.m);
    data.context = Matrix(n, 1);
    data.context_kind = ContextKind::domain;
    for (int v = 0; v < spec.m; ++v) data.names.push_back("V" + std::to_string(v + 1));

    int t0 = 0;
    for (int d = 0; d < n_domains; ++d) {
        for (int t = t0; t < t0 + domain_sizes[d]; ++t) data.context(t, 0) = d + 1;
        t0 += domain_sizes[d];
    }
    for (int v_idx : order) {
        const auto& model = models[v_idx];
        for (int t = 0; t < n; ++t) {
            const int d = static_cast<int>(data.context(t, 0)) - 1;
            double value = 0.0;
            for (int p : dag.dag.parent_lists[v_idx]) {
                const double b = dag.changing[v_idx] ? domain_b[{v_idx, p}][d] : model.fixed_b;
                value += b * apply_fn(model, data.values(t, p));
            }
            const double sigma = dag.changing[v_idx] ? domain_sigma[v_idx][d] : 1.0;
            value += sigma * draw_noise(model.noise, rng);
            for (std::size_t l = 0; l < dag.confounder_targets.size(); ++l) {
                const auto& targets = dag.confounder_targets[l];
                if (std::find(targets.begin(), targets.end(), v_idx) != targets.end())
                    value += spec.confounder_strength * confounder_values[l][d];
            }
            data.values(t, v_idx) = value;
        }
    }
    return {std::move(data), dag};
}

std::pair<Dataset, GroundTruthDag> gen_nonstationary(const GroundTruthDag& dag,
                                                     const SynthSpec& spec, DriftRecord* record) {
    spec.validate();
    if (dag.m() != spec.m) throw std::invalid_argument("generator: dag size mismatch");
    std::mt19937_64 rng(derive_seed(spec.seed, 0x6e6f6eULL));
    const int n = spec.n_total;
    const auto order = topological_order(dag.dag);

    std::vector<NodeModel> models;
    models.reserve(spec.m);
    for (int v = 0; v < spec.m; ++v) models.push_back(draw_node_model(spec, rng));

    std::map<std::pair<int, int>, Vector> b_profiles;
    std::vector<Vector> sigma_profiles(spec.m);
    for (int v = 0; v < spec.m; ++v) {
        if (dag.changing[v]) {
            for (int p : dag.dag.parent_lists[v]) b_profiles[{v, p}] = drift_profile(spec, n, rng);
            if (spec.drift_shape == DriftShape::gp) {
                // |.| + 0.2 keeps the noise scale positive.
                sigma_profiles[v] = gp_draw(n, spec.gp_width, spec.gp_squared_exponential, rng)
                                        .cwiseAbs()
                                        .array() +
                                    0.2;
            } else {
                sigma_profiles[v] = Vector::Ones(n);  // override modes drift b only
            }
        }
    }

    std::vector<Vector> confounder_values(dag.confounder_targets.size());
    for (auto& vals : confounder_values)
        vals = spec.confounder_strength * gp_draw(n, spec.gp_width, spec.gp_squared_exponential, rng);

    if (record) {
        record->b = b_profiles;
        record->sigma = sigma_profiles;
    }

    Dataset data;
    data.values = Matrix::Zero(n, spec.m);
    data.context = Matrix(n, 1);
    data.context_kind = ContextKind::time;
    for (int t = 0; t < n; ++t) data.context(t, 0) = t + 1;
    for (int v = 0; v < spec.m; ++v) data.names.push_back("V" + std::to_string(v + 1));

    for (int v_idx : order) {
        const auto& model = models[v_idx];
        for (int t = 0; t < n; ++t) {
            double value = 0.0;
            for (int p : dag.dag.parent_lists[v_idx]) {
                const double b =
                    dag.changing[v_idx] ? b_profiles[{v_idx, p}](t) : model.fixed_b;
                value += b * apply_fn(model, data.values(t, p));
            }
            const double sigma = dag.changing[v_idx] ? sigma_profiles[v_idx](t) : 1.0;
            value += sigma * draw_noise(model.noise, rng);
            for (std::size_t l = 0; l < dag.confounder_targets.size(); ++l) {
                const auto& targets = dag.confounder_targets[l];
                if (std::find(targets.begin(), targets.end(), v_idx) != targets.end())
                    value += confounder_values[l](t);
            }
            data.values(t, v_idx) = value;
        }
    }
    return {std::move(data), dag};
}

Vector gp_prior_draw(int n, double width, bool squared_exponential, std::uint64_t seed) {
    if (n < 1 || !(width > 0.0)) throw std::invalid_argument("gp_prior_draw: bad arguments");
    std::mt19937_64 rng(seed);
    return gp_draw(n, width, squared_exponential, rng);
}

GraphMetrics metrics(const MixedGraph& estimated, const GroundTruthDag& truth) {
    const int m = truth.m();
    const int observed = estimated.has_surrogate() ? estimated.size() - 1 : estimated.size();
    if (observed != m) throw std::invalid_argument("metrics: node sets do not match");
    auto obs_index = [&](int i) { return i; };  // observed nodes come first by construction
    if (estimated.has_surrogate() && estimated.surrogate() != m)
        throw std::invalid_argument("metrics: surrogate must be the last node");

    int true_edges = 0, est_edges = 0, skel_hits = 0;
    int est_directed = 0, dir_hits = 0;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            const bool truth_edge = truth.dag.edge(i, j) || truth.dag.edge(j, i);
            const bool est_edge = estimated.adjacent(obs_index(i), obs_index(j));
            true_edges += truth_edge;
            est_edges += est_edge;
            skel_hits += truth_edge && est_edge;
        }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i != j && estimated.directed(obs_index(i), obs_index(j))) {
                ++est_directed;
                dir_hits += truth.dag.edge(i, j);
            }

    const auto true_changing = truth.context_adjacent();
    int true_ch = 0, est_ch = 0, ch_hits = 0;
    for (int i = 0; i < m; ++i) {
        const bool t = true_changing[i];
        const bool e = estimated.has_surrogate() && estimated.adjacent(obs_index(i), estimated.surrogate());
        true_ch += t;
        est_ch += e;
        ch_hits += t && e;
    }

    GraphMetrics out;
    out.skeleton_precision = safe_ratio(skel_hits, est_edges, true_edges == 0);
    out.skeleton_recall = safe_ratio(skel_hits, true_edges, est_edges == 0);
    out.skeleton_f1 = (true_edges == 0 && est_edges == 0)
                          ? 1.0
                          : f1_of(out.skeleton_precision, out.skeleton_recall);
    const double dir_precision = safe_ratio(dir_hits, est_directed, true_edges == 0);
    const double dir_recall = safe_ratio(dir_hits, true_edges, est_directed == 0);
    out.orientation_f1 =
        (true_edges == 0 && est_directed == 0) ? 1.0 : f1_of(dir_precision, dir_recall);
    out.changing_precision = safe_ratio(ch_hits, est_ch, true_ch == 0);
    out.changing_recall = safe_ratio(ch_hits, true_ch, est_ch == 0);
    out.changing_f1 =
        (true_ch == 0 && est_ch == 0) ? 1.0 : f1_of(out.changing_precision, out.changing_recall);
    return out;
}

CiFn oracle_ci(const GroundTruthDag& truth) {
    // The augmented graph carries no C node: each changing module gets its
    // own independent root theta_i -> V_i (the independent-changes
    // assumption), and each pseudo confounder g_l feeds its targets. The
    // surrogate stands for the whole tuple {theta_i} u {g_l}: testing
    // against C means testing against every auxiliary node, conditioning on
    // C fixes them all (they are deterministic functions of the index).
    const int m = truth.m();
    const int c_node = m;
    std::vector<int> aux_nodes;
    auto aug = std::make_shared<Dag>(0);
    {
        const int n_conf = static_cast<int>(truth.confounder_targets.size());
        int n_theta = 0;
        for (int v = 0; v < m; ++v) n_theta += truth.changing[v] ? 1 : 0;
        *aug = Dag(m + n_theta + n_conf);
        for (int v = 0; v < m; ++v)
            for (int p : truth.dag.parent_lists[v]) aug->add_edge(p, v);
        int next = m;
        for (int v = 0; v < m; ++v)
            if (truth.changing[v]) {
                aug->add_edge(next, v);
                aux_nodes.push_back(next++);
            }
        for (int l = 0; l < n_conf; ++l) {
            for (int t : truth.confounder_targets[l]) aug->add_edge(next, t);
            aux_nodes.push_back(next++);
        }
    }
    return [aug, aux_nodes, c_node](int i, int j, const std::vector<int>& cond) {
        CITestResult r;
        r.conditioning_size = static_cast<int>(cond.size());
        std::vector<int> s;
        bool cond_has_c = false;
        for (int v : cond) {
            if (v == c_node)
                cond_has_c = true;
            else
                s.push_back(v);
        }
        if (cond_has_c) s.insert(s.end(), aux_nodes.begin(), aux_nodes.end());
        bool sep;
        if (i == c_node || j == c_node) {
            const int v = i == c_node ? j : i;
            sep = true;
            for (int a : aux_nodes) sep = sep && d_separated(*aug, v, a, s);
        } else {
            sep = d_separated(*aug, i, j, s);
        }
        r.p_value = sep ? 1.0 : 0.0;
        r.statistic = sep ? 0.0 : 1.0;
        return r;
    };
}

ScoreFn oracle_direction(const GroundTruthDag& truth) {
    auto shared = std::make_shared<GroundTruthDag>(truth);
    return [shared](int l, int k, const std::vector<int>&) {
        DependenceScore fwd, bwd;
        fwd.direction = "oracle " + std::to_string(l) + " -> " + std::to_string(k);
        bwd.direction = "oracle " + std::to_string(k) + " -> " + std::to_string(l);
        bool confounded = false;
        for (const auto& targets : shared->confounder_targets) {
            const bool has_l = std::find(targets.begin(), targets.end(), l) != targets.end();
            const bool has_k = std::find(targets.begin(), targets.end(), k) != targets.end();
            if (has_l && has_k) confounded = true;
        }
        if (confounded) {
            fwd.delta = 1.0;
            bwd.delta = 1.0;
        } else if (shared->dag.edge(l, k)) {
            fwd.delta = 0.0;
            bwd.delta = 1.0;
        } else {
            fwd.delta = 1.0;
            bwd.delta = 0.0;
        }
        return std::make_pair(fwd, bwd);
    };
}

namespace {

const std::map<std::string, FunctionKind> kFunctionNames = {
    {"linear", FunctionKind::linear}, {"cubic", FunctionKind::cubic},
    {"tanh", FunctionKind::tanh_fn},  {"sinc", FunctionKind::sinc},
    {"mixture", FunctionKind::mixture}};
const std::map<std::string, NoiseKind> kNoiseNames = {{"uniform", NoiseKind::uniform},
                                                      {"gaussian", NoiseKind::gaussian}};
const std::map<std::string, DriftShape> kDriftNames = {
    {"gp", DriftShape::gp}, {"step", DriftShape::step}, {"sine", DriftShape::sine}};

template <typename T>
std::string name_of(const std::map<std::string, T>& names, T value) {
    for (const auto& [k, v] : names)
        if (v == value) return k;
    throw std::logic_error("unknown enum value");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

}  // namespace

SynthSpec parse_synth_spec(std::istream& in) {
    SynthSpec spec;
    spec.function_menu.clear();
    spec.noise_menu.clear();
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line.erase(0, line.find_first_not_of(" \t\r"));
        line.erase(line.find_last_not_of(" \t\r") + 1);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("synth spec line " + std::to_string(line_no) +
                                        ": expected key=value");
        std::string key = line.substr(0, eq), value = line.substr(eq + 1);
        key.erase(key.find_last_not_of(" \t") + 1);
        value.erase(0, value.find_first_not_of(" \t"));
        try {
            if (key == "m") spec.m = std::stoi(value);
            else if (key == "edge_prob") spec.edge_prob = std::stod(value);
            else if (key == "n_changing") spec.n_changing = std::stoi(value);
            else if (key == "regime") {
                if (value == "heterogeneous") spec.regime = RegimeKind::heterogeneous;
                else if (value == "nonstationary") spec.regime = RegimeKind::nonstationary;
                else throw std::invalid_argument("bad regime");
            } else if (key == "n_total") spec.n_total = std::stoi(value);
            else if (key == "min_domain_size") spec.min_domain_size = std::stoi(value);
            else if (key == "max_domain_size") spec.max_domain_size = std::stoi(value);
            else if (key == "gp_width") spec.gp_width = std::stod(value);
            else if (key == "gp_squared_exponential") spec.gp_squared_exponential = value == "true";
            else if (key == "drift_shape") spec.drift_shape = kDriftNames.at(value);
            else if (key == "functions")
                for (const auto& f : split(value, ',')) spec.function_menu.insert(kFunctionNames.at(f));
            else if (key == "noises")
                for (const auto& z : split(value, ',')) spec.noise_menu.insert(kNoiseNames.at(z));
            else if (key == "confounder") {
                std::vector<int> targets;
                for (const auto& t : split(value, ',')) targets.push_back(std::stoi(t) - 1);
                spec.confounder_targets.push_back(targets);
            } else if (key == "confounder_strength") spec.confounder_strength = std::stod(value);
            else if (key == "seed") spec.seed = std::stoull(value);
            else throw std::invalid_argument("unknown key '" + key + "'");
        } catch (const std::out_of_range&) {
            throw std::invalid_argument("synth spec line " + std::to_string(line_no) +
                                        ": bad value '" + value + "' for key '" + key + "'");
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("synth spec line " + std::to_string(line_no) + ": " +
                                        e.what());
        }
    }
    if (spec.function_menu.empty())
        spec.function_menu = {FunctionKind::linear, FunctionKind::cubic, FunctionKind::tanh_fn,
                              FunctionKind::sinc, FunctionKind::mixture};
    if (spec.noise_menu.empty()) spec.noise_menu = {NoiseKind::uniform, NoiseKind::gaussian};
    spec.validate();
    return spec;
}

SynthSpec parse_synth_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open synth spec file: " + path);
    return parse_synth_spec(in);
}

std::string serialize_synth_spec(const SynthSpec& spec) {
    std::ostringstream out;
    out << "m=" << spec.m << "\n";
    out << "edge_prob=" << spec.edge_prob << "\n";
    out << "n_changing=" << spec.n_changing << "\n";
    out << "regime=" << (spec.regime == RegimeKind::heterogeneous ? "heterogeneous" : "nonstationary")
        << "\n";
    out << "n_total=" << spec.n_total << "\n";
    out << "min_domain_size=" << spec.min_domain_size << "\n";
    out << "max_domain_size=" << spec.max_domain_size << "\n";
    out << "gp_width=" << spec.gp_width << "\n";
    out << "gp_squared_exponential=" << (spec.gp_squared_exponential ? "true" : "false") << "\n";
    out << "drift_shape=" << name_of(kDriftNames, spec.drift_shape) << "\n";
    out << "functions=";
    bool first = true;
    for (auto f : spec.function_menu) {
        if (!first) out << ",";
        out << name_of(kFunctionNames, f);
        first = false;
    }
    out << "\n";
    out << "noises=";
    first = true;
    for (auto z : spec.noise_menu) {
        if (!first) out << ",";
        out << name_of(kNoiseNames, z);
        first = false;
    }
    out << "\n";
    for (const auto& targets : spec.confounder_targets) {
        out << "confounder=";
        for (std::size_t i = 0; i < targets.size(); ++i) {
            if (i) out << ",";
            out << targets[i] + 1;
        }
        out << "\n";
    }
    out << "confounder_strength=" << spec.confounder_strength << "\n";
    out << "seed=" << spec.seed << "\n";
    return out.str();
}

}  // namespace cdnod
