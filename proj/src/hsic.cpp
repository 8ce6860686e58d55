#include "cdnod/hsic.hpp"

#include "cdnod/kernel.hpp"

#include <cmath>
#include <memory>
#include <sstream>

namespace cdnod {

namespace {

double centered_trace(const Matrix& m) {
    const double n = static_cast<double>(m.rows());
    return m.trace() - m.sum() / n;
}

double centered_trace_product(const Matrix& mu, const Matrix& mv) {
    // tr(Mu H Mv H) = sum(center(Mu) .* Mv) for symmetric inputs.
    return (center(mu).array() * mv.array()).sum();
}

constexpr double kDegenerateTraceTol = 1e-10;

}  // namespace

double hsic(const Matrix& mu, const Matrix& mv) {
    if (mu.rows() != mu.cols() || mv.rows() != mv.cols() || mu.rows() != mv.rows())
        throw std::invalid_argument("hsic: Gram shape mismatch");
    const double n = static_cast<double>(mu.rows());
    if (n < 2) throw std::invalid_argument("hsic: need at least 2 samples");
    return std::max(centered_trace_product(mu, mv) / ((n - 1.0) * (n - 1.0)), 0.0);
}

double hsic_normalized(const Matrix& mu, const Matrix& mv) {
    if (mu.rows() != mu.cols() || mv.rows() != mv.cols() || mu.rows() != mv.rows())
        throw std::invalid_argument("hsic_normalized: Gram shape mismatch");
    const double n = static_cast<double>(mu.rows());
    const double tu = centered_trace(mu);
    const double tv = centered_trace(mv);
    if (tu <= kDegenerateTraceTol * n || tv <= kDegenerateTraceTol * n)
        throw std::domain_error("hsic_normalized: degenerate module (zero centered trace)");
    return std::max(centered_trace_product(mu, mv) / (tu * tv), 0.0);
}

namespace {

struct ScoreWorkspace {
    Matrix values;
    Matrix context;
    std::uint64_t seed;
    ModuleGramKind kind;
    double width_override;
};

Matrix block_columns(const Matrix& values, const std::vector<int>& idx) {
    Matrix out(values.rows(), static_cast<int>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) out.col(static_cast<int>(c)) = values.col(idx[c]);
    return out;
}

Matrix scaled_gram(const Matrix& cols, double scale, double width_override, std::uint64_t seed) {
    return product_gram(cols, scale, width_override, seed);
}

ModuleGram to_requested_kind(ModuleGram ml, ModuleGramKind kind, std::uint64_t seed) {
    if (kind == ModuleGramKind::linear) return ml;
    double sigma2 = module_gram_sigma2(ml, seed);
    if (!(sigma2 > 0.0)) sigma2 = 1.0;  // constant module; downstream flags degeneracy
    return conditional_module_gram_gaussian(ml, sigma2);
}

/// One-sided score: dependence between P(cause block) and
/// P(effect | cause block), both embedded against the context. The
/// conditional regression selects the hyperparameters once and the marginal
/// gram shares them (the marginal likelihood of a block given C alone is
/// blind to noise-scale drift and would flatten the context kernel).
DependenceScore one_direction(const ScoreWorkspace& ws, int cause, int effect,
                              const std::vector<int>& z, const std::string& label) {
    std::vector<int> cause_block{cause};
    cause_block.insert(cause_block.end(), z.begin(), z.end());
    const Matrix xb = block_columns(ws.values, cause_block);
    const Matrix y = ws.values.col(effect);

    DependenceScore score;
    score.direction = label;

    // Noise-scale drift is invisible to the regression likelihood, so the
    // flat-context option stays off here; degeneracy is still caught through
    // the centered traces.
    const auto hp =
        select_embedding_hyperparams(y, xb, ws.context, derive_seed(ws.seed, 11), false);
    const Matrix kx = scaled_gram(xb, hp.x_width_scale, ws.width_override, derive_seed(ws.seed, 21));
    const Matrix ky = scaled_gram(y, 1.0, ws.width_override, derive_seed(ws.seed, 22));
    const Matrix kc =
        scaled_gram(ws.context, hp.c_width_scale, ws.width_override, derive_seed(ws.seed, 23));
    ModuleGram cond = conditional_module_gram_linear(kx, ky, kc, hp.lambda);
    cond.target = "P(" + std::to_string(effect) + "|block)";
    ModuleGram marg = marginal_module_gram_linear(kx, kc, hp.lambda);
    marg.target = "P(block)";

    const ModuleGram mu = to_requested_kind(std::move(marg), ws.kind, derive_seed(ws.seed, 31));
    const ModuleGram mv = to_requested_kind(std::move(cond), ws.kind, derive_seed(ws.seed, 32));
    try {
        score.delta = hsic_normalized(mu.entries, mv.entries);
    } catch (const std::domain_error&) {
        score.degenerate = true;
        score.delta = 0.0;
    }
    return score;
}

}  // namespace

std::pair<DependenceScore, DependenceScore> direction_scores(const Dataset& data, int x_index,
                                                             int y_index,
                                                             const std::vector<int>& cond_indices,
                                                             const ScoreConfig& cfg) {
    data.validate();
    if (x_index == y_index) throw std::invalid_argument("direction_scores: x and y must differ");
    for (int v : cond_indices)
        if (v == x_index || v == y_index)
            throw std::invalid_argument("direction_scores: conditioning set contains an endpoint");

    ScoreWorkspace ws{data.values, data.context, cfg.seed, cfg.kind, cfg.kernel_width};
    std::ostringstream fwd_label, bwd_label;
    fwd_label << data.names[x_index] << " -> " << data.names[y_index];
    bwd_label << data.names[y_index] << " -> " << data.names[x_index];
    DependenceScore forward = one_direction(ws, x_index, y_index, cond_indices, fwd_label.str());
    DependenceScore backward = one_direction(ws, y_index, x_index, cond_indices, bwd_label.str());
    return {forward, backward};
}

DirectionDecision decide_direction(const DependenceScore& forward, const DependenceScore& backward,
                                   double alpha_dep) {
    if (forward.degenerate || backward.degenerate) return DirectionDecision::undecided;
    if (!std::isfinite(forward.delta) || !std::isfinite(backward.delta))
        return DirectionDecision::undecided;
    if (forward.delta > alpha_dep && backward.delta > alpha_dep)
        return DirectionDecision::confounded;
    if (std::abs(forward.delta - backward.delta) <= 1e-9) return DirectionDecision::undecided;
    if (forward.delta < backward.delta && forward.delta <= alpha_dep)
        return DirectionDecision::forward;
    if (backward.delta < forward.delta && backward.delta <= alpha_dep)
        return DirectionDecision::backward;
    return DirectionDecision::undecided;
}

ScoreFn make_score_fn(const Dataset& data, const ScoreConfig& cfg) {
    auto shared = std::make_shared<Dataset>(data);
    return [shared, cfg](int l, int k, const std::vector<int>& z) {
        return direction_scores(*shared, l, k, z, cfg);
    };
}

}  // namespace cdnod
