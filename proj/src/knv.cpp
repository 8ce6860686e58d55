#include "cdnod/knv.hpp"

#include "cdnod/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace cdnod {

namespace {

Matrix scaled_gram(const Matrix& cols, double scale, double width_override, std::uint64_t seed) {
    return product_gram(cols, scale, width_override, seed);
}

}  // namespace

ModuleGram knv_module_gram(const Dataset& data, int y_index, const std::vector<int>& x_indices,
                           const KnvConfig& cfg) {
    data.validate();
    if (y_index < 0 || y_index >= data.m())
        throw std::invalid_argument("knv: target index out of range");
    for (int v : x_indices)
        if (v < 0 || v >= data.m() || v == y_index)
            throw std::invalid_argument("knv: bad parent index");

    const Matrix y = data.values.col(y_index);
    Matrix xb(data.n(), static_cast<int>(x_indices.size()));
    for (std::size_t c = 0; c < x_indices.size(); ++c)
        xb.col(static_cast<int>(c)) = data.values.col(x_indices[c]);

    const auto hp = select_embedding_hyperparams(y, xb, data.context, derive_seed(cfg.seed, 41));
    const Matrix ky = scaled_gram(y, 1.0, cfg.kernel_width, derive_seed(cfg.seed, 42));
    const Matrix kc =
        scaled_gram(data.context, hp.c_width_scale, cfg.kernel_width, derive_seed(cfg.seed, 43));
    ModuleGram ml;
    if (x_indices.empty()) {
        ml = marginal_module_gram_linear(ky, kc, hp.lambda);
    } else {
        const Matrix kx =
            scaled_gram(xb, hp.x_width_scale, cfg.kernel_width, derive_seed(cfg.seed, 44));
        ml = conditional_module_gram_linear(kx, ky, kc, hp.lambda);
    }
    ml.target = "P(" + data.names[y_index] + "|parents,C)";
    if (cfg.kind == ModuleGramKind::linear) return ml;
    double sigma2 = module_gram_sigma2(ml, derive_seed(cfg.seed, 45));
    if (!(sigma2 > 0.0)) sigma2 = 1.0;  // constant module
    return conditional_module_gram_gaussian(ml, sigma2);
}

DrivingForce estimate_driving_force(const Dataset& data, int y_index,
                                    const std::vector<int>& x_indices, int k,
                                    const KnvConfig& cfg) {
    const int n = data.n();
    if (k < 0 || k > n) throw std::invalid_argument("knv: k out of range");
    const ModuleGram mg = knv_module_gram(data, y_index, x_indices, cfg);
    const Matrix centered = center(mg.entries);

    auto [all_values, all_vectors] = eig_sym(centered, n);
    const double total = std::max(all_values.cwiseMax(0.0).sum(), 1e-300);
    const double rank_tol = 1e-12 * std::max(1.0, all_values.cwiseAbs().maxCoeff());
    int rank = 0;
    while (rank < n && all_values(rank) > rank_tol) ++rank;

    int want = k;
    if (want == 0) {
        // Smallest count capturing 90% of the centered trace, capped at 5.
        double acc = 0.0;
        for (want = 0; want < std::min(rank, 5); ) {
            acc += all_values(want);
            ++want;
            if (acc / total >= 0.9) break;
        }
        want = std::max(want, 1);
    }
    DrivingForce out;
    out.truncated = want > rank;
    const int got = std::max(std::min(want, rank), 1);
    out.eigenvalues = all_values.head(got);
    out.explained_fraction = (all_values.head(got).cwiseMax(0.0) / total).eval();
    out.components = Matrix(n, got);
    for (int c = 0; c < got; ++c)
        out.components.col(c) =
            all_vectors.col(c) * std::sqrt(std::max(all_values(c), 0.0));
    return out;
}

}  // namespace cdnod
