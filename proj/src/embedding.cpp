#include "cdnod/embedding.hpp"

#include "cdnod/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace cdnod {

namespace {

void check_square_same(const Matrix& a, const Matrix& b, const char* what) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
        throw std::invalid_argument(std::string(what) + ": Gram shape mismatch");
}

ModuleGram gaussian_from_linear(const ModuleGram& ml, double sigma2, const char* what) {
    if (ml.kind != ModuleGramKind::linear)
        throw std::invalid_argument(std::string(what) + ": input must be linear kind");
    if (!(sigma2 > 0.0)) throw std::invalid_argument(std::string(what) + ": sigma2 must be > 0");
    const int n = static_cast<int>(ml.entries.rows());
    const Vector diag = ml.entries.diagonal();
    Matrix d2 = diag.replicate(1, n) + diag.transpose().replicate(n, 1) - 2.0 * ml.entries;
    int clamped = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (d2(i, j) < 0.0) {
                if (d2(i, j) < -1e-8) ++clamped;
                d2(i, j) = 0.0;
            }
        }
    if (clamped > 0.01 * static_cast<double>(n) * n)
        throw std::runtime_error(std::string(what) + ": more than 1% of squared distances negative");
    ModuleGram out;
    out.entries = (-d2 / (2.0 * sigma2 * sigma2)).array().exp();
    out.entries = 0.5 * (out.entries + out.entries.transpose()).eval();
    out.entries.diagonal().setOnes();
    out.kind = ModuleGramKind::gaussian;
    out.target = ml.target;
    out.clamped = clamped;
    return out;
}

}  // namespace

ModuleGram conditional_module_gram_linear(const Matrix& kx, const Matrix& ky, const Matrix& kc,
                                          double lambda) {
    check_square_same(kx, ky, "conditional module gram");
    check_square_same(kx, kc, "conditional module gram");
    if (!(lambda > 0.0)) throw std::invalid_argument("conditional module gram: lambda must be > 0");
    const int n = static_cast<int>(kx.rows());
    const Matrix kxc = kx.cwiseProduct(kc);
    // A Ky A with A = (Kx . Kc + lambda I)^{-1}
    const Matrix s1 = regularized_solve(kxc, lambda, ky);
    const Matrix aya = regularized_solve(kxc, lambda, s1.transpose()).transpose();
    const Matrix kx3 = kx * kx * kx;
    Matrix inner = kx3.cwiseProduct(0.5 * (aya + aya.transpose()));
    ModuleGram out;
    out.entries = (kc * inner * kc) / (static_cast<double>(n) * n);
    out.entries = 0.5 * (out.entries + out.entries.transpose()).eval();
    out.kind = ModuleGramKind::linear;
    return out;
}

ModuleGram conditional_module_gram_gaussian(const ModuleGram& ml, double sigma2) {
    return gaussian_from_linear(ml, sigma2, "conditional module gram gaussian");
}

ModuleGram marginal_module_gram_linear(const Matrix& ky, const Matrix& kc, double lambda) {
    check_square_same(ky, kc, "marginal module gram");
    if (!(lambda > 0.0)) throw std::invalid_argument("marginal module gram: lambda must be > 0");
    const Matrix s1 = regularized_solve(kc, lambda, ky);
    const Matrix aya = regularized_solve(kc, lambda, s1.transpose()).transpose();
    ModuleGram out;
    out.entries = kc * 0.5 * (aya + aya.transpose()) * kc;
    out.entries = 0.5 * (out.entries + out.entries.transpose()).eval();
    out.kind = ModuleGramKind::linear;
    return out;
}

ModuleGram marginal_module_gram_gaussian(const ModuleGram& ml, double sigma2) {
    return gaussian_from_linear(ml, sigma2, "marginal module gram gaussian");
}

double module_gram_sigma2(const ModuleGram& ml, std::uint64_t seed) {
    if (ml.kind != ModuleGramKind::linear)
        throw std::invalid_argument("module_gram_sigma2: input must be linear kind");
    const int n = static_cast<int>(ml.entries.rows());
    const Vector diag = ml.entries.diagonal();
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    if (n > 1000) {
        std::mt19937_64 rng(derive_seed(seed, 0x73696732ULL));
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(1000);
    }
    std::vector<double> d;
    d.reserve(idx.size() * (idx.size() - 1) / 2);
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
            double sq = diag(idx[a]) + diag(idx[b]) - 2.0 * ml.entries(idx[a], idx[b]);
            d.push_back(std::sqrt(std::max(sq, 0.0)));
        }
    const std::size_t mid = d.size() / 2;
    std::nth_element(d.begin(), d.begin() + mid, d.end());
    return d[mid];
}

EmbeddingHyperparams select_embedding_hyperparams(const Matrix& y, const Matrix& x,
                                                  const Matrix& c, std::uint64_t seed,
                                                  bool allow_flat) {
    const int n = static_cast<int>(y.rows());
    if (c.rows() != n || (x.cols() > 0 && x.rows() != n))
        throw std::invalid_argument("select_embedding_hyperparams: length mismatch");
    // Standardized targets keep the likelihood comparable across candidates.
    Matrix ys = y;
    for (int col = 0; col < ys.cols(); ++col) {
        const double mean = ys.col(col).mean();
        ys.col(col).array() -= mean;
        const double sd = std::sqrt(ys.col(col).squaredNorm() / n);
        if (sd > 0.0) ys.col(col) /= sd;
    }

    auto scaled_gram = [&](const Matrix& cols, double scale, std::uint64_t salt) {
        return product_gram(cols, scale, 0.0, derive_seed(seed, salt));
    };

    const std::vector<double> width_scales = {0.5, 1.0, 2.0};
    std::vector<double> c_scales = {0.25, 0.5, 1.0, 2.0, 8.0};
    if (allow_flat) c_scales.push_back(std::numeric_limits<double>::infinity());
    const std::vector<double> lambdas = {0.01, 0.1, 1.0};

    EmbeddingHyperparams best;
    best.log_marginal_likelihood = -std::numeric_limits<double>::infinity();
    const std::vector<double> x_scales = x.cols() > 0 ? width_scales : std::vector<double>{1.0};
    for (double wx : x_scales) {
        Matrix kx;
        if (x.cols() > 0) kx = scaled_gram(x, wx, 100);
        for (double wc : c_scales) {
            const Matrix kc = scaled_gram(c, wc, 200);
            const Matrix k = x.cols() > 0 ? kx.cwiseProduct(kc).eval() : kc;
            for (double lambda : lambdas) {
                Eigen::LLT<Matrix> llt(k + lambda * Matrix::Identity(n, n));
                if (llt.info() != Eigen::Success) continue;
                double logdet = 0.0;
                for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
                double total = 0.0;
                for (int col = 0; col < ys.cols(); ++col) {
                    const Vector alpha = llt.solve(ys.col(col));
                    const double sigma2_hat = std::max(ys.col(col).dot(alpha) / n, 1e-12);
                    total += -0.5 * n * std::log(sigma2_hat) - 0.5 * logdet -
                             0.5 * n * (1.0 + std::log(2.0 * M_PI));
                }
                if (total > best.log_marginal_likelihood) {
                    best.log_marginal_likelihood = total;
                    best.lambda = lambda;
                    best.x_width_scale = wx;
                    best.c_width_scale = wc;
                }
            }
        }
    }
    return best;
}

}  // namespace cdnod
