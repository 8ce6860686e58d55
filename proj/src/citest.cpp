#include "cdnod/citest.hpp"

#include "cdnod/kernel.hpp"

#include <boost/math/distributions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>

namespace cdnod {

namespace {

constexpr double kDegenerateTol = 1e-12;

bool is_constant(const Matrix& cols) {
    for (int c = 0; c < cols.cols(); ++c) {
        double lo = cols.col(c).minCoeff(), hi = cols.col(c).maxCoeff();
        if (hi - lo > kDegenerateTol) return false;
    }
    return true;
}

Matrix gaussian_gram_median(const Matrix& cols, double width_override, std::uint64_t seed,
                            double width_scale = 1.0) {
    // One shared width over the scaled columns; per-column scaling makes the
    // kernel a product of per-column gaussian kernels.
    Matrix scaled = cols;
    for (int c = 0; c < cols.cols(); ++c) {
        double w = width_override > 0.0 ? width_override : median_heuristic(cols.col(c), seed);
        scaled.col(c) /= width_scale * w;
    }
    return gram(scaled, KernelSpec::gaussian(1.0));
}

double gamma_upper_p(double stat, double mean, double var) {
    if (!(mean > 0.0) || !(var > 0.0)) return 1.0;
    const double shape = mean * mean / var;
    const double scale = var / mean;
    boost::math::gamma_distribution<double> dist(shape, scale);
    double p = boost::math::cdf(boost::math::complement(dist, std::max(stat, 0.0)));
    return std::clamp(p, 0.0, 1.0);
}

// Gamma null for the HSIC statistic tr(Kc Lc) / N on gaussian Grams with
// unit diagonal: the statistic is N times the biased HSIC estimate, so its
// null mean is (1 + mu_x mu_y - mu_x - mu_y) and its variance N^2 times the
// estimator variance.
double hsic_gamma_p(const Matrix& k, const Matrix& l, const Matrix& kc, const Matrix& lc,
                    double stat_over_n) {
    const double n = static_cast<double>(k.rows());
    const double mu_x = (k.sum() - k.trace()) / (n * (n - 1.0));
    const double mu_y = (l.sum() - l.trace()) / (n * (n - 1.0));
    const double mean = 1.0 + mu_x * mu_y - mu_x - mu_y;
    Matrix b = (kc.array() * lc.array() / 6.0).square().matrix();
    double var = (b.sum() - b.trace()) / (n * (n - 1.0));
    var *= 72.0 * n * (n - 4.0) * (n - 5.0) / ((n - 1.0) * (n - 2.0) * (n - 3.0));
    return gamma_upper_p(stat_over_n, mean, var);
}

double permutation_p(const Matrix& kc, const Matrix& lc, double observed, int n_perm,
                     std::uint64_t seed) {
    const int n = static_cast<int>(kc.rows());
    std::mt19937_64 rng(derive_seed(seed, 0x7065726dULL));
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    int at_least = 0;
    for (int it = 0; it < n_perm; ++it) {
        std::shuffle(perm.begin(), perm.end(), rng);
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s += kc(i, j) * lc(perm[i], perm[j]);
        if (s >= observed) ++at_least;
    }
    return (1.0 + at_least) / (1.0 + n_perm);
}

// Weighted chi-square null for the KCI statistic, simulated from the
// eigen-products of the residualized Grams.
double spectral_p(const Matrix& a, const Matrix& b, double stat, int n_samples,
                  std::uint64_t seed) {
    const int n = static_cast<int>(a.rows());
    Eigen::SelfAdjointEigenSolver<Matrix> ea(a), eb(b);
    const double thresh_a = 1e-10 * std::max(1.0, ea.eigenvalues().maxCoeff());
    const double thresh_b = 1e-10 * std::max(1.0, eb.eigenvalues().maxCoeff());
    std::vector<Vector> fa, fb;
    for (int i = n - 1; i >= 0; --i)
        if (ea.eigenvalues()(i) > thresh_a)
            fa.push_back(std::sqrt(ea.eigenvalues()(i)) * ea.eigenvectors().col(i));
    for (int i = n - 1; i >= 0; --i)
        if (eb.eigenvalues()(i) > thresh_b)
            fb.push_back(std::sqrt(eb.eigenvalues()(i)) * eb.eigenvectors().col(i));
    const std::size_t max_products = 512;
    std::vector<Vector> w;
    for (const auto& u : fa) {
        for (const auto& v : fb) {
            w.push_back(u.cwiseProduct(v));
            if (w.size() >= max_products) break;
        }
        if (w.size() >= max_products) break;
    }
    if (w.empty()) return 1.0;
    Matrix wt(static_cast<int>(w.size()), n);
    for (std::size_t i = 0; i < w.size(); ++i) wt.row(static_cast<int>(i)) = w[i].transpose();
    Matrix prod = wt * wt.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> ew(prod);
    std::vector<double> lambdas;
    for (int i = 0; i < prod.rows(); ++i)
        if (ew.eigenvalues()(i) > 1e-12) lambdas.push_back(ew.eigenvalues()(i));
    std::mt19937_64 rng(derive_seed(seed, 0x73706563ULL));
    std::normal_distribution<double> normal(0.0, 1.0);
    int at_least = 0;
    for (int s = 0; s < n_samples; ++s) {
        double draw = 0.0;
        for (double lam : lambdas) {
            double z = normal(rng);
            draw += lam * z * z;
        }
        if (draw / n >= stat) ++at_least;
    }
    return (1.0 + at_least) / (1.0 + n_samples);
}

CITestResult degenerate_result(int cond_size) {
    CITestResult r;
    r.statistic = 0.0;
    r.p_value = 1.0;
    r.conditioning_size = cond_size;
    r.degenerate = true;
    return r;
}

CITestResult unconditional_from_grams(const Matrix& kx, const Matrix& ky, const CiConfig& cfg) {
    const int n = static_cast<int>(kx.rows());
    const double nn = static_cast<double>(n);
    const Matrix kc = center(kx);
    const Matrix lc = center(ky);
    const double trace_prod = (kc.array() * lc.array()).sum();  // tr(Kc Lc), both symmetric
    CITestResult r;
    r.statistic = std::max(trace_prod / ((nn - 1.0) * (nn - 1.0)), 0.0);
    const double stat_over_n = trace_prod / nn;
    if (cfg.null_method == NullMethod::gamma)
        r.p_value = hsic_gamma_p(kx, ky, kc, lc, stat_over_n);
    else
        r.p_value = permutation_p(kc, lc, trace_prod, cfg.n_permutations, cfg.seed);
    return r;
}

CITestResult conditional_from_grams(const Matrix& kx, const Matrix& ky, const Matrix& kz,
                                    const Matrix& kz_wide, int cond_size, const CiConfig& cfg) {
    const int n = static_cast<int>(kx.rows());
    const double nn = static_cast<double>(n);
    Matrix kzc = center(kz);
    const double tz = kzc.trace();
    if (tz > 0.0) kzc *= nn / tz;  // trace-normalize before regularizing
    const double eps = cfg.epsilon_scale * nn;
    // KCI construction: the x kernel is augmented with the conditioning
    // variables at doubled widths (entrywise product of Grams), then both
    // sides are projected onto the kernel-regression residuals of z through
    // R = eps (Kz + eps I)^{-1}.
    const Matrix kx_aug = kx.cwiseProduct(kz_wide);
    const Matrix r_proj = eps * regularized_solve(kzc, eps, Matrix::Identity(n, n));
    const Matrix a = r_proj * center(kx_aug) * r_proj;
    const Matrix b = r_proj * center(ky) * r_proj;
    const double trace_prod = (a.array() * b.array()).sum();
    CITestResult r;
    r.conditioning_size = cond_size;
    r.statistic = std::max(trace_prod / nn, 0.0);
    if (cfg.null_method == NullMethod::gamma) {
        const double mean = a.trace() * b.trace() / nn;
        const double var = 2.0 * a.squaredNorm() * b.squaredNorm() / (nn * nn);
        r.p_value = gamma_upper_p(trace_prod, mean, var);
    } else {
        r.p_value = spectral_p(0.5 * (a + a.transpose()), 0.5 * (b + b.transpose()), r.statistic,
                               cfg.n_null_samples, cfg.seed);
    }
    return r;
}

}  // namespace

CITestResult test_independence(const Matrix& x, const Matrix& y, const CiConfig& cfg) {
    if (x.rows() != y.rows()) throw std::invalid_argument("test_independence: length mismatch");
    if (!x.allFinite() || !y.allFinite())
        throw std::invalid_argument("test_independence: non-finite input");
    if (is_constant(x) || is_constant(y)) return degenerate_result(0);
    const Matrix kx = gaussian_gram_median(x, cfg.kernel_width, derive_seed(cfg.seed, 1));
    const Matrix ky = gaussian_gram_median(y, cfg.kernel_width, derive_seed(cfg.seed, 2));
    return unconditional_from_grams(kx, ky, cfg);
}

CITestResult test_conditional_independence(const Matrix& x, const Matrix& y, const Matrix& z,
                                           const CiConfig& cfg) {
    if (x.rows() != y.rows() || x.rows() != z.rows())
        throw std::invalid_argument("test_conditional_independence: length mismatch");
    if (!x.allFinite() || !y.allFinite() || !z.allFinite())
        throw std::invalid_argument("test_conditional_independence: non-finite input");
    if (z.cols() < 1) throw std::invalid_argument("test_conditional_independence: empty z");
    if (is_constant(x) || is_constant(y)) return degenerate_result(static_cast<int>(z.cols()));
    if (is_constant(z)) {
        auto r = test_independence(x, y, cfg);
        r.unconditional_fallback = true;
        return r;
    }
    const Matrix kx = gaussian_gram_median(x, cfg.kernel_width, derive_seed(cfg.seed, 1));
    const Matrix ky = gaussian_gram_median(y, cfg.kernel_width, derive_seed(cfg.seed, 2));
    const Matrix kz = gaussian_gram_median(z, cfg.kernel_width, derive_seed(cfg.seed, 3));
    const Matrix kz_wide =
        gaussian_gram_median(z, cfg.kernel_width, derive_seed(cfg.seed, 3), 2.0);
    return conditional_from_grams(kx, ky, kz, kz_wide, static_cast<int>(z.cols()), cfg);
}

CiTester::CiTester(const Dataset& data, const CiConfig& cfg) : cfg_(cfg) {
    data.validate();
    n_ = data.n();
    m_ = data.m();
    grams_.reserve(m_ + 1);
    wide_grams_.reserve(m_ + 1);
    column_constant_.assign(m_ + 1, false);
    for (int v = 0; v < m_; ++v) {
        const Matrix col = data.values.col(v);
        if (is_constant(col)) {
            column_constant_[v] = true;
            grams_.push_back(Matrix::Ones(n_, n_));
            wide_grams_.push_back(Matrix::Ones(n_, n_));
        } else {
            grams_.push_back(gaussian_gram_median(col, cfg.kernel_width, derive_seed(cfg.seed, v)));
            wide_grams_.push_back(
                gaussian_gram_median(col, cfg.kernel_width, derive_seed(cfg.seed, v), 2.0));
        }
    }
    if (is_constant(data.context)) {
        column_constant_[m_] = true;
        grams_.push_back(Matrix::Ones(n_, n_));
        wide_grams_.push_back(Matrix::Ones(n_, n_));
    } else if (data.context_kind == ContextKind::domain) {
        // The domain index is categorical: a delta kernel makes the C tests
        // proper K-sample discrepancy checks. A two-column context (domain,
        // time) multiplies the delta factor with a gaussian time factor.
        const Matrix& ctx = data.context;
        Matrix g = Matrix::Ones(n_, n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                if (std::abs(ctx(i, 0) - ctx(j, 0)) > 1e-9) g(i, j) = 0.0;
        if (ctx.cols() > 1) {
            grams_.push_back(g.cwiseProduct(
                gaussian_gram_median(ctx.col(1), cfg.kernel_width, derive_seed(cfg.seed, m_))));
            wide_grams_.push_back(g.cwiseProduct(gaussian_gram_median(
                ctx.col(1), cfg.kernel_width, derive_seed(cfg.seed, m_), 2.0)));
        } else {
            grams_.push_back(g);
            wide_grams_.push_back(g);
        }
    } else {
        // Time index: a real-valued column with its own gaussian Gram.
        grams_.push_back(
            gaussian_gram_median(data.context, cfg.kernel_width, derive_seed(cfg.seed, m_)));
        wide_grams_.push_back(
            gaussian_gram_median(data.context, cfg.kernel_width, derive_seed(cfg.seed, m_), 2.0));
    }
}

const Matrix& CiTester::column_gram(int v) const { return grams_[v]; }

CITestResult CiTester::test(int i, int j, const std::vector<int>& cond) const {
    if (i < 0 || i > m_ || j < 0 || j > m_ || i == j)
        throw std::invalid_argument("ci test: bad variable pair");
    if (i > j) std::swap(i, j);  // the augmented side is the canonical first argument
    CiConfig cfg = cfg_;
    // Per-call seed tied to the test identity keeps results independent of
    // scheduling order.
    std::uint64_t salt = static_cast<std::uint64_t>(i) * 131 + j;
    for (int v : cond) salt = salt * 131 + static_cast<std::uint64_t>(v + 2);
    cfg.seed = derive_seed(cfg_.seed, salt);

    if (column_constant_[i] || column_constant_[j])
        return degenerate_result(static_cast<int>(cond.size()));

    std::vector<int> usable;
    for (int v : cond) {
        if (v < 0 || v > m_ || v == i || v == j)
            throw std::invalid_argument("ci test: bad conditioning variable");
        if (!column_constant_[v]) usable.push_back(v);
    }
    if (usable.empty()) {
        auto r = unconditional_from_grams(column_gram(i), column_gram(j), cfg);
        r.conditioning_size = static_cast<int>(cond.size());
        r.unconditional_fallback = !cond.empty();
        return r;
    }
    Matrix kz = column_gram(usable[0]);
    Matrix kz_wide = wide_grams_[usable[0]];
    for (std::size_t s = 1; s < usable.size(); ++s) {
        kz = kz.cwiseProduct(column_gram(usable[s]));
        kz_wide = kz_wide.cwiseProduct(wide_grams_[usable[s]]);
    }
    return conditional_from_grams(column_gram(i), column_gram(j), kz, kz_wide,
                                  static_cast<int>(cond.size()), cfg);
}

CiFn make_ci_fn(const Dataset& data, const CiConfig& cfg) {
    auto tester = std::make_shared<CiTester>(data, cfg);
    return [tester](int i, int j, const std::vector<int>& cond) {
        return tester->test(i, j, cond);
    };
}

}  // namespace cdnod
