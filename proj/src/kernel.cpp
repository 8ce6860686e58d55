#include "cdnod/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace cdnod {

void Dataset::validate() const {
    if (values.rows() < 2) throw std::invalid_argument("dataset: need at least 2 samples");
    if (values.cols() < 1) throw std::invalid_argument("dataset: need at least 1 variable");
    if (!values.allFinite()) throw std::invalid_argument("dataset: non-finite sample values");
    if (static_cast<int>(names.size()) != values.cols())
        throw std::invalid_argument("dataset: name count does not match column count");
    if (context.rows() != values.rows())
        throw std::invalid_argument("dataset: context length does not match sample count");
    if (context.cols() < 1 || context.cols() > 2)
        throw std::invalid_argument("dataset: context must have 1 or 2 columns");
    if (!context.allFinite()) throw std::invalid_argument("dataset: non-finite context");
    if (context_kind == ContextKind::domain) {
        // Domain indices must form a contiguous set starting at 1.
        std::vector<int> seen;
        for (int t = 0; t < context.rows(); ++t) {
            double v = context(t, 0);
            int d = static_cast<int>(std::lround(v));
            if (std::abs(v - d) > 1e-9 || d < 1)
                throw std::invalid_argument("dataset: domain indices must be integers >= 1");
            if (std::find(seen.begin(), seen.end(), d) == seen.end()) seen.push_back(d);
        }
        std::sort(seen.begin(), seen.end());
        for (std::size_t i = 0; i < seen.size(); ++i)
            if (seen[i] != static_cast<int>(i) + 1)
                throw std::invalid_argument("dataset: domain indices must be contiguous from 1");
    }
}

Dataset make_time_dataset(Matrix values, std::vector<std::string> names) {
    Dataset d;
    d.context = Matrix(values.rows(), 1);
    for (int t = 0; t < values.rows(); ++t) d.context(t, 0) = t + 1;
    d.values = std::move(values);
    d.names = std::move(names);
    d.context_kind = ContextKind::time;
    return d;
}

Matrix squared_distances(const Matrix& columns) {
    const Vector sq = columns.rowwise().squaredNorm();
    Matrix d2 = sq.replicate(1, columns.rows()) + sq.transpose().replicate(columns.rows(), 1) -
                2.0 * columns * columns.transpose();
    return d2.cwiseMax(0.0);
}

Matrix gram(const Matrix& columns, const KernelSpec& spec) {
    if (columns.rows() < 1 || columns.cols() < 1)
        throw std::invalid_argument("gram: empty input");
    if (!columns.allFinite()) throw std::invalid_argument("gram: non-finite input");
    if (spec.kind == KernelSpec::Kind::linear) return columns * columns.transpose();
    if (!(spec.width > 0.0)) throw std::invalid_argument("gram: gaussian width must be > 0");
    Matrix g = (-squared_distances(columns) / (2.0 * spec.width * spec.width)).array().exp();
    // Exact symmetry and unit diagonal despite rounding in the distance matrix.
    g = 0.5 * (g + g.transpose()).eval();
    g.diagonal().setOnes();
    return g;
}

Matrix center(const Matrix& g) {
    if (g.rows() != g.cols()) throw std::invalid_argument("center: matrix must be square");
    const double n = static_cast<double>(g.rows());
    const Vector row_mean = g.rowwise().mean();
    const Vector col_mean = g.colwise().mean();
    const double total = g.mean();
    Matrix out = g;
    out.colwise() -= row_mean;
    out.rowwise() -= col_mean.transpose();
    out.array() += total;
    (void)n;
    return out;
}

double median_heuristic(const Matrix& columns, std::uint64_t seed) {
    const int n = static_cast<int>(columns.rows());
    if (n < 2) throw std::invalid_argument("median_heuristic: need at least 2 points");
    constexpr int kMaxPoints = 1000;
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    if (n > kMaxPoints) {
        std::mt19937_64 rng(derive_seed(seed, 0x6d65646eULL));
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(kMaxPoints);
        std::sort(idx.begin(), idx.end());
    }
    std::vector<double> dist;
    dist.reserve(idx.size() * (idx.size() - 1) / 2);
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a + 1; b < idx.size(); ++b)
            dist.push_back((columns.row(idx[a]) - columns.row(idx[b])).norm());
    const std::size_t mid = dist.size() / 2;
    std::nth_element(dist.begin(), dist.begin() + mid, dist.end());
    double med = dist[mid];
    if (!(med > 0.0)) {
        if (*std::max_element(dist.begin(), dist.end()) <= 0.0)
            throw std::invalid_argument("median_heuristic: all points identical");
        // Degenerate median (many ties at zero): fall back to the smallest
        // positive distance so the width stays usable.
        double smallest = std::numeric_limits<double>::infinity();
        for (double d : dist)
            if (d > 0.0) smallest = std::min(smallest, d);
        med = smallest;
    }
    return med;
}

Matrix regularized_solve(const Matrix& g, double lambda, const Matrix& rhs) {
    if (!(lambda > 0.0)) throw std::invalid_argument("regularized_solve: lambda must be > 0");
    if (g.rows() != g.cols()) throw std::invalid_argument("regularized_solve: matrix must be square");
    if (g.rows() != rhs.rows()) throw std::invalid_argument("regularized_solve: rhs shape mismatch");
    const Matrix m = g + lambda * Matrix::Identity(g.rows(), g.cols());
    Eigen::LLT<Matrix> llt(m);
    Matrix out;
    if (llt.info() == Eigen::Success) {
        out = llt.solve(rhs);
    } else {
        Eigen::LDLT<Matrix> ldlt(m);
        if (ldlt.info() != Eigen::Success)
            throw std::runtime_error("regularized_solve: factorization failed (severe conditioning)");
        out = ldlt.solve(rhs);
    }
    const double rhs_norm = rhs.norm();
    if (rhs_norm > 0.0) {
        double rel = (m * out - rhs).norm() / rhs_norm;
        if (rel > 1e-8) {
            // One step of iterative refinement before giving up.
            out += llt.info() == Eigen::Success ? llt.solve((rhs - m * out).eval())
                                                : Matrix(Eigen::LDLT<Matrix>(m).solve((rhs - m * out).eval()));
            rel = (m * out - rhs).norm() / rhs_norm;
            if (rel > 1e-8)
                throw std::runtime_error("regularized_solve: residual " + std::to_string(rel) +
                                         " exceeds 1e-8 (severe conditioning)");
        }
    }
    return out;
}

Matrix product_gram(const Matrix& columns, double width_scale, double width_override,
                    std::uint64_t seed) {
    const int n = static_cast<int>(columns.rows());
    Matrix scaled(n, 0);
    for (int c = 0; c < columns.cols(); ++c) {
        const double spread = columns.col(c).maxCoeff() - columns.col(c).minCoeff();
        if (spread <= 1e-12) continue;  // constant column: all-ones factor
        const double w = width_override > 0.0 ? width_override
                                              : median_heuristic(columns.col(c), derive_seed(seed, c));
        scaled.conservativeResize(n, scaled.cols() + 1);
        scaled.col(scaled.cols() - 1) = columns.col(c) / (width_scale * w);
    }
    if (scaled.cols() == 0) return Matrix::Ones(n, n);
    return gram(scaled, KernelSpec::gaussian(1.0));
}

std::pair<Vector, Matrix> eig_sym(const Matrix& m, int k) {
    const int n = static_cast<int>(m.rows());
    if (m.rows() != m.cols()) throw std::invalid_argument("eig_sym: matrix must be square");
    if (k < 1 || k > n) throw std::invalid_argument("eig_sym: k out of range");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
        throw std::invalid_argument("eig_sym: matrix not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
    if (es.info() != Eigen::Success) throw std::runtime_error("eig_sym: decomposition failed");
    Vector values(k);
    Matrix vectors(n, k);
    for (int i = 0; i < k; ++i) {
        values(i) = es.eigenvalues()(n - 1 - i);
        vectors.col(i) = es.eigenvectors().col(n - 1 - i);
    }
    return {values, vectors};
}

}  // namespace cdnod
