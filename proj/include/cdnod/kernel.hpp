#pragma once

#include "cdnod/types.hpp"

#include <utility>

namespace cdnod {

/// Gram matrix of the rows of `columns` (N x d) under `spec`.
/// Gaussian entries are exp(-|x_t - x_t'|^2 / (2 width^2)); linear entries
/// are plain dot products.
Matrix gram(const Matrix& columns, const KernelSpec& spec);

/// H g H with H = I - J/N. Row and column sums of the result vanish.
Matrix center(const Matrix& g);

/// Median of pairwise Euclidean distances over a subsample of at most 1000
/// points. Deterministic given `seed`. Throws if all points coincide.
double median_heuristic(const Matrix& columns, std::uint64_t seed = 0);

/// (g + lambda I)^{-1} rhs via a symmetric factorization. The result
/// reproduces rhs to relative 1e-8 when multiplied back, else throws.
Matrix regularized_solve(const Matrix& g, double lambda, const Matrix& rhs);

/// Top-k eigenpairs of a symmetric matrix, eigenvalues descending,
/// eigenvectors unit-norm in columns.
std::pair<Vector, Matrix> eig_sym(const Matrix& m, int k);

/// Squared Euclidean distance matrix of the rows of `columns`, clamped at 0.
Matrix squared_distances(const Matrix& columns);

/// Entrywise product of per-column gaussian Grams at width_scale times each
/// column's median-heuristic width (or width_override when positive).
/// Constant columns contribute the all-ones Gram.
Matrix product_gram(const Matrix& columns, double width_scale, double width_override,
                    std::uint64_t seed);

}  // namespace cdnod
