#pragma once

#include "cdnod/types.hpp"

#include <functional>
#include <vector>

namespace cdnod {

enum class NullMethod { permutation, gamma };

struct CITestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    int conditioning_size = 0;
    bool degenerate = false;            // constant input column
    bool unconditional_fallback = false;  // constant conditioning set
};

struct CiConfig {
    NullMethod null_method = NullMethod::gamma;
    int n_permutations = 500;
    int n_null_samples = 2000;       // spectral simulation draws (conditional audit null)
    double epsilon_scale = 1e-3;     // KCI regression regularizer: eps = scale * N
    double kernel_width = 0.0;       // 0 => median heuristic per column
    std::uint64_t seed = 0;
};

/// HSIC independence test between x and y (each N x d). The statistic is the
/// biased HSIC estimate on centered gaussian Grams with median-heuristic
/// widths; the null is a moment-matched gamma approximation or a seeded
/// permutation distribution of y.
CITestResult test_independence(const Matrix& x, const Matrix& y, const CiConfig& cfg = {});

/// KCI-style conditional independence test of x and y given z. Centered
/// Grams of x and y are residualized on z through the kernel-regression
/// projection R = eps (Kz + eps I)^{-1}; the statistic is
/// (1/N) tr(K_{x|z} K_{y|z}). The null is gamma moment matching by default,
/// or a spectral simulation of the weighted chi-square limit when the
/// permutation method is requested. A constant z falls back to the
/// unconditional test with a flag.
CITestResult test_conditional_independence(const Matrix& x, const Matrix& y, const Matrix& z,
                                           const CiConfig& cfg = {});

/// Cached conditional-independence tester over a dataset. Node indices are
/// 0..m-1 for observed columns and m for the surrogate context. Per-column
/// Grams at median-heuristic widths are computed once; conditioning-set Grams
/// are entrywise products of member Grams.
class CiTester {
public:
    CiTester(const Dataset& data, const CiConfig& cfg);

    CITestResult test(int i, int j, const std::vector<int>& cond) const;

    int context_index() const { return m_; }

private:
    const Matrix& column_gram(int v) const;

    int n_ = 0;
    int m_ = 0;
    CiConfig cfg_;
    std::vector<Matrix> grams_;          // per column, context last
    std::vector<Matrix> wide_grams_;     // doubled-width variants for the KCI augmentation
    std::vector<bool> column_constant_;  // degenerate columns (size m+1)
};

using CiFn = std::function<CITestResult(int i, int j, const std::vector<int>& cond)>;

/// Wraps a tester into the functor form the discovery pipeline consumes.
CiFn make_ci_fn(const Dataset& data, const CiConfig& cfg);

}  // namespace cdnod
