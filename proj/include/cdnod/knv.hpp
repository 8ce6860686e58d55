#pragma once

#include "cdnod/embedding.hpp"
#include "cdnod/types.hpp"

#include <vector>

namespace cdnod {

/// Low-dimensional driving force of a changing module: kernel-PCA of the
/// module Gram. Components carry the kernel-PCA scaling (eigenvector times
/// sqrt(eigenvalue)) and keep the original sample order of C; sign and scale
/// are not identified.
struct DrivingForce {
    Vector eigenvalues;          // k, descending
    Matrix components;           // N x k per-context scores
    Vector explained_fraction;   // k, fractions of the centered trace
    bool truncated = false;      // requested k exceeded the numerical rank
};

struct KnvConfig {
    ModuleGramKind kind = ModuleGramKind::gaussian;
    double kernel_width = 0.0;  // 0 => median heuristic
    std::uint64_t seed = 0;
};

/// Algorithm 4 (KNV): build the module Gram of y given x_indices (marginal
/// when empty), center it, eigendecompose, and return the top-k components.
/// k = 0 selects the eigenvalues capturing 90% of the centered trace, capped
/// at 5.
DrivingForce estimate_driving_force(const Dataset& data, int y_index,
                                    const std::vector<int>& x_indices, int k,
                                    const KnvConfig& cfg = {});

/// The centered module Gram KNV decomposes (exposed for tests).
ModuleGram knv_module_gram(const Dataset& data, int y_index, const std::vector<int>& x_indices,
                           const KnvConfig& cfg = {});

}  // namespace cdnod
