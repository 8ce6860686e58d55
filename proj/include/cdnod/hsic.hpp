#pragma once

#include "cdnod/embedding.hpp"
#include "cdnod/types.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace cdnod {

/// Biased HSIC estimate (1/(N-1)^2) tr(Mu H Mv H), clamped at 0.
double hsic(const Matrix& mu, const Matrix& mv);

/// Normalized HSIC tr(Mu H Mv H) / (tr(Mu H) tr(Mv H)); invariant to positive
/// rescaling of either Gram. Throws on a degenerate (zero centered trace)
/// module.
double hsic_normalized(const Matrix& mu, const Matrix& mv);

struct DependenceScore {
    double delta = 0.0;
    bool degenerate = false;
    std::string direction;  // e.g. "V1 -> V2 | {V3}"
};

enum class DirectionDecision { forward, backward, confounded, undecided };

struct ScoreConfig {
    ModuleGramKind kind = ModuleGramKind::gaussian;
    double kernel_width = 0.0;  // 0 => median heuristic
    std::uint64_t seed = 0;
};

/// Delta scores of the Causal Direction Determination Rule for the pair
/// (x, y) given conditioning block z: forward is the hypothesis x -> y, the
/// normalized HSIC between the marginal ModuleGram of the cause block (x, z)
/// and the conditional ModuleGram of y given (x, z); backward swaps roles.
std::pair<DependenceScore, DependenceScore> direction_scores(const Dataset& data, int x_index,
                                                             int y_index,
                                                             const std::vector<int>& cond_indices,
                                                             const ScoreConfig& cfg = {});

/// Total decision rule: forward when delta_fwd < delta_bwd and
/// delta_fwd <= alpha_dep (backward symmetric); confounded when both exceed
/// alpha_dep; undecided on degeneracy or a tie within 1e-9.
DirectionDecision decide_direction(const DependenceScore& forward, const DependenceScore& backward,
                                   double alpha_dep);

using ScoreFn = std::function<std::pair<DependenceScore, DependenceScore>(
    int l, int k, const std::vector<int>& z)>;

/// Data-backed score functor for the discovery pipeline.
ScoreFn make_score_fn(const Dataset& data, const ScoreConfig& cfg);

}  // namespace cdnod
