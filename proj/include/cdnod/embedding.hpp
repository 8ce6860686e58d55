#pragma once

#include "cdnod/types.hpp"

#include <string>

namespace cdnod {

enum class ModuleGramKind { linear, gaussian };

/// N x N Gram matrix over context values of an embedded (conditional or
/// marginal) distribution module.
struct ModuleGram {
    Matrix entries;
    ModuleGramKind kind = ModuleGramKind::linear;
    std::string target;  // which module P(.|., C) this represents
    int clamped = 0;     // gaussian kind: negative squared distances clamped at 0
};

/// Linear-kernel Gram of the conditional-module embeddings mu_{Y,X|C=c}:
///   (1/N^2) Kc [Kx^3 (.) (A Ky A)] Kc,  A = (Kx (.) Kc + lambda I)^{-1},
/// with (.) the entrywise product and Kx^3 the three-fold matrix product.
ModuleGram conditional_module_gram_linear(const Matrix& kx, const Matrix& ky, const Matrix& kc,
                                          double lambda);

/// Gaussian-kernel Gram induced by a linear ModuleGram:
///   entry (c,c') = exp(-(ml(c,c) + ml(c',c') - 2 ml(c,c')) / (2 sigma2^2)).
/// Unit diagonal; tiny negative squared distances are clamped and counted,
/// and the call fails if more than 1% of entries clamp.
ModuleGram conditional_module_gram_gaussian(const ModuleGram& ml, double sigma2);

/// Linear-kernel Gram of the marginal-module embeddings mu_{Y|C=c}:
///   Kc (Kc + lambda I)^{-1} Ky (Kc + lambda I)^{-1} Kc.
ModuleGram marginal_module_gram_linear(const Matrix& ky, const Matrix& kc, double lambda);

/// Same exponential map as the conditional version (marginal modules share it).
ModuleGram marginal_module_gram_gaussian(const ModuleGram& ml, double sigma2);

/// Median of the pairwise embedding distances induced by a linear ModuleGram;
/// the default sigma2 for the gaussian map. Returns 0 for a constant module.
double module_gram_sigma2(const ModuleGram& ml, std::uint64_t seed = 0);

struct EmbeddingHyperparams {
    double lambda = 0.1;
    double x_width_scale = 1.0;  // multiplier on per-column median widths
    double c_width_scale = 1.0;
    double log_marginal_likelihood = 0.0;
};

/// Selects lambda and the Kx/Kc width scales by maximizing the Gaussian-process
/// marginal likelihood of y given (x, c) over a small grid; x may be empty
/// (marginal case: likelihood of each y column given c alone). When
/// `allow_flat`, the context grid includes the flat kernel Kc = 1 — the
/// maximum-likelihood description of a stationary module, under which the
/// embeddings stop varying with C entirely. Consumers that must stay
/// sensitive to noise-scale drift (invisible to the regression likelihood)
/// disable it.
EmbeddingHyperparams select_embedding_hyperparams(const Matrix& y, const Matrix& x,
                                                  const Matrix& c, std::uint64_t seed = 0,
                                                  bool allow_flat = true);

}  // namespace cdnod
