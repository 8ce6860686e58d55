#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdnod {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class ContextKind { domain, time };

/// A sample matrix plus the surrogate context vector C (domain or time index).
///
/// `context` is N x q with q = 1 in the common case; q = 2 is allowed for
/// multi-domain nonstationary data (domain index, time index), in which case
/// kernels on C are product kernels over the columns.
struct Dataset {
    Matrix values;                   // N x m
    std::vector<std::string> names;  // m labels
    Matrix context;                  // N x q, q in {1, 2}
    ContextKind context_kind = ContextKind::time;

    int n() const { return static_cast<int>(values.rows()); }
    int m() const { return static_cast<int>(values.cols()); }

    void validate() const;
};

/// Makes a time-indexed dataset with context 1..N.
Dataset make_time_dataset(Matrix values, std::vector<std::string> names);

struct KernelSpec {
    enum class Kind { gaussian, linear };
    Kind kind = Kind::gaussian;
    double width = 1.0;  // gaussian only; k(x,x') = exp(-|x-x'|^2 / (2 width^2))

    static KernelSpec gaussian(double width) { return {Kind::gaussian, width}; }
    static KernelSpec linear() { return {Kind::linear, 0.0}; }
};

/// Deterministic seed derivation (splitmix64 step) so that independent
/// consumers of one run seed never share RNG streams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace cdnod
