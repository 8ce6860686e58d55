#pragma once

#include "cdnod/citest.hpp"
#include "cdnod/graph.hpp"
#include "cdnod/hsic.hpp"
#include "cdnod/types.hpp"

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <utility>

namespace cdnod {

enum class FunctionKind { linear, cubic, tanh_fn, sinc, mixture };
enum class NoiseKind { uniform, gaussian };  // U(-0.5, 0.5) or N(0, 1)
enum class DriftShape { gp, step, sine };    // coefficient drift over time

enum class RegimeKind { heterogeneous, nonstationary };

struct SynthSpec {
    int m = 6;
    double edge_prob = 0.3;
    int n_changing = 4;

    RegimeKind regime = RegimeKind::heterogeneous;
    int n_total = 600;
    // heterogeneous: per-domain sizes drawn uniformly from [min, max]
    int min_domain_size = 50;
    int max_domain_size = 100;
    // nonstationary: GP kernel width; the printed kernel uses |t-t'| in the
    // exponent, the squared form is available behind a switch
    double gp_width = 20.0;
    bool gp_squared_exponential = false;
    DriftShape drift_shape = DriftShape::gp;

    std::set<FunctionKind> function_menu = {FunctionKind::linear, FunctionKind::cubic,
                                            FunctionKind::tanh_fn, FunctionKind::sinc,
                                            FunctionKind::mixture};
    std::set<NoiseKind> noise_menu = {NoiseKind::uniform, NoiseKind::gaussian};

    // Optional pseudo confounders g_l(C): target node sets, additive terms.
    std::vector<std::vector<int>> confounder_targets;
    double confounder_strength = 1.0;

    std::uint64_t seed = 0;

    void validate() const;
};

/// Erdos-Renyi DAG via a random topological order; changing flags on a
/// uniformly random subset of size n_changing; confounder targets copied
/// from the spec.
GroundTruthDag gen_random_dag(const SynthSpec& spec);

/// Multi-domain data: per changing node and domain, b ~ U(0.5, 2.5) and
/// sigma^2 ~ U(1, 3), constant within a domain. Context is the domain index.
std::pair<Dataset, GroundTruthDag> gen_heterogeneous(const GroundTruthDag& dag,
                                                     const SynthSpec& spec);

/// Drawn coefficient profiles of one nonstationary realization, keyed by
/// (child, parent); ground truth for driving-force recovery checks.
struct DriftRecord {
    std::map<std::pair<int, int>, Vector> b;
    std::vector<Vector> sigma;
};

/// Time-indexed data: b(t) and sigma(t) drawn from a zero-mean GP (or the
/// step/sine overrides); sigma passes through |.| + 0.2. Context is 1..N.
std::pair<Dataset, GroundTruthDag> gen_nonstationary(const GroundTruthDag& dag,
                                                     const SynthSpec& spec,
                                                     DriftRecord* record = nullptr);

/// One zero-mean GP draw over t = 1..n with k(t,t') = exp(-0.5 |t-t'| /
/// width^2) as printed, or the squared form. The sampler behind the
/// nonstationary coefficient profiles.
Vector gp_prior_draw(int n, double width, bool squared_exponential, std::uint64_t seed);

struct GraphMetrics {
    double skeleton_f1 = 0.0;
    double skeleton_precision = 0.0;
    double skeleton_recall = 0.0;
    double orientation_f1 = 0.0;
    double changing_f1 = 0.0;
    double changing_precision = 0.0;
    double changing_recall = 0.0;
};

/// Precision/recall/F1 of the estimated graph against the ground truth.
/// Skeleton metrics exclude the surrogate; a directed edge counts as correct
/// only with the true arrowhead; changing-module metrics compare surrogate
/// neighbors against the true changing set. Ratios 0/0 report 1 when both
/// sides are empty, else 0.
GraphMetrics metrics(const MixedGraph& estimated, const GroundTruthDag& truth);

/// CI oracle over V plus the surrogate (index m): d-separation on the
/// augmented graph in which every confounder g_l and every changing module is
/// a child of C, with the determinism of g_l(C) honored by conditioning all
/// g_l whenever C is in the set. p-value is 1 for separated, 0 otherwise.
CiFn oracle_ci(const GroundTruthDag& truth);

/// Direction-score oracle per the module-independence assumption: the true
/// direction scores (0, 1), a truly pseudo-confounded pair scores (1, 1).
ScoreFn oracle_direction(const GroundTruthDag& truth);

/// key=value text round-trip for reproducible benchmark runs.
SynthSpec parse_synth_spec(std::istream& in);
SynthSpec parse_synth_spec_file(const std::string& path);
std::string serialize_synth_spec(const SynthSpec& spec);

}  // namespace cdnod
