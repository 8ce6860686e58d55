#pragma once

#include "cdnod/graph.hpp"
#include "cdnod/synth.hpp"
#include "cdnod/types.hpp"

#include <random>

namespace cdnod::testing {

/// Chain V1 -> V2 -> V3 -> V4 with a pseudo confounder g(C) -> {V2, V4}.
GroundTruthDag fig1_truth();

/// The five-node partially oriented graph illustrating the deconfounding-set
/// definitions: V3 -> V1, V1 -> V2, V4 -> V2, V5 - V1, V5 -> V2, V3 -> V5,
/// V4 -> V5.
MixedGraph fig5_graph();

/// The worked direction-identification example: true DAG V3 -> V1 -> V2,
/// V4 -> V2, V3 -> V4, every module changing.
GroundTruthDag fig4_truth();

/// Random Erdos-Renyi DAG (direct, without going through SynthSpec).
Dag random_dag(int n, double edge_prob, std::mt19937_64& rng);

/// Pattern of a DAG plus background knowledge: skeleton, v-structure
/// orientations, and a random subset of the remaining true edge directions.
MixedGraph pattern_with_background(const Dag& dag, double background_prob, std::mt19937_64& rng);

/// Two-variable X -> Y instance with independently changing modules
/// (fully-connected changing-module setting), either regime.
Dataset two_var_changing_pair(int n, bool heterogeneous, std::uint64_t seed);

/// Two-process series with autoregressive, lagged-cross, and instantaneous
/// time-varying links (the P=1 unit-graph example). Returns a time Dataset.
Dataset lagged_two_var_series(int t_len, std::uint64_t seed);

}  // namespace cdnod::testing
