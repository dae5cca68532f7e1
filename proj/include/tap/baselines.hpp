#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include "tap/exact.hpp"
#include "tap/stab.hpp"

namespace tap {

struct EvalReport {
    double mean_activation = 0.0;
    double std_error = 0.0;
    std::uint32_t samples = 0;
    double normalized = 0.0; // mean / T when a threshold is supplied
};

// Mean and standard error of simulate_cascade over num_samples independent
// runs. Per-cascade streams derive from (rng_seed, sample index) and counts
// accumulate as integers, so the result is identical for any worker count.
EvalReport evaluate_seed_set(const DirectedGraph &g, const InfluenceSpec &spec,
                             const NodeSet &seeds, std::uint32_t num_samples,
                             std::uint64_t rng_seed, double threshold = 0.0,
                             unsigned workers = 1);

struct CelfConfig {
    double threshold = 0.0;
    std::uint32_t mc_samples = 1000; // cascades per gain evaluation
    std::uint64_t rng_seed = 0;
    double time_limit_seconds = 3600.0; // returns a partial result when hit
    unsigned workers = 1;
    // Test hook: replaces Monte Carlo evaluation with an exact objective.
    std::function<double(const NodeSet &)> exact_evaluator;
};

// Monte Carlo lazy greedy for TAP: every gain evaluation is a fresh MC
// estimate, and the loop stops once the estimated activation reaches T.
TapSolution celf_tap(const DirectedGraph &g, const InfluenceSpec &spec, const CelfConfig &cfg);

// Minimum-cardinality seed set with sigma(A) >= threshold under the exact
// enumeration oracle; ties resolve to the lexicographically smallest set.
NodeSet exhaustive_tap(const DirectedGraph &g, const InfluenceSpec &spec, double threshold,
                       NodeId max_nodes = 14, ExactBudget budget = {});

// Same search against the empirical objective tau(A) + O over fixed worlds.
NodeSet exhaustive_tap_worlds(std::span<const SampledWorld> worlds, double threshold,
                              NodeId max_nodes = 14);

} // namespace tap
