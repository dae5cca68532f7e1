#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tap/sketch.hpp"

namespace tap {

enum class Estimator { C1, C2 };
enum class StopReason { ThresholdMet, MarginalGainBelowOne, Exhausted };

const char *to_string(StopReason reason);
const char *to_string(Estimator estimator);

struct StabConfig {
    double threshold = 0.0; // T, in (0, n]
    double alpha = 0.1;     // fractional error, in (0, 1)
    double delta = 0.01;    // per-set estimation failure probability
    double c = 1.0;         // sketch concentration constant
    Estimator estimator = Estimator::C2;
    bool lazy_eval = false;
    std::optional<std::uint32_t> ell_override;
    std::optional<std::uint32_t> k_override;
    bool enforce_cea_stop = true; // stop when the best marginal gain is < 1

    // Sampling presets. The default ell divides by 2*alpha^2 (the Hoeffding
    // derivation); conservative_ell drops the factor 2. Strict mode derives
    // delta = eta / n^3 instead of using `delta` directly. k defaults to
    // ceil((2+c) ln n / eps_sketch^2); k_alpha_t_preset substitutes
    // eps = alpha*T.
    bool conservative_ell = false;
    std::optional<double> eta;
    double eps_sketch = 0.25;
    bool k_alpha_t_preset = false;

    unsigned workers = 1;

    void validate(NodeId n) const;
};

struct SampleCounts {
    std::uint32_t ell;
    std::uint32_t k;
};

SampleCounts choose_sample_counts(const StabConfig &cfg, NodeId n);

struct TraceStep {
    NodeId node;
    double gain;
    double sigma_hat_after;
};

struct TapSolution {
    std::vector<NodeId> order; // seeds in selection order
    NodeSet seeds;
    double estimated_activation = 0.0; // sigma_hat(A)
    double offset = 0.0;               // O
    std::vector<TraceStep> trace;
    StopReason stopped_by = StopReason::ThresholdMet;
    std::uint64_t evaluations = 0; // marginal-gain evaluations performed
};

// Greedy loop against the oracle: while sigma_hat(A) < T - alpha*T, add the
// candidate with the largest estimated marginal gain (ties to the smallest
// node id). Dispatches to the lazy driver when cfg.lazy_eval is set.
TapSolution run_stab(const DirectedGraph &g, const InfluenceSpec &spec, const StabConfig &cfg,
                     const SketchOracle &oracle);

// CELF-style lazy variant: identical contract, maintains a priority queue
// of stale upper bounds and re-evaluates the top until fresh. Matches
// run_stab step for step when the estimate is exactly submodular on the
// visited sets; otherwise it is a heuristic accelerator.
TapSolution lazy_greedy_stab(const DirectedGraph &g, const InfluenceSpec &spec,
                             const StabConfig &cfg, const SketchOracle &oracle);

} // namespace tap
