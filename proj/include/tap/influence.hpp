#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "tap/graph.hpp"
#include "tap/rng.hpp"

namespace tap {

enum class TriggeringModel { IndependentCascade, LinearThreshold, Generic };

// Per-node triggering-set sampler for the generic model. Must return a
// subset of in_neighbors(v) and never v itself.
using TriggeringSampler =
    std::function<std::vector<NodeId>(const DirectedGraph &, NodeId, SplitMix64 &)>;

// Internal influence: how each node samples its triggering set. IC keeps
// each in-edge independently, LT keeps at most one, Generic delegates to a
// user-supplied sampler.
struct TriggeringSpec {
    TriggeringModel model = TriggeringModel::IndependentCascade;
    std::vector<double> edge_param; // per-edge probability (IC) or weight (LT), by edge id
    TriggeringSampler sampler;      // Generic only

    // Provenance when built from uniform parameters; used for serialization.
    std::optional<double> param_max;
    std::optional<std::uint64_t> param_seed;

    static TriggeringSpec independent_cascade(std::vector<double> edge_prob);
    static TriggeringSpec linear_threshold(std::vector<double> edge_weight);
    static TriggeringSpec generic(TriggeringSampler sampler);

    // ip_e ~ U[0, ip_max], drawn once from a dedicated stream and frozen.
    static TriggeringSpec uniform_ic(const DirectedGraph &g, double ip_max,
                                     std::uint64_t param_seed);
    // Per node v: in-weights are random proportions scaled so their sum is
    // U[0, weight_max]; weight_max <= 1 keeps the LT constraint.
    static TriggeringSpec uniform_lt(const DirectedGraph &g, double weight_max,
                                     std::uint64_t param_seed);

    void validate(const DirectedGraph &g) const;
};

// External influence: a distribution over externally activated subsets.
struct ExternalSpec {
    enum class Kind { None, IndependentBernoulli, Generic };
    Kind kind = Kind::None;
    std::vector<double> node_prob; // IndependentBernoulli, by node id
    std::function<NodeSet(NodeId, SplitMix64 &)> sampler;

    std::optional<double> param_max;
    std::optional<std::uint64_t> param_seed;

    static ExternalSpec none();
    static ExternalSpec bernoulli(std::vector<double> node_prob);
    static ExternalSpec generic(std::function<NodeSet(NodeId, SplitMix64 &)> sampler);
    // ep_u ~ U[0, ep_max], drawn once and frozen.
    static ExternalSpec uniform_bernoulli(NodeId n, double ep_max, std::uint64_t param_seed);

    void validate(NodeId n) const;
};

struct InfluenceSpec {
    TriggeringSpec trig;
    ExternalSpec ext;
    void validate(const DirectedGraph &g) const;
};

// One residual reachability instance H_i plus the size of the external
// closure that was removed from it.
struct SampledWorld {
    DirectedGraph residual;
    std::uint32_t external_reach_size = 0;
    std::uint32_t world_index = 0;
};

// Intermediate products of world construction, exposed for tests that
// check the conversion identities against the pre-removal graph.
struct WorldParts {
    DirectedGraph live;   // G_i
    NodeSet external;     // A_i^ext
    NodeSet external_closure;
    SampledWorld world;   // H_i and bookkeeping
};

// One live-edge graph G_i: IC keeps edge e with prob edge_param[e]; LT
// keeps at most one in-edge per node, edge (u,v) with prob w(u,v); Generic
// adds edges from each sampled triggering set into its node.
DirectedGraph sample_live_edge_graph(const DirectedGraph &g, const TriggeringSpec &trig,
                                     SplitMix64 &rng);

NodeSet sample_external_seeds(const ExternalSpec &ext, NodeId n, SplitMix64 &rng);

// World i uses the stream derive_stream(world_seed, i), consuming the
// live-edge sample first and the external sample second. Worlds with
// distinct indices are therefore independent and schedule-free.
WorldParts make_world_parts(const DirectedGraph &g, const InfluenceSpec &spec,
                            std::uint32_t world_index, std::uint64_t world_seed);
SampledWorld make_world(const DirectedGraph &g, const InfluenceSpec &spec,
                        std::uint32_t world_index, std::uint64_t world_seed);
std::vector<SampledWorld> sample_worlds(const DirectedGraph &g, const InfluenceSpec &spec,
                                        std::uint32_t ell, std::uint64_t world_seed,
                                        unsigned workers = 1);

// Mean external closure size over the worlds (the offset O).
double external_offset(const std::vector<SampledWorld> &worlds);

// Discrete-time activation process: seeds plus one externally sampled set
// activate at t = 0, then influence propagates per the model dynamics.
// This is the process-level oracle the reachability path is checked against.
std::uint32_t simulate_cascade(const DirectedGraph &g, const InfluenceSpec &spec,
                               const NodeSet &seeds, SplitMix64 &rng);

} // namespace tap
