#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tap/influence.hpp"

namespace tap {

// One bottom-k entry: the rank of the node-world pair it summarizes.
// Entries carry their pair tag so merge dedup is exact rather than relying
// on float equality; ties in rank order by (node, world).
struct SketchEntry {
    double rank;
    NodeId node;
    std::uint32_t world;

    friend bool operator==(const SketchEntry &, const SketchEntry &) = default;
};

inline bool entry_less(const SketchEntry &a, const SketchEntry &b) {
    if (a.rank != b.rank)
        return a.rank < b.rank;
    if (a.node != b.node)
        return a.node < b.node;
    return a.world < b.world;
}

// Bottom-k of a pair-rank multiset, ascending, at most k entries.
struct Sketch {
    std::vector<SketchEntry> entries;
    std::uint32_t k = 0;

    bool saturated() const { return entries.size() >= k; }
    std::size_t size() const { return entries.size(); }
};

struct ThresholdRank {
    double gamma = 1.0;
    bool saturated = false;
};

// gamma_A = max X_A when |X_A| = k, else 1.
ThresholdRank threshold_rank(const Sketch &x, std::uint32_t k);

// Per-node sketches over all ell residual worlds, plus the offset O that
// recovers sigma_hat = tau_hat + O.
class SketchOracle {
public:
    SketchOracle() = default;
    SketchOracle(NodeId n, std::uint32_t k, std::uint32_t ell, double offset,
                 std::uint64_t rank_seed, std::vector<Sketch> per_node);

    NodeId node_count() const { return n_; }
    std::uint32_t k() const { return k_; }
    std::uint32_t ell() const { return ell_; }
    double offset() const { return offset_; }
    std::uint64_t rank_seed() const { return rank_seed_; }
    const Sketch &sketch(NodeId u) const;
    Sketch empty_sketch() const { return Sketch{{}, k_}; }

private:
    NodeId n_ = 0;
    std::uint32_t k_ = 0;
    std::uint32_t ell_ = 0;
    double offset_ = 0.0;
    std::uint64_t rank_seed_ = 0;
    std::vector<Sketch> per_node_;
};

// Builds X_u = bottom-k over all pairs (v, i) with v reachable from u in
// H_i. Each world is scanned in ascending rank order with a pruned reverse
// BFS per pair (pruning against the world-local sketch, which is the sound
// prune), and the per-world bottom-k sets merge exactly into the combined
// sketches. With workers > 1 the worlds are partitioned and the partial
// sketches merged in fixed order; the resulting oracle is identical.
SketchOracle build_oracles(std::span<const SampledWorld> worlds, std::uint32_t k,
                           std::uint64_t rank_seed, unsigned workers = 1);

// Samples each world on demand, absorbs it into the sketches and discards
// it; equivalent to build_oracles over sample_worlds(g, spec, ell,
// world_seed) but with O(n k) memory per worker instead of ell resident
// graphs.
SketchOracle build_oracles_streaming(const DirectedGraph &g, const InfluenceSpec &spec,
                                     std::uint32_t ell, std::uint32_t k,
                                     std::uint64_t rank_seed, std::uint64_t world_seed,
                                     unsigned workers = 1);

// Bottom-k of the union with duplicate pairs counted once; O(k).
Sketch merge_sketch(const Sketch &a, const Sketch &b);

// Estimator C1: (k-1)/(ell*gamma) when saturated; the exact count |X|/ell
// otherwise (the bottom-k convention; the saturated formula is vacuous for
// small reach sets).
double c1_estimate(const Sketch &x, const SketchOracle &oracle);

// Estimator C2: inverse-threshold sum over distinct pairs in the seeds'
// sketches, each seed contributing everything below its own threshold
// entry. Lower variance than C1 for large seed sets.
double c2_estimate(const NodeSet &seeds, const SketchOracle &oracle);

// Exact average residual reach size over the worlds (test oracle).
double tau_exact(const NodeSet &seeds, std::span<const SampledWorld> worlds);

// Oracle persistence: magic "TAPO", version u32, n u64, ell u64, k u32,
// offset f64, rank_seed u64, then per node a u16 length followed by that
// many (f64 rank, u32 node, u32 world) records in ascending rank order.
void save_oracle(const SketchOracle &oracle, const std::filesystem::path &path);
SketchOracle load_oracle(const std::filesystem::path &path);

} // namespace tap
