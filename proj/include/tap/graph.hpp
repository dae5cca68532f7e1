#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "tap/errors.hpp"

namespace tap {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

struct Edge {
    NodeId src;
    NodeId dst;
    friend bool operator==(const Edge &, const Edge &) = default;
    friend auto operator<=>(const Edge &, const Edge &) = default;
};

// Set of node ids, kept sorted and unique.
class NodeSet {
public:
    NodeSet() = default;
    explicit NodeSet(std::vector<NodeId> ids);
    NodeSet(std::initializer_list<NodeId> ids);

    bool contains(NodeId v) const;
    void insert(NodeId v);
    std::size_t size() const { return ids_.size(); }
    bool empty() const { return ids_.empty(); }
    NodeSet unite(const NodeSet &other) const;

    const std::vector<NodeId> &ids() const { return ids_; }
    auto begin() const { return ids_.begin(); }
    auto end() const { return ids_.end(); }

    friend bool operator==(const NodeSet &, const NodeSet &) = default;

private:
    std::vector<NodeId> ids_;
};

// Immutable directed graph over dense node ids [0, n), with both adjacency
// directions materialized. Edge ids index the forward direction, sorted by
// (src, dst). Nodes deleted by remove_closed_set stay in the id space as
// tombstones: they keep their ids but are excluded from traversals and
// reach counts.
class DirectedGraph {
public:
    DirectedGraph() = default;
    DirectedGraph(NodeId node_count, std::vector<Edge> edges, bool dedup_parallel_edges = true);

    NodeId node_count() const { return n_; }
    EdgeId edge_count() const { return static_cast<EdgeId>(fwd_targets_.size()); }
    NodeId alive_count() const { return alive_count_; }
    bool has_tombstones() const { return !alive_.empty(); }
    bool is_alive(NodeId v) const { return alive_.empty() || alive_[v] != 0; }

    std::span<const NodeId> out_neighbors(NodeId u) const {
        return {fwd_targets_.data() + fwd_off_[u], fwd_targets_.data() + fwd_off_[u + 1]};
    }
    std::span<const NodeId> in_neighbors(NodeId v) const {
        return {rev_sources_.data() + rev_off_[v], rev_sources_.data() + rev_off_[v + 1]};
    }
    // Forward edge ids aligned with in_neighbors(v).
    std::span<const EdgeId> in_edge_ids(NodeId v) const {
        return {rev_edge_ids_.data() + rev_off_[v], rev_edge_ids_.data() + rev_off_[v + 1]};
    }
    // First forward edge id of u; out-edge e of u with target
    // out_neighbors(u)[j] has id first_out_edge(u) + j.
    EdgeId first_out_edge(NodeId u) const { return static_cast<EdgeId>(fwd_off_[u]); }
    NodeId edge_target(EdgeId e) const { return fwd_targets_[e]; }

    std::size_t out_degree(NodeId u) const { return fwd_off_[u + 1] - fwd_off_[u]; }
    std::size_t in_degree(NodeId v) const { return rev_off_[v + 1] - rev_off_[v]; }

    // Edges in (src, dst) order, i.e. by edge id.
    std::vector<Edge> edge_list() const;

private:
    NodeId n_ = 0;
    std::vector<std::uint64_t> fwd_off_;
    std::vector<std::uint64_t> rev_off_;
    std::vector<NodeId> fwd_targets_;
    std::vector<NodeId> rev_sources_;
    std::vector<EdgeId> rev_edge_ids_;
    std::vector<std::uint8_t> alive_; // empty means every node is alive
    NodeId alive_count_ = 0;

    friend DirectedGraph remove_closed_set(const DirectedGraph &, const NodeSet &, bool);
};

// Reusable BFS workspace; avoids an O(n) clear per traversal in hot loops.
struct BfsScratch {
    std::vector<std::uint32_t> stamp;
    std::uint32_t epoch = 0;
    std::vector<NodeId> queue;
};

// Forward-reachable closure of seeds, including the seeds themselves.
// Tombstoned nodes are never entered and never counted.
NodeSet reachable_set(const DirectedGraph &g, const NodeSet &seeds);
std::uint32_t reachable_count(const DirectedGraph &g, std::span<const NodeId> seeds);
std::uint32_t reachable_count(const DirectedGraph &g, std::span<const NodeId> seeds,
                              BfsScratch &scratch);

// Graph over the same id space with all nodes of `removed` (and incident
// edges) deleted. `removed` must be closed under forward reachability.
DirectedGraph remove_closed_set(const DirectedGraph &g, const NodeSet &removed,
                                bool check_closed = kContractChecks);

// G(n, p): every ordered pair (u, v), u != v, gets an edge independently
// with probability edge_prob. Uses geometric skipping, so sparse graphs
// cost O(m) rather than O(n^2).
DirectedGraph generate_er(NodeId n, double edge_prob, std::uint64_t rng_seed);

// Preferential attachment. Each arriving node attaches edges_per_node
// edges to existing nodes with probability proportional to current degree;
// every attachment is stored as a bidirectional pair of directed edges.
DirectedGraph generate_ba(NodeId n, NodeId edges_per_node, std::uint64_t rng_seed);

} // namespace tap
