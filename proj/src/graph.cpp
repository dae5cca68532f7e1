#include "tap/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tap/rng.hpp"

namespace tap {

NodeSet::NodeSet(std::vector<NodeId> ids) : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

NodeSet::NodeSet(std::initializer_list<NodeId> ids) : NodeSet(std::vector<NodeId>(ids)) {}

bool NodeSet::contains(NodeId v) const {
    return std::binary_search(ids_.begin(), ids_.end(), v);
}

void NodeSet::insert(NodeId v) {
    auto pos = std::lower_bound(ids_.begin(), ids_.end(), v);
    if (pos == ids_.end() || *pos != v)
        ids_.insert(pos, v);
}

NodeSet NodeSet::unite(const NodeSet &other) const {
    std::vector<NodeId> merged;
    merged.reserve(ids_.size() + other.ids_.size());
    std::set_union(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(),
                   std::back_inserter(merged));
    NodeSet result;
    result.ids_ = std::move(merged);
    return result;
}

DirectedGraph::DirectedGraph(NodeId node_count, std::vector<Edge> edges,
                             bool dedup_parallel_edges)
    : n_(node_count), alive_count_(node_count) {
    for (const Edge &e : edges)
        if (e.src >= n_ || e.dst >= n_)
            throw InputError("edge endpoint out of range");

    std::sort(edges.begin(), edges.end());
    if (dedup_parallel_edges)
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    if (edges.size() > std::numeric_limits<EdgeId>::max())
        throw InputError("edge count exceeds 32-bit id space");

    const std::size_t m = edges.size();
    fwd_off_.assign(n_ + 1, 0);
    rev_off_.assign(n_ + 1, 0);
    fwd_targets_.resize(m);
    rev_sources_.resize(m);
    rev_edge_ids_.resize(m);

    for (const Edge &e : edges) {
        ++fwd_off_[e.src + 1];
        ++rev_off_[e.dst + 1];
    }
    for (NodeId v = 0; v < n_; ++v) {
        fwd_off_[v + 1] += fwd_off_[v];
        rev_off_[v + 1] += rev_off_[v];
    }
    for (std::size_t e = 0; e < m; ++e)
        fwd_targets_[e] = edges[e].dst; // edges sorted by (src, dst) == edge id order

    std::vector<std::uint64_t> cursor(rev_off_.begin(), rev_off_.end() - 1);
    for (std::size_t e = 0; e < m; ++e) {
        const NodeId dst = edges[e].dst;
        const std::uint64_t slot = cursor[dst]++;
        rev_sources_[slot] = edges[e].src;
        rev_edge_ids_[slot] = static_cast<EdgeId>(e);
    }
}

std::vector<Edge> DirectedGraph::edge_list() const {
    std::vector<Edge> edges;
    edges.reserve(fwd_targets_.size());
    for (NodeId u = 0; u < n_; ++u)
        for (NodeId v : out_neighbors(u))
            edges.push_back({u, v});
    return edges;
}

namespace {

void ensure_scratch(BfsScratch &s, NodeId n) {
    if (s.stamp.size() < n)
        s.stamp.assign(n, 0);
    if (++s.epoch == 0) { // epoch wrapped; reset stamps
        std::fill(s.stamp.begin(), s.stamp.end(), 0);
        s.epoch = 1;
    }
    s.queue.clear();
}

} // namespace

std::uint32_t reachable_count(const DirectedGraph &g, std::span<const NodeId> seeds,
                              BfsScratch &scratch) {
    const NodeId n = g.node_count();
    ensure_scratch(scratch, n);
    auto &stamp = scratch.stamp;
    auto &queue = scratch.queue;
    const std::uint32_t epoch = scratch.epoch;

    for (NodeId s : seeds) {
        if (s >= n)
            throw InputError("seed id out of range");
        if (!g.is_alive(s) || stamp[s] == epoch)
            continue;
        stamp[s] = epoch;
        queue.push_back(s);
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const NodeId u = queue[head];
        for (NodeId v : g.out_neighbors(u)) {
            if (stamp[v] != epoch) {
                stamp[v] = epoch;
                queue.push_back(v);
            }
        }
    }
    return static_cast<std::uint32_t>(queue.size());
}

std::uint32_t reachable_count(const DirectedGraph &g, std::span<const NodeId> seeds) {
    BfsScratch scratch;
    return reachable_count(g, seeds, scratch);
}

NodeSet reachable_set(const DirectedGraph &g, const NodeSet &seeds) {
    BfsScratch scratch;
    reachable_count(g, seeds.ids(), scratch);
    return NodeSet(std::move(scratch.queue));
}

DirectedGraph remove_closed_set(const DirectedGraph &g, const NodeSet &removed,
                                bool check_closed) {
    for (NodeId v : removed)
        if (v >= g.node_count())
            throw InputError("removed id out of range");
    if (check_closed && reachable_set(g, removed) != removed)
        throw ContractViolation("remove_closed_set: set is not closed under forward reachability");

    DirectedGraph residual;
    residual.n_ = g.node_count();
    residual.alive_ = g.alive_.empty() ? std::vector<std::uint8_t>(g.node_count(), 1) : g.alive_;
    for (NodeId v : removed)
        residual.alive_[v] = 0;
    residual.alive_count_ = 0;
    for (NodeId v = 0; v < residual.n_; ++v)
        residual.alive_count_ += residual.alive_[v];

    std::vector<Edge> kept;
    kept.reserve(g.edge_count());
    for (NodeId u = 0; u < g.node_count(); ++u) {
        if (!residual.alive_[u])
            continue;
        for (NodeId v : g.out_neighbors(u))
            if (residual.alive_[v])
                kept.push_back({u, v});
    }
    DirectedGraph rebuilt(residual.n_, std::move(kept), false);
    rebuilt.alive_ = std::move(residual.alive_);
    rebuilt.alive_count_ = residual.alive_count_;
    return rebuilt;
}

DirectedGraph generate_er(NodeId n, double edge_prob, std::uint64_t rng_seed) {
    if (n < 1)
        throw InputError("generate_er: n must be >= 1");
    if (!(edge_prob >= 0.0 && edge_prob <= 1.0))
        throw InputError("generate_er: edge_prob must lie in [0, 1]");

    std::vector<Edge> edges;
    const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1);
    auto pair_at = [n](std::uint64_t t) {
        const NodeId u = static_cast<NodeId>(t / (n - 1));
        const NodeId r = static_cast<NodeId>(t % (n - 1));
        return Edge{u, r < u ? r : r + 1};
    };

    if (edge_prob >= 1.0) {
        edges.reserve(total);
        for (std::uint64_t t = 0; t < total; ++t)
            edges.push_back(pair_at(t));
    } else if (edge_prob > 0.0 && n > 1) {
        SplitMix64 rng(rng_seed);
        edges.reserve(static_cast<std::size_t>(static_cast<double>(total) * edge_prob * 1.1) + 16);
        const double log1mp = std::log1p(-edge_prob);
        double t = -1.0;
        for (;;) {
            const double u = 1.0 - rng.next_unit(); // (0, 1]
            t += std::floor(std::log(u) / log1mp) + 1.0;
            if (!(t < static_cast<double>(total)))
                break;
            edges.push_back(pair_at(static_cast<std::uint64_t>(t)));
        }
    }
    return DirectedGraph(n, std::move(edges), false);
}

DirectedGraph generate_ba(NodeId n, NodeId edges_per_node, std::uint64_t rng_seed) {
    if (edges_per_node < 1 || n <= edges_per_node)
        throw InputError("generate_ba: need n > edges_per_node >= 1");

    SplitMix64 rng(rng_seed);
    std::vector<Edge> edges;
    edges.reserve(2 * static_cast<std::size_t>(edges_per_node) * n);
    std::vector<NodeId> endpoints; // one entry per unit of degree
    endpoints.reserve(2 * static_cast<std::size_t>(edges_per_node) * n);
    std::vector<NodeId> picked;

    for (NodeId t = 1; t < n; ++t) {
        const NodeId attach = std::min(t, edges_per_node);
        picked.clear();
        unsigned rejects = 0;
        while (picked.size() < attach) {
            NodeId cand;
            if (endpoints.empty() || rejects >= 64) {
                cand = static_cast<NodeId>(rng.next_below(t));
            } else {
                cand = endpoints[rng.next_below(endpoints.size())];
            }
            if (std::find(picked.begin(), picked.end(), cand) == picked.end()) {
                picked.push_back(cand);
                rejects = 0;
            } else {
                ++rejects;
            }
        }
        for (NodeId tgt : picked) {
            edges.push_back({t, tgt});
            edges.push_back({tgt, t});
            endpoints.push_back(t);
            endpoints.push_back(tgt);
        }
    }
    return DirectedGraph(n, std::move(edges), true);
}

} // namespace tap
