#include "tap/exact.hpp"

#include <algorithm>

namespace tap {

namespace {

// Transitive closure rows of the graph given by `adj` (bitmask adjacency),
// including self-reachability.
std::vector<std::uint32_t> closure_rows(NodeId n, const std::vector<std::uint32_t> &adj) {
    std::vector<std::uint32_t> reach(n);
    for (NodeId v = 0; v < n; ++v) {
        std::uint32_t seen = 1u << v;
        std::uint32_t frontier = seen;
        while (frontier != 0) {
            std::uint32_t next = 0;
            for (std::uint32_t rest = frontier; rest != 0;) {
                const int u = std::countr_zero(rest);
                rest &= rest - 1;
                next |= adj[u];
            }
            frontier = next & ~seen;
            seen |= next;
        }
        reach[v] = seen;
    }
    return reach;
}

std::vector<Rational> external_activation_probs(NodeId n, const ExternalSpec &ext,
                                                const std::vector<std::uint32_t> &reach) {
    std::vector<Rational> q(n, Rational(0));
    if (ext.kind != ExternalSpec::Kind::IndependentBernoulli)
        return q;
    for (NodeId x = 0; x < n; ++x) {
        // x stays inactive iff no node that reaches x is externally seeded.
        Rational miss(1);
        for (NodeId b = 0; b < n; ++b) {
            if (ext.node_prob[b] <= 0.0)
                continue;
            if (reach[b] & (1u << x))
                miss *= Rational(1) - Rational(ext.node_prob[b]);
        }
        q[x] = Rational(1) - miss;
    }
    return q;
}

} // namespace

ExactSigmaOracle::ExactSigmaOracle(const DirectedGraph &g, const InfluenceSpec &spec,
                                   ExactBudget budget) {
    spec.validate(g);
    n_ = g.node_count();
    if (n_ > budget.max_nodes || n_ > 32)
        throw ResourceLimitError("exact_sigma: instance too large (n)");
    if (spec.trig.model == TriggeringModel::Generic)
        throw InputError("exact_sigma: generic triggering models cannot be enumerated");
    if (spec.ext.kind == ExternalSpec::Kind::Generic)
        throw InputError("exact_sigma: generic external models cannot be enumerated");

    const std::vector<Edge> edges = [&] {
        std::vector<Edge> list;
        list.reserve(g.edge_count());
        for (NodeId u = 0; u < n_; ++u)
            for (NodeId v : g.out_neighbors(u))
                list.push_back({u, v});
        return list;
    }();

    if (spec.trig.model == TriggeringModel::IndependentCascade) {
        std::vector<std::uint32_t> base(n_, 0);
        std::vector<EdgeId> uncertain;
        for (EdgeId e = 0; e < edges.size(); ++e) {
            const double p = spec.trig.edge_param[e];
            if (p >= 1.0)
                base[edges[e].src] |= 1u << edges[e].dst;
            else if (p > 0.0)
                uncertain.push_back(e);
        }
        if (uncertain.size() >= 63 || (1ull << uncertain.size()) > budget.max_outcomes)
            throw ResourceLimitError("exact_sigma: instance too large (live-edge outcomes)");

        const std::uint64_t combos = 1ull << uncertain.size();
        outcomes_.reserve(combos);
        for (std::uint64_t bits = 0; bits < combos; ++bits) {
            Outcome out;
            out.prob = Rational(1);
            std::vector<std::uint32_t> adj = base;
            for (std::size_t j = 0; j < uncertain.size(); ++j) {
                const EdgeId e = uncertain[j];
                const Rational p(spec.trig.edge_param[e]);
                if (bits & (1ull << j)) {
                    out.prob *= p;
                    adj[edges[e].src] |= 1u << edges[e].dst;
                } else {
                    out.prob *= Rational(1) - p;
                }
            }
            out.reach = closure_rows(n_, adj);
            out.ext_prob = external_activation_probs(n_, spec.ext, out.reach);
            outcomes_.push_back(std::move(out));
        }
    } else { // LinearThreshold: one choice per node (an in-edge or none)
        std::vector<std::vector<std::pair<std::uint32_t, Rational>>> choices(n_);
        std::uint64_t combos = 1;
        for (NodeId v = 0; v < n_; ++v) {
            Rational none(1);
            for (std::size_t j = 0; j < g.in_neighbors(v).size(); ++j) {
                const EdgeId e = g.in_edge_ids(v)[j];
                const Rational w(spec.trig.edge_param[e]);
                if (w > 0) {
                    choices[v].push_back({1u << g.in_neighbors(v)[j], w});
                    none -= w;
                }
            }
            if (none > 0)
                choices[v].push_back({0u, none});
            combos *= choices[v].size();
            if (combos > budget.max_outcomes)
                throw ResourceLimitError("exact_sigma: instance too large (LT outcomes)");
        }

        std::vector<std::size_t> odometer(n_, 0);
        outcomes_.reserve(combos);
        for (std::uint64_t c = 0; c < combos; ++c) {
            Outcome out;
            out.prob = Rational(1);
            std::vector<std::uint32_t> adj(n_, 0);
            for (NodeId v = 0; v < n_; ++v) {
                const auto &[src_bit, prob] = choices[v][odometer[v]];
                out.prob *= prob;
                if (src_bit != 0) {
                    const int u = std::countr_zero(src_bit);
                    adj[u] |= 1u << v;
                }
            }
            out.reach = closure_rows(n_, adj);
            out.ext_prob = external_activation_probs(n_, spec.ext, out.reach);
            outcomes_.push_back(std::move(out));
            for (NodeId v = 0; v < n_; ++v) {
                if (++odometer[v] < choices[v].size())
                    break;
                odometer[v] = 0;
            }
        }
    }
}

Rational ExactSigmaOracle::sigma_mask(std::uint32_t seed_mask) const {
    Rational total(0);
    for (const Outcome &out : outcomes_) {
        std::uint32_t reached = 0;
        for (std::uint32_t rest = seed_mask; rest != 0;) {
            const int v = std::countr_zero(rest);
            rest &= rest - 1;
            reached |= out.reach[v];
        }
        Rational value(std::popcount(reached));
        for (NodeId x = 0; x < n_; ++x)
            if (!(reached & (1u << x)))
                value += out.ext_prob[x];
        total += out.prob * value;
    }
    return total;
}

Rational ExactSigmaOracle::sigma(const NodeSet &seeds) const {
    std::uint32_t mask = 0;
    for (NodeId v : seeds) {
        if (v >= n_)
            throw InputError("seed id out of range");
        mask |= 1u << v;
    }
    return sigma_mask(mask);
}

Rational exact_sigma(const DirectedGraph &g, const InfluenceSpec &spec, const NodeSet &seeds,
                     ExactBudget budget) {
    return ExactSigmaOracle(g, spec, budget).sigma(seeds);
}

} // namespace tap
