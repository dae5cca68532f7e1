#include "tap/influence.hpp"

#include <algorithm>
#include <cmath>

#include "tap/parallel.hpp"

namespace tap {

TriggeringSpec TriggeringSpec::independent_cascade(std::vector<double> edge_prob) {
    TriggeringSpec spec;
    spec.model = TriggeringModel::IndependentCascade;
    spec.edge_param = std::move(edge_prob);
    return spec;
}

TriggeringSpec TriggeringSpec::linear_threshold(std::vector<double> edge_weight) {
    TriggeringSpec spec;
    spec.model = TriggeringModel::LinearThreshold;
    spec.edge_param = std::move(edge_weight);
    return spec;
}

TriggeringSpec TriggeringSpec::generic(TriggeringSampler sampler) {
    TriggeringSpec spec;
    spec.model = TriggeringModel::Generic;
    spec.sampler = std::move(sampler);
    return spec;
}

TriggeringSpec TriggeringSpec::uniform_ic(const DirectedGraph &g, double ip_max,
                                          std::uint64_t param_seed) {
    if (!(ip_max >= 0.0 && ip_max <= 1.0))
        throw InputError("uniform_ic: ip_max must lie in [0, 1]");
    SplitMix64 rng = derive_stream(param_seed, 0); // stream 0: edge parameters
    std::vector<double> probs(g.edge_count());
    for (double &p : probs)
        p = ip_max * rng.next_unit();
    TriggeringSpec spec = independent_cascade(std::move(probs));
    spec.param_max = ip_max;
    spec.param_seed = param_seed;
    return spec;
}

TriggeringSpec TriggeringSpec::uniform_lt(const DirectedGraph &g, double weight_max,
                                          std::uint64_t param_seed) {
    if (!(weight_max >= 0.0 && weight_max <= 1.0))
        throw InputError("uniform_lt: weight_max must lie in [0, 1]");
    SplitMix64 rng = derive_stream(param_seed, 0);
    std::vector<double> weights(g.edge_count(), 0.0);
    std::vector<double> raw;
    for (NodeId v = 0; v < g.node_count(); ++v) {
        const auto in_ids = g.in_edge_ids(v);
        if (in_ids.empty())
            continue;
        raw.clear();
        double sum = 0.0;
        for (std::size_t j = 0; j < in_ids.size(); ++j) {
            raw.push_back(rng.next_unit());
            sum += raw.back();
        }
        const double scale = sum > 0.0 ? weight_max * rng.next_unit() / sum : 0.0;
        for (std::size_t j = 0; j < in_ids.size(); ++j)
            weights[in_ids[j]] = raw[j] * scale;
    }
    TriggeringSpec spec = linear_threshold(std::move(weights));
    spec.param_max = weight_max;
    spec.param_seed = param_seed;
    return spec;
}

void TriggeringSpec::validate(const DirectedGraph &g) const {
    switch (model) {
    case TriggeringModel::IndependentCascade:
        if (edge_param.size() != g.edge_count())
            throw InputError("IC spec: edge probability array does not match edge count");
        for (double p : edge_param)
            if (!(p >= 0.0 && p <= 1.0))
                throw InputError("IC spec: edge probability outside [0, 1]");
        break;
    case TriggeringModel::LinearThreshold: {
        if (edge_param.size() != g.edge_count())
            throw InputError("LT spec: edge weight array does not match edge count");
        for (double w : edge_param)
            if (!(w >= 0.0))
                throw InputError("LT spec: negative edge weight");
        for (NodeId v = 0; v < g.node_count(); ++v) {
            double sum = 0.0;
            for (EdgeId e : g.in_edge_ids(v))
                sum += edge_param[e];
            if (sum > 1.0 + 1e-9)
                throw InputError("LT spec: incoming weights exceed 1 at node " +
                                 std::to_string(v));
        }
        break;
    }
    case TriggeringModel::Generic:
        if (!sampler)
            throw InputError("generic triggering spec without a sampler");
        break;
    }
}

ExternalSpec ExternalSpec::none() { return {}; }

ExternalSpec ExternalSpec::bernoulli(std::vector<double> node_prob) {
    ExternalSpec spec;
    spec.kind = Kind::IndependentBernoulli;
    spec.node_prob = std::move(node_prob);
    return spec;
}

ExternalSpec ExternalSpec::generic(std::function<NodeSet(NodeId, SplitMix64 &)> sampler) {
    ExternalSpec spec;
    spec.kind = Kind::Generic;
    spec.sampler = std::move(sampler);
    return spec;
}

ExternalSpec ExternalSpec::uniform_bernoulli(NodeId n, double ep_max,
                                             std::uint64_t param_seed) {
    if (!(ep_max >= 0.0 && ep_max <= 1.0))
        throw InputError("uniform_bernoulli: ep_max must lie in [0, 1]");
    SplitMix64 rng = derive_stream(param_seed, 1); // stream 1: node parameters
    std::vector<double> probs(n);
    for (double &p : probs)
        p = ep_max * rng.next_unit();
    ExternalSpec spec = bernoulli(std::move(probs));
    spec.param_max = ep_max;
    spec.param_seed = param_seed;
    return spec;
}

void ExternalSpec::validate(NodeId n) const {
    switch (kind) {
    case Kind::None:
        break;
    case Kind::IndependentBernoulli:
        if (node_prob.size() != n)
            throw InputError("external spec: node probability array does not match n");
        for (double p : node_prob)
            if (!(p >= 0.0 && p <= 1.0))
                throw InputError("external spec: node probability outside [0, 1]");
        break;
    case Kind::Generic:
        if (!sampler)
            throw InputError("generic external spec without a sampler");
        break;
    }
}

void InfluenceSpec::validate(const DirectedGraph &g) const {
    trig.validate(g);
    ext.validate(g.node_count());
}

DirectedGraph sample_live_edge_graph(const DirectedGraph &g, const TriggeringSpec &trig,
                                     SplitMix64 &rng) {
    std::vector<Edge> kept;
    switch (trig.model) {
    case TriggeringModel::IndependentCascade: {
        kept.reserve(g.edge_count() / 2);
        for (NodeId u = 0; u < g.node_count(); ++u) {
            EdgeId e = g.first_out_edge(u);
            for (NodeId v : g.out_neighbors(u)) {
                if (rng.bernoulli(trig.edge_param[e]))
                    kept.push_back({u, v});
                ++e;
            }
        }
        break;
    }
    case TriggeringModel::LinearThreshold: {
        kept.reserve(g.node_count());
        for (NodeId v = 0; v < g.node_count(); ++v) {
            const auto sources = g.in_neighbors(v);
            const auto ids = g.in_edge_ids(v);
            if (sources.empty())
                continue;
            const double x = rng.next_unit();
            double cum = 0.0;
            for (std::size_t j = 0; j < sources.size(); ++j) {
                cum += trig.edge_param[ids[j]];
                if (x < cum) {
                    kept.push_back({sources[j], v});
                    break;
                }
            }
        }
        break;
    }
    case TriggeringModel::Generic: {
        for (NodeId v = 0; v < g.node_count(); ++v) {
            const std::vector<NodeId> trigger = trig.sampler(g, v, rng);
            const auto sources = g.in_neighbors(v);
            for (NodeId u : trigger) {
                if (u == v || !std::binary_search(sources.begin(), sources.end(), u))
                    throw InputError("generic sampler returned a non-in-neighbor");
                kept.push_back({u, v});
            }
        }
        break;
    }
    }
    return DirectedGraph(g.node_count(), std::move(kept), true);
}

NodeSet sample_external_seeds(const ExternalSpec &ext, NodeId n, SplitMix64 &rng) {
    switch (ext.kind) {
    case ExternalSpec::Kind::None:
        return {};
    case ExternalSpec::Kind::IndependentBernoulli: {
        std::vector<NodeId> seeds;
        for (NodeId u = 0; u < n; ++u)
            if (rng.bernoulli(ext.node_prob[u]))
                seeds.push_back(u);
        return NodeSet(std::move(seeds));
    }
    case ExternalSpec::Kind::Generic:
        return ext.sampler(n, rng);
    }
    return {};
}

WorldParts make_world_parts(const DirectedGraph &g, const InfluenceSpec &spec,
                            std::uint32_t world_index, std::uint64_t world_seed) {
    SplitMix64 rng = derive_stream(world_seed, world_index);
    WorldParts parts;
    parts.live = sample_live_edge_graph(g, spec.trig, rng);
    parts.external = sample_external_seeds(spec.ext, g.node_count(), rng);
    parts.external_closure = reachable_set(parts.live, parts.external);
    parts.world.residual = remove_closed_set(parts.live, parts.external_closure, false);
    parts.world.external_reach_size = static_cast<std::uint32_t>(parts.external_closure.size());
    parts.world.world_index = world_index;
    return parts;
}

SampledWorld make_world(const DirectedGraph &g, const InfluenceSpec &spec,
                        std::uint32_t world_index, std::uint64_t world_seed) {
    return make_world_parts(g, spec, world_index, world_seed).world;
}

std::vector<SampledWorld> sample_worlds(const DirectedGraph &g, const InfluenceSpec &spec,
                                        std::uint32_t ell, std::uint64_t world_seed,
                                        unsigned workers) {
    if (ell == 0)
        throw InputError("sample_worlds: ell must be >= 1");
    spec.validate(g);
    std::vector<SampledWorld> worlds(ell);
    parallel_chunks(ell, workers, [&](unsigned, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            worlds[i] = make_world(g, spec, static_cast<std::uint32_t>(i), world_seed);
    });
    return worlds;
}

double external_offset(const std::vector<SampledWorld> &worlds) {
    if (worlds.empty())
        return 0.0;
    std::uint64_t total = 0;
    for (const SampledWorld &w : worlds)
        total += w.external_reach_size;
    return static_cast<double>(total) / static_cast<double>(worlds.size());
}

std::uint32_t simulate_cascade(const DirectedGraph &g, const InfluenceSpec &spec,
                               const NodeSet &seeds, SplitMix64 &rng) {
    const NodeId n = g.node_count();
    for (NodeId s : seeds)
        if (s >= n)
            throw InputError("seed id out of range");

    std::vector<std::uint8_t> active(n, 0);
    std::vector<NodeId> frontier;
    std::vector<NodeId> next;
    auto activate = [&](NodeId v) {
        if (!active[v] && g.is_alive(v)) {
            active[v] = 1;
            next.push_back(v);
        }
    };

    // Model-specific state sampled up front so the t=0 step and the
    // propagation loop draw from the stream in a fixed order.
    std::vector<double> threshold;     // LT
    std::vector<double> incoming;      // LT: accumulated active in-weight
    std::vector<std::vector<NodeId>> trigger_out; // Generic: u -> {v : u in T_v}
    switch (spec.trig.model) {
    case TriggeringModel::IndependentCascade:
        break;
    case TriggeringModel::LinearThreshold:
        threshold.resize(n);
        incoming.assign(n, 0.0);
        for (NodeId v = 0; v < n; ++v)
            threshold[v] = 1.0 - rng.next_unit(); // (0, 1]
        break;
    case TriggeringModel::Generic:
        trigger_out.resize(n);
        for (NodeId v = 0; v < n; ++v)
            for (NodeId u : spec.trig.sampler(g, v, rng))
                trigger_out[u].push_back(v);
        break;
    }

    // t = 0: seeds plus the one-shot external activation.
    for (NodeId s : seeds)
        activate(s);
    for (NodeId u : sample_external_seeds(spec.ext, n, rng))
        activate(u);

    std::uint32_t activated = static_cast<std::uint32_t>(next.size());
    while (!next.empty()) {
        frontier.swap(next);
        next.clear();
        for (NodeId u : frontier) {
            switch (spec.trig.model) {
            case TriggeringModel::IndependentCascade: {
                EdgeId e = g.first_out_edge(u);
                for (NodeId v : g.out_neighbors(u)) {
                    if (!active[v] && rng.bernoulli(spec.trig.edge_param[e]))
                        activate(v);
                    ++e;
                }
                break;
            }
            case TriggeringModel::LinearThreshold: {
                EdgeId e = g.first_out_edge(u);
                for (NodeId v : g.out_neighbors(u)) {
                    if (!active[v]) {
                        incoming[v] += spec.trig.edge_param[e];
                        if (incoming[v] >= threshold[v])
                            activate(v);
                    }
                    ++e;
                }
                break;
            }
            case TriggeringModel::Generic:
                for (NodeId v : trigger_out[u])
                    activate(v);
                break;
            }
        }
        activated += static_cast<std::uint32_t>(next.size());
    }
    return activated;
}

} // namespace tap
