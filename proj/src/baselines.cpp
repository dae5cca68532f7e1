#include "tap/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>

#include "tap/parallel.hpp"

namespace tap {

EvalReport evaluate_seed_set(const DirectedGraph &g, const InfluenceSpec &spec,
                             const NodeSet &seeds, std::uint32_t num_samples,
                             std::uint64_t rng_seed, double threshold, unsigned workers) {
    if (num_samples < 1)
        throw InputError("evaluate_seed_set: num_samples must be >= 1");
    spec.validate(g);

    const unsigned w = std::max(1u, workers);
    std::vector<std::uint64_t> sums(w, 0), squares(w, 0);
    parallel_chunks(num_samples, w, [&](unsigned chunk, std::size_t begin, std::size_t end) {
        std::uint64_t sum = 0, sq = 0;
        for (std::size_t i = begin; i < end; ++i) {
            SplitMix64 rng = derive_stream(rng_seed, i);
            const std::uint64_t count = simulate_cascade(g, spec, seeds, rng);
            sum += count;
            sq += count * count;
        }
        sums[chunk] = sum;
        squares[chunk] = sq;
    });

    std::uint64_t total = 0, total_sq = 0;
    for (unsigned chunk = 0; chunk < w; ++chunk) {
        total += sums[chunk];
        total_sq += squares[chunk];
    }

    EvalReport report;
    report.samples = num_samples;
    const double mean = static_cast<double>(total) / num_samples;
    report.mean_activation = mean;
    if (num_samples > 1) {
        const double var =
            (static_cast<double>(total_sq) - static_cast<double>(total) * mean) /
            (static_cast<double>(num_samples) - 1.0);
        report.std_error = std::sqrt(std::max(0.0, var) / num_samples);
    }
    if (threshold > 0.0)
        report.normalized = mean / threshold;
    return report;
}

TapSolution celf_tap(const DirectedGraph &g, const InfluenceSpec &spec, const CelfConfig &cfg) {
    spec.validate(g);
    const NodeId n = g.node_count();
    if (!(cfg.threshold > 0.0 && cfg.threshold <= static_cast<double>(n)))
        throw InputError("celf_tap: threshold must lie in (0, n]");

    std::uint64_t eval_counter = 0;
    auto estimate = [&](const NodeSet &set) {
        if (cfg.exact_evaluator)
            return cfg.exact_evaluator(set);
        const std::uint64_t tag = eval_counter++;
        return evaluate_seed_set(g, spec, set, cfg.mc_samples,
                                 hash_combine(cfg.rng_seed, tag), 0.0, cfg.workers)
            .mean_activation;
    };

    TapSolution sol;
    const auto start = std::chrono::steady_clock::now();
    auto out_of_time = [&] {
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        return elapsed.count() > cfg.time_limit_seconds;
    };

    struct Entry {
        double bound;
        NodeId node;
        std::uint32_t evaluated_at;
    };
    auto worse = [](const Entry &a, const Entry &b) {
        return a.bound < b.bound || (a.bound == b.bound && a.node > b.node);
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> queue(worse);
    for (NodeId u = 0; u < n; ++u)
        queue.push({std::numeric_limits<double>::infinity(), u, 0xFFFFFFFF});

    double current = estimate(sol.seeds);
    sol.estimated_activation = current;
    std::uint32_t iteration = 0;
    NodeSet trial;
    while (current < cfg.threshold) {
        if (queue.empty()) {
            sol.stopped_by = StopReason::Exhausted;
            break;
        }
        if (out_of_time()) {
            sol.stopped_by = StopReason::Exhausted;
            break;
        }
        const Entry top = queue.top();
        queue.pop();
        if (top.evaluated_at != iteration) {
            trial = sol.seeds;
            trial.insert(top.node);
            ++sol.evaluations;
            queue.push({estimate(trial) - current, top.node, iteration});
            continue;
        }
        sol.order.push_back(top.node);
        sol.seeds.insert(top.node);
        current = estimate(sol.seeds); // fresh estimate of the grown set
        sol.estimated_activation = current;
        sol.trace.push_back({top.node, top.bound, current});
        ++iteration;
    }
    if (current >= cfg.threshold)
        sol.stopped_by = StopReason::ThresholdMet;
    return sol;
}

namespace {

// First subset of each cardinality in lexicographic order that satisfies
// the objective; sizes ascend, so the first hit is a minimum.
template <typename Objective>
NodeSet smallest_satisfying(NodeId n, const Objective &satisfied) {
    std::vector<NodeId> combo;
    for (NodeId size = 0; size <= n; ++size) {
        combo.resize(size);
        for (NodeId j = 0; j < size; ++j)
            combo[j] = j;
        for (;;) {
            if (satisfied(combo))
                return NodeSet(combo);
            if (size == 0)
                break;
            // advance to the next combination
            NodeId j = size;
            while (j > 0 && combo[j - 1] == n - size + (j - 1))
                --j;
            if (j == 0)
                break;
            ++combo[j - 1];
            for (NodeId i = j; i < size; ++i)
                combo[i] = combo[i - 1] + 1;
        }
    }
    throw InputError("exhaustive_tap: no subset satisfies the threshold");
}

} // namespace

NodeSet exhaustive_tap(const DirectedGraph &g, const InfluenceSpec &spec, double threshold,
                       NodeId max_nodes, ExactBudget budget) {
    if (g.node_count() > max_nodes)
        throw ResourceLimitError("exhaustive_tap: instance too large");
    const ExactSigmaOracle oracle(g, spec, budget);
    const Rational bound(threshold);
    return smallest_satisfying(g.node_count(), [&](const std::vector<NodeId> &combo) {
        std::uint32_t mask = 0;
        for (NodeId v : combo)
            mask |= 1u << v;
        return oracle.sigma_mask(mask) >= bound;
    });
}

NodeSet exhaustive_tap_worlds(std::span<const SampledWorld> worlds, double threshold,
                              NodeId max_nodes) {
    if (worlds.empty())
        throw InputError("exhaustive_tap_worlds: no worlds");
    const NodeId n = worlds.front().residual.node_count();
    if (n > max_nodes || n > 32)
        throw ResourceLimitError("exhaustive_tap_worlds: instance too large");

    // Closure rows per world; dead nodes contribute nothing.
    const std::size_t ell = worlds.size();
    std::vector<std::vector<std::uint32_t>> rows(ell, std::vector<std::uint32_t>(n, 0));
    BfsScratch scratch;
    for (std::size_t i = 0; i < ell; ++i) {
        const DirectedGraph &h = worlds[i].residual;
        for (NodeId v = 0; v < n; ++v) {
            if (!h.is_alive(v))
                continue;
            const NodeId seed[1] = {v};
            reachable_count(h, seed, scratch);
            std::uint32_t mask = 0;
            for (NodeId u : scratch.queue)
                mask |= 1u << u;
            rows[i][v] = mask;
        }
    }
    std::uint64_t ext_total = 0;
    for (const SampledWorld &world : worlds)
        ext_total += world.external_reach_size;

    return smallest_satisfying(n, [&](const std::vector<NodeId> &combo) {
        std::uint64_t reach_total = ext_total;
        for (std::size_t i = 0; i < ell; ++i) {
            std::uint32_t mask = 0;
            for (NodeId v : combo)
                mask |= rows[i][v];
            reach_total += std::popcount(mask);
        }
        const double sigma_hat = static_cast<double>(reach_total) / static_cast<double>(ell);
        return sigma_hat >= threshold;
    });
}

} // namespace tap
