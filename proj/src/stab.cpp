#include "tap/stab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_map>

#include "tap/parallel.hpp"

namespace tap {

const char *to_string(StopReason reason) {
    switch (reason) {
    case StopReason::ThresholdMet:
        return "threshold_met";
    case StopReason::MarginalGainBelowOne:
        return "marginal_gain_below_one";
    case StopReason::Exhausted:
        return "exhausted";
    }
    return "unknown";
}

const char *to_string(Estimator estimator) {
    return estimator == Estimator::C1 ? "c1" : "c2";
}

void StabConfig::validate(NodeId n) const {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw InputError("stab config: alpha must lie in (0, 1)");
    if (!(delta > 0.0 && delta < 1.0))
        throw InputError("stab config: delta must lie in (0, 1)");
    if (threshold < 0.0 || threshold > static_cast<double>(n))
        throw InputError("stab config: threshold must lie in (0, n]");
    if (c < 0.0)
        throw InputError("stab config: c must be >= 0");
    if (eta && !(*eta > 0.0 && *eta < 1.0))
        throw InputError("stab config: eta must lie in (0, 1)");
    if (eps_sketch <= 0.0)
        throw InputError("stab config: eps_sketch must be positive");
    if (k_alpha_t_preset && threshold <= 0.0)
        throw InputError("stab config: the alpha*T sketch preset needs a threshold");
}

SampleCounts choose_sample_counts(const StabConfig &cfg, NodeId n) {
    cfg.validate(n);
    const double delta = cfg.eta ? *cfg.eta / std::pow(static_cast<double>(n), 3.0) : cfg.delta;
    const double denom = (cfg.conservative_ell ? 1.0 : 2.0) * cfg.alpha * cfg.alpha;
    std::uint32_t ell = cfg.ell_override.value_or(
        static_cast<std::uint32_t>(std::ceil(std::log(2.0 / delta) / denom)));
    ell = std::max<std::uint32_t>(ell, 1);

    std::uint32_t k;
    if (cfg.k_override) {
        k = *cfg.k_override;
    } else {
        const double eps = cfg.k_alpha_t_preset ? cfg.alpha * cfg.threshold : cfg.eps_sketch;
        k = static_cast<std::uint32_t>(
            std::ceil((2.0 + cfg.c) * std::log(static_cast<double>(std::max<NodeId>(n, 2))) /
                      (eps * eps)));
    }
    k = std::min<std::uint32_t>(std::max<std::uint32_t>(k, 2), 0xFFFF);
    return {ell, k};
}

namespace {

// Incremental estimator state shared by the plain and lazy drivers. gain()
// is safe to call concurrently from the candidate scan.
class C1State {
public:
    explicit C1State(const SketchOracle &oracle)
        : oracle_(oracle), current_(oracle.empty_sketch()), tau_(0.0) {}

    double tau() const { return tau_; }
    double gain(NodeId u) const {
        return c1_estimate(merge_sketch(current_, oracle_.sketch(u)), oracle_) - tau_;
    }
    void add(NodeId u) {
        current_ = merge_sketch(current_, oracle_.sketch(u));
        tau_ = c1_estimate(current_, oracle_);
    }

private:
    const SketchOracle &oracle_;
    Sketch current_;
    double tau_;
};

class C2State {
public:
    explicit C2State(const SketchOracle &oracle) : oracle_(oracle) {}

    double tau() const { return sum_ / static_cast<double>(oracle_.ell()); }
    double gain(NodeId u) const {
        return delta_sum(u, nullptr) / static_cast<double>(oracle_.ell());
    }
    void add(NodeId u) { sum_ += delta_sum(u, &best_gamma_); }

private:
    // Change in the inverse-threshold sum if u joined the seed set. When
    // `commit` is given the map is updated in place with the same
    // operations, so add() reproduces gain() bit for bit.
    double delta_sum(NodeId u, std::unordered_map<std::uint64_t, double> *commit) const {
        const Sketch &x = oracle_.sketch(u);
        const ThresholdRank tr = threshold_rank(x, x.k);
        const std::size_t limit = tr.saturated ? x.entries.size() - 1 : x.entries.size();
        double delta = 0.0;
        for (std::size_t j = 0; j < limit; ++j) {
            const SketchEntry &e = x.entries[j];
            const std::uint64_t key = (static_cast<std::uint64_t>(e.node) << 32) | e.world;
            const auto it = best_gamma_.find(key);
            if (it == best_gamma_.end()) {
                delta += 1.0 / tr.gamma;
                if (commit)
                    commit->emplace(key, tr.gamma);
            } else if (tr.gamma > it->second) {
                delta += 1.0 / tr.gamma - 1.0 / it->second;
                if (commit)
                    (*commit)[key] = tr.gamma;
            }
        }
        return delta;
    }

    const SketchOracle &oracle_;
    std::unordered_map<std::uint64_t, double> best_gamma_;
    double sum_ = 0.0;
};

struct Candidate {
    double gain = -std::numeric_limits<double>::infinity();
    NodeId node = 0;
};

bool better(const Candidate &a, const Candidate &b) {
    return a.gain > b.gain || (a.gain == b.gain && a.node < b.node);
}

template <typename State>
TapSolution greedy_loop(const StabConfig &cfg, const SketchOracle &oracle, State state) {
    const NodeId n = oracle.node_count();
    const double target = cfg.threshold - cfg.alpha * cfg.threshold;

    TapSolution sol;
    sol.offset = oracle.offset();
    sol.estimated_activation = state.tau() + oracle.offset();
    std::vector<std::uint8_t> seeded(n, 0);

    while (sol.estimated_activation < target) {
        if (sol.order.size() == n) {
            sol.stopped_by = StopReason::Exhausted;
            break;
        }

        std::vector<Candidate> chunk_best(std::max(1u, cfg.workers));
        parallel_chunks(n, cfg.workers, [&](unsigned chunk, std::size_t begin, std::size_t end) {
            Candidate best;
            for (std::size_t u = begin; u < end; ++u) {
                if (seeded[u])
                    continue;
                const Candidate cand{state.gain(static_cast<NodeId>(u)),
                                     static_cast<NodeId>(u)};
                if (better(cand, best))
                    best = cand;
            }
            chunk_best[chunk] = best;
        });
        Candidate best;
        for (const Candidate &cand : chunk_best)
            if (better(cand, best))
                best = cand;
        sol.evaluations += n - sol.order.size();

        if (cfg.enforce_cea_stop && best.gain < 1.0) {
            sol.stopped_by = StopReason::MarginalGainBelowOne;
            break;
        }
        state.add(best.node);
        seeded[best.node] = 1;
        sol.order.push_back(best.node);
        sol.seeds.insert(best.node);
        sol.estimated_activation = state.tau() + oracle.offset();
        sol.trace.push_back({best.node, best.gain, sol.estimated_activation});
    }
    return sol;
}

template <typename State>
TapSolution lazy_loop(const StabConfig &cfg, const SketchOracle &oracle, State state) {
    const NodeId n = oracle.node_count();
    const double target = cfg.threshold - cfg.alpha * cfg.threshold;

    TapSolution sol;
    sol.offset = oracle.offset();
    sol.estimated_activation = state.tau() + oracle.offset();

    struct Entry {
        double bound;
        NodeId node;
        std::uint32_t evaluated_at; // iteration the bound was computed for
    };
    auto worse = [](const Entry &a, const Entry &b) {
        return a.bound < b.bound || (a.bound == b.bound && a.node > b.node);
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> queue(worse);
    constexpr std::uint32_t kNever = 0xFFFFFFFF;
    for (NodeId u = 0; u < n; ++u)
        queue.push({std::numeric_limits<double>::infinity(), u, kNever});

    std::uint32_t iteration = 0;
    while (sol.estimated_activation < target) {
        if (queue.empty()) {
            sol.stopped_by = StopReason::Exhausted;
            break;
        }
        const Entry top = queue.top();
        queue.pop();
        if (top.evaluated_at != iteration) {
            ++sol.evaluations;
            queue.push({state.gain(top.node), top.node, iteration});
            continue;
        }
        if (cfg.enforce_cea_stop && top.bound < 1.0) {
            sol.stopped_by = StopReason::MarginalGainBelowOne;
            break;
        }
        state.add(top.node);
        sol.order.push_back(top.node);
        sol.seeds.insert(top.node);
        sol.estimated_activation = state.tau() + oracle.offset();
        sol.trace.push_back({top.node, top.bound, sol.estimated_activation});
        ++iteration;
    }
    return sol;
}

void check_oracle_match(const StabConfig &cfg, const DirectedGraph &g,
                        const SketchOracle &oracle) {
    if (oracle.node_count() != g.node_count())
        throw InputError("stab: oracle node count does not match the graph");
    const SampleCounts counts = choose_sample_counts(cfg, g.node_count());
    if (oracle.ell() != counts.ell || oracle.k() != counts.k)
        throw InputError("stab: oracle built with ell=" + std::to_string(oracle.ell()) +
                         ", k=" + std::to_string(oracle.k()) + " but config selects ell=" +
                         std::to_string(counts.ell) + ", k=" + std::to_string(counts.k));
}

} // namespace

TapSolution run_stab(const DirectedGraph &g, const InfluenceSpec &spec, const StabConfig &cfg,
                     const SketchOracle &oracle) {
    if (cfg.lazy_eval)
        return lazy_greedy_stab(g, spec, cfg, oracle);
    spec.validate(g);
    if (cfg.threshold <= 0.0)
        throw InputError("stab: threshold must be positive");
    check_oracle_match(cfg, g, oracle);
    if (cfg.estimator == Estimator::C1)
        return greedy_loop(cfg, oracle, C1State(oracle));
    return greedy_loop(cfg, oracle, C2State(oracle));
}

TapSolution lazy_greedy_stab(const DirectedGraph &g, const InfluenceSpec &spec,
                             const StabConfig &cfg, const SketchOracle &oracle) {
    spec.validate(g);
    if (cfg.threshold <= 0.0)
        throw InputError("stab: threshold must be positive");
    check_oracle_match(cfg, g, oracle);
    if (cfg.estimator == Estimator::C1)
        return lazy_loop(cfg, oracle, C1State(oracle));
    return lazy_loop(cfg, oracle, C2State(oracle));
}

} // namespace tap
