#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tap/stab.hpp"
#include "test_support.hpp"

using namespace tap;

namespace {

// Reference greedy that evaluates marginal gains with the exact per-world
// average reach; run_stab with exact sketches (k >= n) must match it.
std::vector<NodeId> reference_greedy(std::span<const SampledWorld> worlds, NodeId n,
                                     double target, double offset) {
    std::vector<NodeId> order;
    NodeSet current;
    double tau = 0.0;
    while (tau + offset < target && order.size() < n) {
        double best_gain = -1.0;
        NodeId best = 0;
        for (NodeId u = 0; u < n; ++u) {
            if (current.contains(u))
                continue;
            NodeSet trial = current;
            trial.insert(u);
            const double gain = tau_exact(trial, worlds) - tau;
            if (gain > best_gain) {
                best_gain = gain;
                best = u;
            }
        }
        if (best_gain < 1.0)
            break;
        current.insert(best);
        order.push_back(best);
        tau = tau_exact(current, worlds);
    }
    return order;
}

StabConfig exact_config(double T, std::uint32_t ell, std::uint32_t k, Estimator est) {
    StabConfig cfg;
    cfg.threshold = T;
    cfg.alpha = 0.1;
    cfg.ell_override = ell;
    cfg.k_override = k;
    cfg.estimator = est;
    return cfg;
}

} // namespace

TEST_CASE("sample count formulas") {
    StabConfig cfg;
    cfg.alpha = 0.1;
    cfg.delta = 0.01;
    CHECK(choose_sample_counts(cfg, 1000).ell == 265);

    cfg.alpha = 0.3;
    CHECK(choose_sample_counts(cfg, 1000).ell == 30);

    cfg.conservative_ell = true;
    cfg.alpha = 0.1;
    CHECK(choose_sample_counts(cfg, 1000).ell == 530);

    StabConfig ovr;
    ovr.ell_override = 7;
    ovr.k_override = 5;
    const SampleCounts counts = choose_sample_counts(ovr, 1000);
    CHECK(counts.ell == 7);
    CHECK(counts.k == 5);

    StabConfig strict;
    strict.eta = 0.1;
    strict.alpha = 0.1;
    // delta = 0.1/n^3 with n=100: ell = ceil(ln(2e7)/0.02)
    CHECK(choose_sample_counts(strict, 100).ell ==
          static_cast<std::uint32_t>(std::ceil(std::log(2.0e7) / 0.02)));

    StabConfig preset;
    preset.eps_sketch = 0.25;
    preset.c = 1.0;
    CHECK(choose_sample_counts(preset, 1000).k ==
          static_cast<std::uint32_t>(std::ceil(3.0 * std::log(1000.0) / 0.0625)));
}

TEST_CASE("invalid configs are rejected") {
    StabConfig cfg;
    cfg.alpha = 0.0;
    CHECK_THROWS_AS(cfg.validate(10), InputError);
    cfg.alpha = 0.5;
    cfg.threshold = 11;
    CHECK_THROWS_AS(cfg.validate(10), InputError);
    cfg.threshold = 5;
    cfg.delta = 1.5;
    CHECK_THROWS_AS(cfg.validate(10), InputError);
}

TEST_CASE("external influence alone can satisfy the guard") {
    // every node externally active: O = n, so T - alpha*T <= O immediately
    const DirectedGraph g = test::random_digraph(12, 0.2, 3);
    InfluenceSpec spec = test::flat_ic(g, 0.5);
    spec.ext = ExternalSpec::bernoulli(std::vector<double>(12, 1.0));
    const auto worlds = sample_worlds(g, spec, 4, 9);
    const SketchOracle oracle = build_oracles(worlds, 16, 1);
    const StabConfig cfg = exact_config(10.0, 4, 16, Estimator::C1);
    const TapSolution sol = run_stab(g, spec, cfg, oracle);
    CHECK(sol.order.empty());
    CHECK(sol.stopped_by == StopReason::ThresholdMet);
    CHECK(sol.estimated_activation == doctest::Approx(12.0));
}

TEST_CASE("deterministic star picks the center in one iteration") {
    std::vector<Edge> star;
    const NodeId n = 9;
    for (NodeId leaf = 1; leaf < n; ++leaf)
        star.push_back({0, leaf});
    const DirectedGraph g(n, std::move(star));
    InfluenceSpec spec = test::flat_ic(g, 1.0);
    const auto worlds = sample_worlds(g, spec, 1, 2);
    const SketchOracle oracle = build_oracles(worlds, n + 1, 3);

    for (Estimator est : {Estimator::C1, Estimator::C2}) {
        const StabConfig cfg = exact_config(static_cast<double>(n), 1, n + 1, est);
        const TapSolution sol = run_stab(g, spec, cfg, oracle);
        REQUIRE(sol.order.size() == 1);
        CHECK(sol.order[0] == 0);
        CHECK(sol.stopped_by == StopReason::ThresholdMet);
        CHECK(sol.estimated_activation == doctest::Approx(static_cast<double>(n)));
        CHECK(sol.trace[0].gain == doctest::Approx(static_cast<double>(n)));
    }
}

TEST_CASE("run_stab with exact sketches matches the exact-tau reference greedy") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const NodeId n = 20;
        const DirectedGraph g = test::random_digraph(n, 0.12, seed + 80);
        InfluenceSpec spec;
        spec.trig = TriggeringSpec::uniform_ic(g, 0.7, seed);
        spec.ext = seed % 2 ? ExternalSpec::uniform_bernoulli(n, 0.05, seed)
                            : ExternalSpec::none();
        const std::uint32_t ell = 8, k = n * ell + 4; // above the pair count: exact
        const auto worlds = sample_worlds(g, spec, ell, seed + 7);
        const SketchOracle oracle = build_oracles(worlds, k, seed + 13);
        const double T = 12.0;

        for (Estimator est : {Estimator::C1, Estimator::C2}) {
            const StabConfig cfg = exact_config(T, ell, k, est);
            const TapSolution sol = run_stab(g, spec, cfg, oracle);
            const std::vector<NodeId> ref =
                reference_greedy(worlds, n, T - cfg.alpha * T, oracle.offset());
            CHECK(sol.order == ref);

            // per-step trace agreement with the exact objective
            NodeSet acc;
            double prev_tau = 0.0;
            for (const TraceStep &step : sol.trace) {
                acc.insert(step.node);
                const double tau = tau_exact(acc, worlds);
                CHECK(step.gain == doctest::Approx(tau - prev_tau).epsilon(1e-9));
                CHECK(step.sigma_hat_after ==
                      doctest::Approx(tau + oracle.offset()).epsilon(1e-9));
                prev_tau = tau;
            }
        }
    }
}

TEST_CASE("loop guard invariant holds along the trace") {
    const NodeId n = 24;
    const DirectedGraph g = test::random_digraph(n, 0.1, 91);
    InfluenceSpec spec;
    spec.trig = TriggeringSpec::uniform_ic(g, 0.8, 4);
    spec.ext = ExternalSpec::none();
    const std::uint32_t ell = 6, k = n * ell + 2;
    const auto worlds = sample_worlds(g, spec, ell, 15);
    const SketchOracle oracle = build_oracles(worlds, k, 16);
    const StabConfig cfg = exact_config(14.0, ell, k, Estimator::C2);
    const TapSolution sol = run_stab(g, spec, cfg, oracle);
    const double target = cfg.threshold - cfg.alpha * cfg.threshold;

    double prev = oracle.offset();
    for (std::size_t i = 0; i < sol.trace.size(); ++i) {
        CHECK(sol.trace[i].sigma_hat_after >= prev); // non-decreasing
        if (i + 1 < sol.trace.size())
            CHECK(sol.trace[i].sigma_hat_after < target); // prefixes stay below
        prev = sol.trace[i].sigma_hat_after;
    }
    if (sol.stopped_by == StopReason::ThresholdMet)
        CHECK(sol.estimated_activation >= target);

    // greedy dominance at selection time: re-evaluate every candidate
    // against the prefix state and confirm the recorded gain is maximal
    NodeSet acc;
    for (const TraceStep &step : sol.trace) {
        double best = -1e300;
        for (NodeId u = 0; u < n; ++u) {
            if (acc.contains(u))
                continue;
            NodeSet trial = acc;
            trial.insert(u);
            best = std::max(best, tau_exact(trial, worlds) - tau_exact(acc, worlds));
        }
        CHECK(step.gain == doctest::Approx(best).epsilon(1e-9));
        acc.insert(step.node);
    }
}

TEST_CASE("ties break to the smallest node id") {
    // two disconnected certain chains of equal length: node 0 and node 3
    // have identical gains; greedy must take 0 first
    const DirectedGraph g(6, {{0, 1}, {1, 2}, {3, 4}, {4, 5}});
    InfluenceSpec spec = test::flat_ic(g, 1.0);
    const auto worlds = sample_worlds(g, spec, 2, 5);
    const SketchOracle oracle = build_oracles(worlds, 8, 6);
    const StabConfig cfg = exact_config(6.0, 2, 8, Estimator::C1);
    const TapSolution sol = run_stab(g, spec, cfg, oracle);
    REQUIRE(sol.order.size() == 2);
    CHECK(sol.order[0] == 0);
    CHECK(sol.order[1] == 3);
}

TEST_CASE("marginal-gain-below-one stop fires when propagation is hopeless") {
    // Edgeless graph with heavy external influence: residual worlds lose
    // the externally covered nodes, so every candidate's gain is a
    // fraction of worlds and usually below 1.
    const DirectedGraph g(5, {});
    InfluenceSpec spec = test::flat_ic(g, 0.5);
    spec.ext = ExternalSpec::bernoulli(std::vector<double>(5, 0.5));
    const auto worlds = sample_worlds(g, spec, 4, 21);
    const SketchOracle oracle = build_oracles(worlds, 8, 22);
    // residual worlds lose externally covered nodes, so per-node tau < 1
    StabConfig cfg = exact_config(4.9, 4, 8, Estimator::C2);
    const TapSolution sol = run_stab(g, spec, cfg, oracle);
    if (sol.stopped_by == StopReason::MarginalGainBelowOne) {
        CHECK(sol.estimated_activation < 4.9 * 0.9);
        for (const TraceStep &step : sol.trace)
            CHECK(step.gain >= 1.0);
    }

    cfg.enforce_cea_stop = false;
    const TapSolution sol2 = run_stab(g, spec, cfg, oracle);
    CHECK((sol2.stopped_by == StopReason::ThresholdMet ||
           sol2.stopped_by == StopReason::Exhausted));
}

TEST_CASE("lazy greedy matches the plain driver on exact sketches") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const NodeId n = 18;
        const DirectedGraph g = test::random_digraph(n, 0.12, seed + 200);
        InfluenceSpec spec;
        spec.trig = TriggeringSpec::uniform_ic(g, 0.7, seed);
        spec.ext = ExternalSpec::none();
        const std::uint32_t ell = 6, k = n * ell; // exact sketches
        const auto worlds = sample_worlds(g, spec, ell, seed + 3);
        const SketchOracle oracle = build_oracles(worlds, k, seed + 4);

        for (Estimator est : {Estimator::C1, Estimator::C2}) {
            StabConfig cfg = exact_config(10.0, ell, k, est);
            const TapSolution plain = run_stab(g, spec, cfg, oracle);
            cfg.lazy_eval = true;
            const TapSolution lazy = run_stab(g, spec, cfg, oracle);
            CHECK(plain.order == lazy.order);
            REQUIRE(plain.trace.size() == lazy.trace.size());
            for (std::size_t i = 0; i < plain.trace.size(); ++i) {
                CHECK(plain.trace[i].gain == doctest::Approx(lazy.trace[i].gain));
                CHECK(plain.trace[i].sigma_hat_after ==
                      doctest::Approx(lazy.trace[i].sigma_hat_after));
            }
            CHECK(lazy.evaluations <= plain.evaluations);
        }
    }
}

TEST_CASE("lazy evaluation count is far below the exhaustive scan on ER") {
    const NodeId n = 1000;
    const DirectedGraph g = generate_er(n, 2.0 / n, 101);
    InfluenceSpec spec;
    spec.trig = TriggeringSpec::uniform_ic(g, 0.6, 31);
    spec.ext = ExternalSpec::none();
    const std::uint32_t ell = 32, k = 64;
    const auto worlds = sample_worlds(g, spec, ell, 103, 4);
    const SketchOracle oracle = build_oracles(worlds, k, 105, 4);

    StabConfig cfg;
    cfg.threshold = 150.0;
    cfg.alpha = 0.1;
    cfg.ell_override = ell;
    cfg.k_override = k;
    cfg.estimator = Estimator::C2;
    const TapSolution plain = run_stab(g, spec, cfg, oracle);
    cfg.lazy_eval = true;
    const TapSolution lazy = run_stab(g, spec, cfg, oracle);

    REQUIRE(plain.order.size() >= 5); // enough iterations for laziness to pay
    CHECK(lazy.order.size() >= 1);
    CHECK(lazy.evaluations <=
          static_cast<std::uint64_t>(n) * std::max<std::size_t>(lazy.order.size(), 1));
    CHECK(lazy.evaluations * 2 <= plain.evaluations);
    // first pick always agrees while all bounds are fresh
    CHECK(lazy.order[0] == plain.order[0]);
}

TEST_CASE("oracle and config mismatches are input errors") {
    const DirectedGraph g = test::random_digraph(10, 0.2, 7);
    InfluenceSpec spec = test::flat_ic(g, 0.5);
    const auto worlds = sample_worlds(g, spec, 4, 1);
    const SketchOracle oracle = build_oracles(worlds, 8, 2);

    StabConfig cfg = exact_config(5.0, 999, 8, Estimator::C1); // wrong ell
    CHECK_THROWS_AS(run_stab(g, spec, cfg, oracle), InputError);

    const DirectedGraph other = test::random_digraph(11, 0.2, 8);
    InfluenceSpec other_spec = test::flat_ic(other, 0.5);
    StabConfig ok = exact_config(5.0, 4, 8, Estimator::C1);
    CHECK_THROWS_AS(run_stab(other, other_spec, ok, oracle), InputError);
}
