#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tap/influence.hpp"
#include "test_support.hpp"

using namespace tap;

TEST_CASE("IC live-edge sampling at the extremes") {
    const DirectedGraph g = test::random_digraph(10, 0.3, 1);
    SplitMix64 rng(5);

    auto all = TriggeringSpec::independent_cascade(std::vector<double>(g.edge_count(), 1.0));
    CHECK(sample_live_edge_graph(g, all, rng).edge_list() == g.edge_list());

    auto none = TriggeringSpec::independent_cascade(std::vector<double>(g.edge_count(), 0.0));
    CHECK(sample_live_edge_graph(g, none, rng).edge_count() == 0);
}

TEST_CASE("LT kept-edge frequencies match the multinomial rule") {
    // node 2 has in-edges from 0 (weight 0.3) and 1 (weight 0.4)
    DirectedGraph g(3, {{0, 2}, {1, 2}});
    std::vector<double> w(g.edge_count());
    // edge ids sorted by (src,dst): (0,2)=0, (1,2)=1
    w[0] = 0.3;
    w[1] = 0.4;
    auto spec = TriggeringSpec::linear_threshold(w);
    spec.validate(g);

    SplitMix64 rng(11);
    const int samples = 100000;
    int from0 = 0, from1 = 0, nothing = 0;
    for (int s = 0; s < samples; ++s) {
        const DirectedGraph live = sample_live_edge_graph(g, spec, rng);
        const auto in = live.in_neighbors(2);
        REQUIRE(in.size() <= 1);
        if (in.empty())
            ++nothing;
        else if (in[0] == 0)
            ++from0;
        else
            ++from1;
    }
    auto within3sigma = [samples](int count, double p) {
        const double sd = std::sqrt(samples * p * (1 - p));
        return std::abs(count - samples * p) < 3.0 * sd;
    };
    CHECK(within3sigma(from0, 0.3));
    CHECK(within3sigma(from1, 0.4));
    CHECK(within3sigma(nothing, 0.3));
}

TEST_CASE("LT live-edge graphs give every node in-degree at most 1") {
    const DirectedGraph g = test::random_digraph(20, 0.2, 3);
    const auto spec = TriggeringSpec::uniform_lt(g, 1.0, 17);
    spec.validate(g);
    SplitMix64 rng(2);
    for (int s = 0; s < 200; ++s) {
        const DirectedGraph live = sample_live_edge_graph(g, spec, rng);
        for (NodeId v = 0; v < live.node_count(); ++v)
            CHECK(live.in_degree(v) <= 1);
    }
}

TEST_CASE("LT validation rejects overweight nodes") {
    DirectedGraph g(3, {{0, 2}, {1, 2}});
    auto spec = TriggeringSpec::linear_threshold({0.7, 0.7});
    CHECK_THROWS_AS(spec.validate(g), InputError);
}

TEST_CASE("generic triggering samples become live edges into the node") {
    DirectedGraph g(4, {{0, 3}, {1, 3}, {2, 3}});
    // always trigger on the full in-neighborhood
    auto spec = TriggeringSpec::generic(
        [](const DirectedGraph &graph, NodeId v, SplitMix64 &) {
            const auto in = graph.in_neighbors(v);
            return std::vector<NodeId>(in.begin(), in.end());
        });
    SplitMix64 rng(1);
    CHECK(sample_live_edge_graph(g, spec, rng).edge_list() == g.edge_list());

    auto bad = TriggeringSpec::generic(
        [](const DirectedGraph &, NodeId v, SplitMix64 &) {
            return std::vector<NodeId>{v}; // self-trigger is invalid
        });
    CHECK_THROWS_AS(sample_live_edge_graph(g, bad, rng), InputError);
}

TEST_CASE("external seed sampling at the extremes") {
    SplitMix64 rng(3);
    CHECK(sample_external_seeds(ExternalSpec::none(), 10, rng).empty());

    auto full = ExternalSpec::bernoulli(std::vector<double>(10, 1.0));
    CHECK(sample_external_seeds(full, 10, rng).size() == 10);
}

TEST_CASE("external seed count concentrates at n * ep") {
    const NodeId n = 10000;
    auto spec = ExternalSpec::bernoulli(std::vector<double>(n, 0.01));
    SplitMix64 rng(8);
    const double mean = 100.0, sd = std::sqrt(n * 0.01 * 0.99);
    const double got = static_cast<double>(sample_external_seeds(spec, n, rng).size());
    CHECK(std::abs(got - mean) < 4.0 * sd);
}

TEST_CASE("make_world without external influence keeps the live graph") {
    const DirectedGraph g = test::random_digraph(12, 0.2, 9);
    InfluenceSpec spec = test::flat_ic(g, 0.5);
    const WorldParts parts = make_world_parts(g, spec, 0, 77);
    CHECK(parts.world.external_reach_size == 0);
    CHECK(parts.world.residual.alive_count() == 12);
    CHECK(parts.world.residual.edge_list() == parts.live.edge_list());
}

TEST_CASE("make_world removes the full closure on a strongly connected graph") {
    // directed cycle, certain edges, one external seed floods everything
    std::vector<Edge> cycle;
    for (NodeId v = 0; v < 6; ++v)
        cycle.push_back({v, static_cast<NodeId>((v + 1) % 6)});
    const DirectedGraph g(6, std::move(cycle));
    InfluenceSpec spec = test::flat_ic(g, 1.0);
    std::vector<double> ep(6, 0.0);
    ep[3] = 1.0;
    spec.ext = ExternalSpec::bernoulli(ep);
    const SampledWorld world = make_world(g, spec, 0, 4);
    CHECK(world.external_reach_size == 6);
    CHECK(world.residual.alive_count() == 0);
}

TEST_CASE("make_world bookkeeping matches an independent recomputation") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const DirectedGraph g = test::random_digraph(20, 0.12, seed + 60);
        InfluenceSpec spec;
        spec.trig = TriggeringSpec::uniform_ic(g, 0.6, seed);
        spec.ext = ExternalSpec::uniform_bernoulli(20, 0.15, seed);
        const WorldParts parts = make_world_parts(g, spec, 2, seed);
        const NodeSet closure = reachable_set(parts.live, parts.external);
        CHECK(parts.world.external_reach_size == closure.size());
        SplitMix64 rng(seed + 1);
        for (int trial = 0; trial < 50; ++trial) {
            const NodeSet seeds = test::random_subset(20, 0.2, rng);
            const auto residual_reach = reachable_set(parts.world.residual, seeds).size();
            const auto joint = reachable_set(parts.live, seeds.unite(closure)).size();
            CHECK(residual_reach == joint - closure.size());
        }
    }
}

TEST_CASE("worlds are reproducible and schedule-independent") {
    const DirectedGraph g = test::random_digraph(30, 0.1, 21);
    InfluenceSpec spec;
    spec.trig = TriggeringSpec::uniform_ic(g, 0.7, 5);
    spec.ext = ExternalSpec::uniform_bernoulli(30, 0.1, 5);
    const auto serial = sample_worlds(g, spec, 8, 33, 1);
    const auto parallel = sample_worlds(g, spec, 8, 33, 4);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].residual.edge_list() == parallel[i].residual.edge_list());
        CHECK(serial[i].external_reach_size == parallel[i].external_reach_size);
    }
}

TEST_CASE("simulate_cascade trivial dynamics") {
    const DirectedGraph g = test::random_digraph(10, 0.3, 2);
    InfluenceSpec frozen = test::flat_ic(g, 0.0);
    SplitMix64 rng(1);
    CHECK(simulate_cascade(g, frozen, NodeSet{3}, rng) == 1);

    std::vector<Edge> chain;
    for (NodeId v = 0; v + 1 < 5; ++v)
        chain.push_back({v, static_cast<NodeId>(v + 1)});
    const DirectedGraph path(5, std::move(chain));
    InfluenceSpec certain = test::flat_ic(path, 1.0);
    CHECK(simulate_cascade(path, certain, NodeSet{0}, rng) == 5);
    CHECK(simulate_cascade(path, certain, NodeSet{}, rng) == 0);
}

TEST_CASE("cascade process mean equals live-edge reachability mean (IC)") {
    const DirectedGraph g = generate_er(50, 2.0 / 50, 19);
    InfluenceSpec spec;
    spec.trig = TriggeringSpec::uniform_ic(g, 0.8, 23);
    spec.ext = ExternalSpec::none();
    const NodeSet seeds{0, 7};

    const int samples = 20000;
    double sum_proc = 0, sq_proc = 0, sum_reach = 0, sq_reach = 0;
    for (int s = 0; s < samples; ++s) {
        SplitMix64 rng = derive_stream(1000, s);
        const double a = simulate_cascade(g, spec, seeds, rng);
        sum_proc += a;
        sq_proc += a * a;

        SplitMix64 rng2 = derive_stream(2000, s);
        const DirectedGraph live = sample_live_edge_graph(g, spec.trig, rng2);
        const double b = static_cast<double>(reachable_set(live, seeds).size());
        sum_reach += b;
        sq_reach += b * b;
    }
    const double mean_p = sum_proc / samples, mean_r = sum_reach / samples;
    const double var_p = (sq_proc - samples * mean_p * mean_p) / (samples - 1);
    const double var_r = (sq_reach - samples * mean_r * mean_r) / (samples - 1);
    const double pooled_se = std::sqrt(var_p / samples + var_r / samples);
    CHECK(std::abs(mean_p - mean_r) < 3.0 * pooled_se);
}
