#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tap/exact.hpp"
#include "test_support.hpp"

using namespace tap;

TEST_CASE("single uncertain edge") {
    DirectedGraph g(2, {{0, 1}});
    InfluenceSpec spec;
    spec.trig = TriggeringSpec::independent_cascade({0.5});
    spec.ext = ExternalSpec::none();
    CHECK(exact_sigma(g, spec, NodeSet{0}) == Rational(3, 2));
    CHECK(exact_sigma(g, spec, NodeSet{}) == Rational(0));
}

TEST_CASE("single edge with external influence on the endpoint") {
    // b is active if the edge lives or b is externally seeded:
    // sigma({a}) = 1 + (1 - 0.5*0.5) = 7/4
    DirectedGraph g(2, {{0, 1}});
    InfluenceSpec spec;
    spec.trig = TriggeringSpec::independent_cascade({0.5});
    spec.ext = ExternalSpec::bernoulli({0.0, 0.5});
    CHECK(exact_sigma(g, spec, NodeSet{0}) == Rational(7, 4));
    // empty seed set still picks up the external component
    CHECK(exact_sigma(g, spec, NodeSet{}) == Rational(1, 2));
}

TEST_CASE("exact sigma agrees between IC enumeration and a hand sum") {
    // chain 0->1->2 with probs 1/2 and 1/4:
    // sigma({0}) = 1 + 1/2 + 1/8
    DirectedGraph g(3, {{0, 1}, {1, 2}});
    InfluenceSpec spec;
    spec.trig = TriggeringSpec::independent_cascade({0.5, 0.25});
    spec.ext = ExternalSpec::none();
    CHECK(exact_sigma(g, spec, NodeSet{0}) == Rational(13, 8));
}

TEST_CASE("LT exact enumeration matches first principles") {
    // node 2 takes edge (0,2) w.p. 1/4, (1,2) w.p. 1/4, none w.p. 1/2.
    // sigma({0}) = 1 + 1/4
    DirectedGraph g(3, {{0, 2}, {1, 2}});
    InfluenceSpec spec;
    spec.trig = TriggeringSpec::linear_threshold({0.25, 0.25});
    spec.ext = ExternalSpec::none();
    CHECK(exact_sigma(g, spec, NodeSet{0}) == Rational(5, 4));
}

TEST_CASE("refusals: too many nodes or outcomes, generic models") {
    const DirectedGraph big = test::random_digraph(30, 0.1, 1);
    InfluenceSpec spec = test::flat_ic(big, 0.5);
    CHECK_THROWS_AS(exact_sigma(big, spec, NodeSet{0}), ResourceLimitError);

    const DirectedGraph g = test::random_digraph(8, 0.5, 2);
    InfluenceSpec dense = test::flat_ic(g, 0.5);
    ExactBudget tiny;
    tiny.max_outcomes = 4;
    CHECK_THROWS_AS(exact_sigma(g, dense, NodeSet{0}, tiny), ResourceLimitError);

    InfluenceSpec gen;
    gen.trig = TriggeringSpec::generic(
        [](const DirectedGraph &, NodeId, SplitMix64 &) { return std::vector<NodeId>{}; });
    CHECK_THROWS_AS(exact_sigma(g, gen, NodeSet{0}), InputError);
}

TEST_CASE("exact sigma matches a Monte Carlo cross-check") {
    const DirectedGraph g = test::random_digraph(7, 0.25, 5);
    InfluenceSpec spec;
    spec.trig = TriggeringSpec::uniform_ic(g, 0.6, 3);
    spec.ext = ExternalSpec::uniform_bernoulli(7, 0.2, 3);
    const NodeSet seeds{1, 4};
    const double exact = exact_sigma(g, spec, seeds).convert_to<double>();

    const int samples = 200000;
    double sum = 0, sq = 0;
    for (int s = 0; s < samples; ++s) {
        SplitMix64 rng = derive_stream(777, s);
        const double a = simulate_cascade(g, spec, seeds, rng);
        sum += a;
        sq += a * a;
    }
    const double mean = sum / samples;
    const double var = (sq - samples * mean * mean) / (samples - 1);
    const double se = std::sqrt(var / samples);
    CHECK(std::abs(mean - exact) < 4.0 * se);
}

TEST_CASE("monotone and submodular, exhaustively on small instances") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const NodeId n = 5;
        const DirectedGraph g = test::random_digraph(n, 0.3, seed + 11);
        InfluenceSpec spec;
        spec.trig = TriggeringSpec::uniform_ic(g, 0.7, seed);
        spec.ext = ExternalSpec::uniform_bernoulli(n, 0.2, seed);
        const ExactSigmaOracle oracle(g, spec);

        std::vector<Rational> sigma(1u << n);
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask)
            sigma[mask] = oracle.sigma_mask(mask);

        for (std::uint32_t a = 0; a < (1u << n); ++a) {
            for (std::uint32_t b = a;; b = (b + 1) | a) { // supersets of a
                for (NodeId x = 0; x < n; ++x) {
                    if (b & (1u << x))
                        continue;
                    const Rational da = sigma[a | (1u << x)] - sigma[a];
                    const Rational db = sigma[b | (1u << x)] - sigma[b];
                    CHECK(da >= db);
                }
                if (b == ((1u << n) - 1))
                    break;
            }
        }
    }
}
