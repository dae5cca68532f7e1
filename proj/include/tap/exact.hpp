#pragma once

#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "tap/influence.hpp"

namespace tap {

// Exact rational; doubles convert into it losslessly, so products and sums
// of sampled probabilities stay exact.
using Rational = boost::multiprecision::cpp_rational;

struct ExactBudget {
    std::uint64_t max_outcomes = 1ull << 22;
    NodeId max_nodes = 25;
};

// Exact expected activation by full enumeration of the live-edge graph
// distribution; external Bernoulli influence folds in per node without
// enumerating subsets. Feasible only for tiny instances; larger ones are
// refused. Generic samplers cannot be enumerated.
class ExactSigmaOracle {
public:
    ExactSigmaOracle(const DirectedGraph &g, const InfluenceSpec &spec, ExactBudget budget = {});

    NodeId node_count() const { return n_; }
    Rational sigma(const NodeSet &seeds) const;
    Rational sigma_mask(std::uint32_t seed_mask) const;

private:
    struct Outcome {
        Rational prob;
        std::vector<std::uint32_t> reach; // closure bitmask per node, includes self
        std::vector<Rational> ext_prob;   // per node: P(activated externally)
    };
    NodeId n_ = 0;
    std::vector<Outcome> outcomes_;
};

Rational exact_sigma(const DirectedGraph &g, const InfluenceSpec &spec, const NodeSet &seeds,
                     ExactBudget budget = {});

} // namespace tap
