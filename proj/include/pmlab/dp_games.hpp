#pragma once

#include "pmlab/game.hpp"

#include <cstdint>
#include <random>

namespace pmlab {

// Dynamic pricing: action i is a posted price, outcome j the buyer's
// valuation (both 1-based in the formulas below). Symbol 1 = buy (i <= j),
// symbol 2 = no buy.
struct DpSpec {
    std::size_t n_prices = 3;
    std::size_t n_valuations = 3;
    double penalty = 2.0;  // c
};

// loss(i, j) = -i if i <= j else c. Accepts c > -1.
Game dp_easy(const DpSpec& spec);
// loss(i, j) = j - i if i <= j else c. Requires c > 0.
Game dp_hard(const DpSpec& spec);

// Opponent strategies used in the dynamic-pricing experiments, M in 2..7.
Vector default_opponent(std::size_t n_outcomes);

struct BoundaryPoint {
    double alpha = 0.0;
    Vector p;
};

// alpha* e_j + (1 - alpha*) e_k with alpha* = (k - j) / (c + k), at which
// prices j < k tie for the optimum of dp_easy. j, k are 0-based here; the
// formula uses their 1-based values.
BoundaryPoint dp_easy_boundary_point(std::size_t j, std::size_t k, double c,
                                     std::size_t n_outcomes);

// i.i.d. outcomes drawn from a fixed opponent strategy.
class OutcomeStream {
public:
    OutcomeStream(const Vector& p, std::uint64_t seed);
    std::size_t next() { return dist_(engine_); }

private:
    std::mt19937_64 engine_;
    std::discrete_distribution<std::size_t> dist_;
};

}  // namespace pmlab
