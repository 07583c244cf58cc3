#include "pmlab/dp_games.hpp"

#include <array>
#include <stdexcept>
#include <vector>

namespace pmlab {

namespace {

void check_spec(const DpSpec& spec) {
    if (spec.n_prices < 1 || spec.n_valuations < 2) {
        throw std::invalid_argument("dynamic pricing needs N >= 1 prices and M >= 2 valuations");
    }
}

Game dp_game(const DpSpec& spec, bool hard) {
    check_spec(spec);
    const auto n = static_cast<Eigen::Index>(spec.n_prices);
    const auto m = static_cast<Eigen::Index>(spec.n_valuations);
    Matrix loss(n, m);
    IndexMatrix feedback(n, m);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < m; ++c) {
            const double price = static_cast<double>(r + 1);
            const double value = static_cast<double>(c + 1);
            const bool sold = r <= c;
            loss(r, c) = sold ? (hard ? value - price : -price) : spec.penalty;
            feedback(r, c) = sold ? 0 : 1;
        }
    }
    return Game(std::move(loss), std::move(feedback), 2);
}

}  // namespace

Game dp_easy(const DpSpec& spec) {
    if (!(spec.penalty > -1.0)) throw std::invalid_argument("dp-easy needs c > -1");
    return dp_game(spec, false);
}

Game dp_hard(const DpSpec& spec) {
    if (!(spec.penalty > 0.0)) throw std::invalid_argument("dp-hard needs c > 0");
    return dp_game(spec, true);
}

Vector default_opponent(std::size_t n_outcomes) {
    static const std::array<std::vector<double>, 6> table = {{
        {0.7, 0.3},
        {0.5, 0.3, 0.2},
        {0.3, 0.3, 0.3, 0.1},
        {0.2, 0.3, 0.3, 0.1, 0.1},
        {0.2, 0.2, 0.3, 0.1, 0.1, 0.1},
        {0.2, 0.2, 0.3, 0.1, 0.1, 0.05, 0.05},
    }};
    if (n_outcomes < 2 || n_outcomes > 7) {
        throw std::invalid_argument("no default opponent strategy for M = " +
                                    std::to_string(n_outcomes) +
                                    "; pass one explicitly with --opponent");
    }
    const auto& row = table[n_outcomes - 2];
    return Eigen::Map<const Vector>(row.data(), static_cast<Eigen::Index>(row.size()));
}

BoundaryPoint dp_easy_boundary_point(std::size_t j, std::size_t k, double c,
                                     std::size_t n_outcomes) {
    if (j >= k || k >= n_outcomes) {
        throw std::invalid_argument("boundary point needs 1 <= j < k <= M");
    }
    if (!(c > -1.0)) throw std::invalid_argument("boundary point needs c > -1");
    const double jj = static_cast<double>(j + 1);
    const double kk = static_cast<double>(k + 1);
    BoundaryPoint out;
    out.alpha = (kk - jj) / (c + kk);
    out.p = Vector::Zero(static_cast<Eigen::Index>(n_outcomes));
    out.p[static_cast<Eigen::Index>(j)] = out.alpha;
    out.p[static_cast<Eigen::Index>(k)] = 1.0 - out.alpha;
    return out;
}

OutcomeStream::OutcomeStream(const Vector& p, std::uint64_t seed)
    : engine_(seed), dist_(p.data(), p.data() + p.size()) {}

}  // namespace pmlab
