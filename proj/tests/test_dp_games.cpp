#include "oracles.hpp"
#include "pmlab/dp_games.hpp"
#include "pmlab/structure.hpp"

#include <doctest.h>

using namespace pmlab;

TEST_SUITE("dp_games") {

TEST_CASE("easy pricing matrices") {
    Matrix L(3, 3);
    L << -1, -1, -1, 2, -2, -2, 2, 2, -3;
    const Game g = dp_easy({3, 3, 2.0});
    CHECK(g.loss() == L);
    CHECK(g.n_symbols() == 2);

    IndexMatrix H(2, 2);
    H << 0, 0, 1, 0;
    CHECK(dp_easy({2, 2, 2.0}).feedback() == H);

    // The top price sells only at the top valuation.
    const Game g5 = dp_easy({5, 5, 2.0});
    for (std::size_t j = 0; j < 4; ++j) CHECK(g5.symbol(4, j) == 1);
    CHECK(g5.symbol(4, 4) == 0);
}

TEST_CASE("hard pricing matrices") {
    Matrix L(3, 3);
    L << 0, 1, 2, 2, 0, 1, 2, 2, 0;
    const Game g = dp_hard({3, 3, 2.0});
    CHECK(g.loss() == L);
    const Game h = dp_hard({6, 6, 3.0});
    CHECK(h.loss().diagonal() == Vector::Zero(6));
    CHECK(h.feedback() == dp_easy({6, 6, 3.0}).feedback());
    CHECK(dp_hard({4, 6, 2.0}).n_actions() == 4);
}

TEST_CASE("penalty ranges") {
    CHECK_NOTHROW(dp_easy({3, 3, -0.5}));
    CHECK_THROWS_AS(dp_easy({3, 3, -1.0}), std::invalid_argument);
    CHECK_THROWS_AS(dp_hard({3, 3, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(dp_easy({3, 1, 2.0}), std::invalid_argument);
}

TEST_CASE("default opponents") {
    CHECK(default_opponent(2) == (Vector(2) << 0.7, 0.3).finished());
    CHECK(default_opponent(3) == (Vector(3) << 0.5, 0.3, 0.2).finished());
    CHECK(default_opponent(5) == (Vector(5) << 0.2, 0.3, 0.3, 0.1, 0.1).finished());
    CHECK(default_opponent(7) ==
          (Vector(7) << 0.2, 0.2, 0.3, 0.1, 0.1, 0.05, 0.05).finished());
    for (std::size_t m = 2; m <= 7; ++m) {
        const Vector p = default_opponent(m);
        CHECK(p.size() == Eigen::Index(m));
        CHECK(p.minCoeff() >= 0.0);
        CHECK(std::abs(p.sum() - 1.0) <= 1e-12);
    }
    CHECK_THROWS_WITH_AS(default_opponent(8), doctest::Contains("--opponent"),
                         std::invalid_argument);
    CHECK_THROWS_AS(default_opponent(1), std::invalid_argument);
}

TEST_CASE("boundary points tie the two prices") {
    for (double c : {-0.5, 0.5, 2.0, 10.0}) {
        for (std::size_t m = 2; m <= 7; ++m) {
            const Game g = dp_easy({m, m, c});
            for (std::size_t j = 0; j < m; ++j) {
                for (std::size_t k = j + 1; k < m; ++k) {
                    const BoundaryPoint bp = dp_easy_boundary_point(j, k, c, m);
                    CHECK(bp.alpha >= 0.0);
                    CHECK(bp.alpha <= 1.0);
                    CHECK(bp.p.sum() == doctest::Approx(1.0));
                    const Vector losses = g.loss() * bp.p;
                    CHECK(std::abs(losses[Eigen::Index(j)] - losses[Eigen::Index(k)]) <= 1e-12);
                    CHECK(losses[Eigen::Index(j)] <= losses.minCoeff() + 1e-12);
                }
            }
        }
    }
    CHECK(dp_easy_boundary_point(0, 1, 2.0, 3).alpha == 0.25);
    double prev = 1.0;
    for (double c : {1.0, 10.0, 100.0, 1e4}) {
        const double a = dp_easy_boundary_point(0, 4, c, 5).alpha;
        CHECK(a < prev);
        prev = a;
    }
    CHECK(prev < 1e-3);
    CHECK_THROWS_AS(dp_easy_boundary_point(1, 1, 2.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(dp_easy_boundary_point(2, 1, 2.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(dp_easy_boundary_point(0, 3, 2.0, 3), std::invalid_argument);
}

TEST_CASE("every pair of easy pricing actions are neighbours for c > -1") {
    for (double c : {-0.5, 0.5, 2.0}) {
        for (std::size_t m = 2; m <= 5; ++m) {
            const Game g = dp_easy({m, m, c});
            for (std::size_t j = 0; j < m; ++j) {
                for (std::size_t k = j + 1; k < m; ++k) CHECK(are_neighbors(g, j, k));
            }
        }
    }
}

TEST_CASE("observability classes") {
    for (std::size_t m : {3u, 5u, 7u}) {
        CHECK(is_strongly_locally_observable(dp_easy({m, m, 2.0})));
        CHECK_FALSE(is_locally_observable(dp_hard({m, m, 2.0})));
    }
}

TEST_CASE("outcome frequencies follow the opponent") {
    const Vector p = default_opponent(5);
    OutcomeStream s(p, 99);
    const int n = 100000;
    std::vector<int> counts(5, 0);
    for (int t = 0; t < n; ++t) ++counts[s.next()];
    for (Eigen::Index j = 0; j < 5; ++j) {
        const double sd = std::sqrt(n * p[j] * (1.0 - p[j]));
        CHECK(std::abs(counts[std::size_t(j)] - n * p[j]) <= 3.0 * sd);
    }
    OutcomeStream a(p, 4), b(p, 4);
    for (int t = 0; t < 100; ++t) CHECK(a.next() == b.next());
}

}
