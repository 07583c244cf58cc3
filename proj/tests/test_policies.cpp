#include "oracles.hpp"
#include "pmlab/dp_games.hpp"
#include "pmlab/harness.hpp"
#include "pmlab/policies.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace pmlab;

namespace {

ExperimentConfig easy_config(PolicyKind kind, std::size_t horizon, std::uint64_t seed = 1) {
    ExperimentConfig cfg{dp_easy({3, 3, 2.0}), default_opponent(3), PolicyConfig{}};
    cfg.policy.kind = kind;
    cfg.horizon = horizon;
    cfg.trials = 1;
    cfg.seed = seed;
    return cfg;
}

Game full_feedback(const Matrix& L) {
    IndexMatrix H(L.rows(), L.cols());
    for (Eigen::Index i = 0; i < L.rows(); ++i) {
        for (Eigen::Index j = 0; j < L.cols(); ++j) H(i, j) = static_cast<int>(j);
    }
    return Game(L, H);
}

constexpr PolicyKind kAll[] = {PolicyKind::tspm, PolicyKind::tspm_gaussian, PolicyKind::bpm_ts,
                               PolicyKind::feedexp3, PolicyKind::random};

}  // namespace

TEST_SUITE("policies") {

TEST_CASE("policy names round trip") {
    for (PolicyKind k : kAll) CHECK(parse_policy_kind(policy_name(k)) == k);
    CHECK_THROWS_AS(parse_policy_kind("ucb"), std::invalid_argument);
}

TEST_CASE("decision rule is the lowest-index argmin") {
    const Game g = dp_easy({3, 3, 2.0});
    Vector p(3);
    p << 0.5, 0.3, 0.2;
    CHECK(best_action(g, p) == 0);
    for (std::size_t j = 0; j < 3; ++j) {
        Eigen::Index best;
        g.loss().col(Eigen::Index(j)).minCoeff(&best);
        CHECK(best_action(g, Vector::Unit(3, Eigen::Index(j))) == std::size_t(best));
    }
    CHECK(best_action(g, Vector::Zero(3)) == 0);
}

TEST_CASE("warm-up plays actions round-robin") {
    for (PolicyKind kind : {PolicyKind::tspm, PolicyKind::tspm_gaussian, PolicyKind::bpm_ts}) {
        const TrialResult r = run_trial(easy_config(kind, 80), 0);
        for (std::size_t t = 0; t < 60; ++t) CHECK(r.actions[t] == t % 3);
    }
    auto cfg = easy_config(PolicyKind::tspm, 10);
    cfg.policy.init_rounds_per_action = 2;
    const TrialResult r = run_trial(cfg, 0);
    for (std::size_t t = 0; t < 6; ++t) CHECK(r.actions[t] == t % 3);
    cfg.policy.init_rounds_per_action = 0;
    CHECK_THROWS(run_trial(cfg, 0));
}

TEST_CASE("TSPM with R = 0 is the Gaussian variant") {
    auto a = easy_config(PolicyKind::tspm, 1500, 4);
    a.policy.R = 0.0;
    const auto b = easy_config(PolicyKind::tspm_gaussian, 1500, 4);
    const TrialResult ra = run_trial(a, 0);
    const TrialResult rb = run_trial(b, 0);
    CHECK(ra.actions == rb.actions);
    CHECK(ra.inner_rejections == rb.inner_rejections);
    for (auto v : ra.outer_rejections) CHECK(v == 0);
}

TEST_CASE("policies are deterministic under a fixed seed") {
    for (PolicyKind kind : kAll) {
        const auto cfg = easy_config(kind, 800, 11);
        const TrialResult x = run_trial(cfg, 2);
        const TrialResult y = run_trial(cfg, 2);
        CHECK(x.actions == y.actions);
        CHECK(x.inner_rejections == y.inner_rejections);
        CHECK(x.outer_rejections == y.outer_rejections);
        for (std::size_t a : x.actions) CHECK(a < 3);
    }
}

TEST_CASE("action sequences ignore loss scaling and shifts") {
    for (PolicyKind kind : kAll) {
        const auto base = easy_config(kind, 600, 3);
        const TrialResult ref = run_trial(base, 0);
        auto shifted = base;
        shifted.game = base.game.with_loss(base.game.loss().array() + 3.0);
        CHECK(run_trial(shifted, 0).actions == ref.actions);
        if (kind == PolicyKind::feedexp3) continue;
        auto scaled = base;
        scaled.game = base.game.with_loss(2.0 * base.game.loss());
        CHECK(run_trial(scaled, 0).actions == ref.actions);
    }
}

TEST_CASE("BPM-TS concentrates on the optimal action") {
    const Game g = dp_easy({3, 3, 2.0});
    BpmPosterior post(g, 0.001);
    // Exact symbol frequencies under p* = (0.5, 0.3, 0.2).
    const int n = 100000;
    for (int k = 0; k < n; ++k) post.update(0, 0);
    for (int k = 0; k < n / 2; ++k) post.update(1, 0);
    for (int k = 0; k < n / 2; ++k) post.update(1, 1);
    for (int k = 0; k < n / 5; ++k) post.update(2, 0);
    for (int k = 0; k < 4 * n / 5; ++k) post.update(2, 1);
    const Matrix cov = post.precision().inverse();
    REQUIRE(Eigen::SelfAdjointEigenSolver<Matrix>(cov).eigenvalues().maxCoeff() <= 1e-4);
    Rng rng(12);
    int hits = 0;
    for (int k = 0; k < 10000; ++k) hits += best_action(g, post.sample(rng)) == 0;
    CHECK(hits >= 9900);
}

TEST_CASE("FeedExp3 estimator reproduces every loss row") {
    for (const Game& g : {dp_easy({3, 3, 2.0}), dp_hard({3, 3, 2.0}), dp_easy({5, 5, 2.0})}) {
        const Matrix k = FeedExp3Policy::estimator_coefficients(g);
        const auto a = static_cast<Eigen::Index>(g.n_symbols());
        for (std::size_t j = 0; j < g.n_actions(); ++j) {
            Vector rebuilt = Vector::Zero(Eigen::Index(g.n_outcomes()));
            for (std::size_t i = 0; i < g.n_actions(); ++i) {
                const Matrix S = oracle::signal(g, i);
                for (Eigen::Index y = 0; y < a; ++y) {
                    rebuilt += k(Eigen::Index(i) * a + y, Eigen::Index(j)) * S.row(y).transpose();
                }
            }
            CHECK((rebuilt - oracle::loss_row(g, j)).norm() <= 1e-8);
        }
    }
    Matrix L(2, 2);
    L << 0, 1, 1, 0;
    const Game blind(L, IndexMatrix::Zero(2, 2), 1);
    CHECK_THROWS_AS(FeedExp3Policy::estimator_coefficients(blind), std::invalid_argument);
    CHECK_THROWS_AS(make_policy(blind, PolicyConfig{PolicyKind::feedexp3}), std::invalid_argument);
}

TEST_CASE("FeedExp3 loss estimates are unbiased") {
    const Game g = dp_easy({3, 3, 2.0});
    const Vector p = default_opponent(3);
    const Matrix k = FeedExp3Policy::estimator_coefficients(g);
    Vector pi(3);
    pi << 0.2, 0.5, 0.3;
    std::mt19937_64 rng(77);
    std::discrete_distribution<std::size_t> act({0.2, 0.5, 0.3});
    std::discrete_distribution<std::size_t> out({0.5, 0.3, 0.2});
    const int draws = 100000;
    Vector sum = Vector::Zero(3), sq = Vector::Zero(3);
    for (int t = 0; t < draws; ++t) {
        const std::size_t i = act(rng);
        const std::size_t y = g.symbol(i, out(rng));
        const Vector est =
            k.row(Eigen::Index(i * g.n_symbols() + y)).transpose() / pi[Eigen::Index(i)];
        sum += est;
        sq += est.cwiseProduct(est);
    }
    const Vector mean = sum / draws;
    const Vector truth = g.loss() * p;
    for (Eigen::Index j = 0; j < 3; ++j) {
        const double sd = std::sqrt((sq[j] / draws - mean[j] * mean[j]) / draws);
        CHECK(std::abs(mean[j] - truth[j]) <= 3.0 * sd);
    }
}

TEST_CASE("FeedExp3 starts uniform on a symmetric game") {
    Matrix L(2, 2);
    L << 0, 1, 1, 0;
    FeedExp3Policy pol(full_feedback(L), 1.0, 1.0);
    CHECK((pol.distribution(1) - Vector::Constant(2, 0.5)).norm() <= 1e-15);
    Rng rng(6);
    const int draws = 10000;
    int first = 0;
    for (int t = 0; t < draws; ++t) first += pol.select_action(1, rng).action == 0;
    CHECK(std::abs(first - draws / 2) <= 3.0 * std::sqrt(draws * 0.25));
}

TEST_CASE("FeedExp3 exploration schedule") {
    const Game g = dp_easy({3, 3, 2.0});
    FeedExp3Policy pol(g, 1.0, 1.0);
    Rng rng(2);
    for (std::uint64_t t = 1; t <= 500; ++t) {
        const Selection s = pol.select_action(t, rng);
        const Vector d = pol.distribution(t);
        const double gamma = std::min(1.0, std::pow(double(t), -1.0 / 3.0));
        CHECK(d.sum() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(d.minCoeff() >= gamma / 3.0 - 1e-15);
        pol.observe(s.action, g.symbol(s.action, t % 3));
    }
    CHECK_THROWS_AS(FeedExp3Policy(g, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("random policy") {
    RandomPolicy one(1);
    Rng rng(1);
    for (int t = 0; t < 100; ++t) CHECK(one.select_action(1, rng).action == 0);

    RandomPolicy three(3);
    std::vector<int> counts(3, 0);
    const int draws = 30000;
    for (int t = 0; t < draws; ++t) ++counts[three.select_action(1, rng).action];
    for (int c : counts) CHECK(std::abs(c / double(draws) - 1.0 / 3.0) <= 0.01);

    Rng a(5), b(5);
    for (int t = 0; t < 100; ++t) {
        CHECK(three.select_action(1, a).action == three.select_action(1, b).action);
    }
}

TEST_CASE("invalid policy settings are rejected") {
    const Game g = dp_easy({3, 3, 2.0});
    PolicyConfig cfg;
    cfg.R = 1.5;
    CHECK_THROWS_AS(make_policy(g, cfg), std::invalid_argument);
    cfg.R = 1.0;
    cfg.lambda = 0.0;
    CHECK_THROWS_AS(make_policy(g, cfg), std::invalid_argument);
    cfg.kind = PolicyKind::bpm_ts;
    CHECK_THROWS_AS(make_policy(g, cfg), std::invalid_argument);
}

}
