#pragma once

#include "pmlab/bpm.hpp"
#include "pmlab/game.hpp"
#include "pmlab/posterior.hpp"
#include "pmlab/rng.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace pmlab {

enum class PolicyKind { tspm, tspm_gaussian, bpm_ts, feedexp3, random };

PolicyKind parse_policy_kind(std::string_view name);
std::string policy_name(PolicyKind kind);

struct PolicyConfig {
    PolicyKind kind = PolicyKind::tspm;
    double lambda = 0.001;
    double R = 1.0;  // ignored unless kind == tspm
    // Plays of each action before sampling starts; unset means 10 * A.
    std::optional<std::size_t> init_rounds_per_action;
    double c_gamma = 1.0;
    double c_eta = 1.0;
    SamplerLimits limits;
};

struct Selection {
    std::size_t action = 0;
    std::uint64_t inner_rejections = 0;
    std::uint64_t outer_rejections = 0;
};

// Deterministic given the game, configuration, the RNG stream handed to
// select_action and the observed symbols.
class Policy {
public:
    virtual ~Policy() = default;
    // `round` is 1-based.
    virtual Selection select_action(std::uint64_t round, Rng& rng) = 0;
    virtual void observe(std::size_t action, std::size_t symbol) = 0;
};

std::unique_ptr<Policy> make_policy(const Game& game, const PolicyConfig& config);

// Round-robin warm-up shared by the Thompson-sampling policies: actions
// 1..N in order, repeated n times.
class WarmUp {
public:
    WarmUp(std::size_t n_actions, std::size_t rounds_per_action)
        : n_actions_(n_actions), total_(n_actions * rounds_per_action) {}
    std::optional<std::size_t> next() {
        if (issued_ >= total_) return std::nullopt;
        return issued_++ % n_actions_;
    }

private:
    std::size_t n_actions_;
    std::size_t total_;
    std::size_t issued_ = 0;
};

class TspmPolicy final : public Policy {
public:
    TspmPolicy(const Game& game, double lambda, double R, std::size_t init_rounds,
               SamplerLimits limits = {});
    Selection select_action(std::uint64_t round, Rng& rng) override;
    void observe(std::size_t action, std::size_t symbol) override;
    const PosteriorState& posterior() const { return state_; }

private:
    Game game_;
    PosteriorState state_;
    double R_;
    WarmUp warm_up_;
    SamplerLimits limits_;
};

class BpmTsPolicy final : public Policy {
public:
    BpmTsPolicy(const Game& game, double lambda, std::size_t init_rounds);
    Selection select_action(std::uint64_t round, Rng& rng) override;
    void observe(std::size_t action, std::size_t symbol) override;

private:
    Game game_;
    BpmPosterior state_;
    WarmUp warm_up_;
};

// Exponential weights over importance-weighted loss estimates
// lhat_j = k(i, y, j) / pi_i, where sum_{i,y} k(i,y,j) (S_i)_{y,m} = l_{j,m}.
// Exploration gamma_t = min(1, c_gamma t^{-1/3}), rate eta_t = c_eta t^{-2/3}.
class FeedExp3Policy final : public Policy {
public:
    FeedExp3Policy(const Game& game, double c_gamma, double c_eta);
    Selection select_action(std::uint64_t round, Rng& rng) override;
    void observe(std::size_t action, std::size_t symbol) override;

    // Row i*A + y, column j holds k(i, y, j). Throws std::invalid_argument
    // when some loss row is not reproduced within 1e-8.
    static Matrix estimator_coefficients(const Game& game);

    // Mixed distribution for the given round and the current estimates.
    Vector distribution(std::uint64_t round) const;

private:
    std::size_t n_actions_;
    std::size_t n_symbols_;
    Matrix coeffs_;
    Vector cumulative_;
    Vector last_distribution_;
    double c_gamma_;
    double c_eta_;
};

class RandomPolicy final : public Policy {
public:
    explicit RandomPolicy(std::size_t n_actions) : n_actions_(n_actions) {}
    Selection select_action(std::uint64_t, Rng& rng) override {
        return Selection{rng.uniform_index(n_actions_)};
    }
    void observe(std::size_t, std::size_t) override {}

private:
    std::size_t n_actions_;
};

}  // namespace pmlab
