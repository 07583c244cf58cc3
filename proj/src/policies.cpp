#include "pmlab/policies.hpp"

#include <cmath>
#include <stdexcept>

namespace pmlab {

namespace {

std::size_t warm_up_rounds(const Game& game, const PolicyConfig& config) {
    const std::size_t n = config.init_rounds_per_action.value_or(10 * game.n_symbols());
    if (n < 1) throw std::invalid_argument("initial rounds per action must be >= 1");
    return n;
}

}  // namespace

PolicyKind parse_policy_kind(std::string_view name) {
    if (name == "tspm") return PolicyKind::tspm;
    if (name == "tspm-gaussian") return PolicyKind::tspm_gaussian;
    if (name == "bpm-ts") return PolicyKind::bpm_ts;
    if (name == "feedexp3") return PolicyKind::feedexp3;
    if (name == "random") return PolicyKind::random;
    throw std::invalid_argument("unknown policy '" + std::string(name) +
                                "' (expected tspm, tspm-gaussian, bpm-ts, feedexp3, random)");
}

std::string policy_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::tspm: return "tspm";
        case PolicyKind::tspm_gaussian: return "tspm-gaussian";
        case PolicyKind::bpm_ts: return "bpm-ts";
        case PolicyKind::feedexp3: return "feedexp3";
        case PolicyKind::random: return "random";
    }
    return "unknown";
}

std::unique_ptr<Policy> make_policy(const Game& game, const PolicyConfig& config) {
    switch (config.kind) {
        case PolicyKind::tspm:
            return std::make_unique<TspmPolicy>(game, config.lambda, config.R,
                                                warm_up_rounds(game, config), config.limits);
        case PolicyKind::tspm_gaussian:
            return std::make_unique<TspmPolicy>(game, config.lambda, 0.0,
                                                warm_up_rounds(game, config), config.limits);
        case PolicyKind::bpm_ts:
            return std::make_unique<BpmTsPolicy>(game, config.lambda,
                                                 warm_up_rounds(game, config));
        case PolicyKind::feedexp3:
            return std::make_unique<FeedExp3Policy>(game, config.c_gamma, config.c_eta);
        case PolicyKind::random:
            return std::make_unique<RandomPolicy>(game.n_actions());
    }
    throw std::invalid_argument("unhandled policy kind");
}

TspmPolicy::TspmPolicy(const Game& game, double lambda, double R, std::size_t init_rounds,
                       SamplerLimits limits)
    : game_(game),
      state_(game, lambda),
      R_(R),
      warm_up_(game.n_actions(), init_rounds),
      limits_(limits) {
    if (!(R >= 0.0 && R <= 1.0)) throw std::invalid_argument("R must lie in [0, 1]");
}

Selection TspmPolicy::select_action(std::uint64_t, Rng& rng) {
    if (auto a = warm_up_.next()) return Selection{*a};
    const PosteriorDraw draw = accept_reject_sample(state_, R_, rng, limits_);
    return Selection{best_action(game_, draw.p), draw.inner_rejections, draw.outer_rejections};
}

void TspmPolicy::observe(std::size_t action, std::size_t symbol) {
    state_.update(action, symbol);
}

BpmTsPolicy::BpmTsPolicy(const Game& game, double lambda, std::size_t init_rounds)
    : game_(game), state_(game, lambda), warm_up_(game.n_actions(), init_rounds) {}

Selection BpmTsPolicy::select_action(std::uint64_t, Rng& rng) {
    if (auto a = warm_up_.next()) return Selection{*a};
    return Selection{best_action(game_, state_.sample(rng))};
}

void BpmTsPolicy::observe(std::size_t action, std::size_t symbol) {
    state_.update(action, symbol);
}

Matrix FeedExp3Policy::estimator_coefficients(const Game& game) {
    const auto n = static_cast<Eigen::Index>(game.n_actions());
    const auto a = static_cast<Eigen::Index>(game.n_symbols());
    const auto m = static_cast<Eigen::Index>(game.n_outcomes());
    Matrix stacked(m, n * a);
    for (Eigen::Index i = 0; i < n; ++i) {
        stacked.middleCols(i * a, a) =
            signal_matrix(game, static_cast<std::size_t>(i)).transpose();
    }
    const Matrix targets = game.loss().transpose();  // column j = L_j
    Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Matrix coeffs = svd.solve(targets);
    const Matrix residual = stacked * coeffs - targets;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (residual.col(j).norm() > 1e-8) {
            throw std::invalid_argument(
                "game admits no unbiased loss estimator for action " + std::to_string(j + 1));
        }
    }
    return coeffs;
}

FeedExp3Policy::FeedExp3Policy(const Game& game, double c_gamma, double c_eta)
    : n_actions_(game.n_actions()),
      n_symbols_(game.n_symbols()),
      coeffs_(estimator_coefficients(game)),
      cumulative_(Vector::Zero(static_cast<Eigen::Index>(game.n_actions()))),
      c_gamma_(c_gamma),
      c_eta_(c_eta) {
    if (!(c_gamma > 0.0) || !(c_eta > 0.0)) {
        throw std::invalid_argument("FeedExp3 constants must be positive");
    }
}

Vector FeedExp3Policy::distribution(std::uint64_t round) const {
    const double t = static_cast<double>(std::max<std::uint64_t>(round, 1));
    const double gamma = std::min(1.0, c_gamma_ * std::pow(t, -1.0 / 3.0));
    const double eta = c_eta_ * std::pow(t, -2.0 / 3.0);
    const double floor = cumulative_.minCoeff();
    Vector w(cumulative_.size());
    for (Eigen::Index j = 0; j < w.size(); ++j) w[j] = std::exp(-eta * (cumulative_[j] - floor));
    const double n = static_cast<double>(n_actions_);
    return (1.0 - gamma) * w / w.sum() + Vector::Constant(w.size(), gamma / n);
}

Selection FeedExp3Policy::select_action(std::uint64_t round, Rng& rng) {
    last_distribution_ = distribution(round);
    const double u = rng.uniform();
    double acc = 0.0;
    for (Eigen::Index j = 0; j < last_distribution_.size(); ++j) {
        acc += last_distribution_[j];
        if (u < acc) return Selection{static_cast<std::size_t>(j)};
    }
    return Selection{n_actions_ - 1};
}

void FeedExp3Policy::observe(std::size_t action, std::size_t symbol) {
    if (last_distribution_.size() == 0) {
        throw std::logic_error("FeedExp3 observed feedback before selecting an action");
    }
    const auto row = static_cast<Eigen::Index>(action * n_symbols_ + symbol);
    const double weight = last_distribution_[static_cast<Eigen::Index>(action)];
    cumulative_ += coeffs_.row(row).transpose() / weight;
}

}  // namespace pmlab
