#include "pmlab/harness.hpp"

#include "pmlab/dp_games.hpp"
#include "pmlab/rng.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <ostream>
#include <thread>

namespace pmlab {

namespace {

void put_double(std::ostream& out, double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.write(buf, res.ptr - buf);
}

}  // namespace

void ExperimentConfig::validate() const {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (window < 1) throw std::invalid_argument("moving-average window must be >= 1");
    if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
    check_strategy(game, opponent);
}

TrialResult run_trial(const ExperimentConfig& config, std::size_t trial_index) {
    return run_trial(config, trial_index,
                     [&](const Game& g) { return make_policy(g, config.policy); });
}

TrialResult run_trial(const ExperimentConfig& config, std::size_t trial_index,
                      const PolicyFactory& factory) {
    config.validate();
    try {
        const Vector delta = gaps(config.game, config.opponent);
        OutcomeStream env(config.opponent,
                          derive_seed(config.seed, trial_index, StreamRole::environment));
        Rng rng(derive_seed(config.seed, trial_index, StreamRole::policy));
        auto policy = factory(config.game);

        TrialResult out;
        out.trial = trial_index;
        out.actions.reserve(config.horizon);
        out.cumulative_regret.reserve(config.horizon);
        out.inner_rejections.reserve(config.horizon);
        out.outer_rejections.reserve(config.horizon);
        double regret = 0.0;
        for (std::size_t t = 1; t <= config.horizon; ++t) {
            const std::size_t outcome = env.next();
            const Selection sel = policy->select_action(t, rng);
            if (sel.action >= config.game.n_actions()) {
                throw std::logic_error("policy returned invalid action " +
                                       std::to_string(sel.action + 1));
            }
            policy->observe(sel.action, config.game.symbol(sel.action, outcome));
            regret += delta[static_cast<Eigen::Index>(sel.action)];
            out.actions.push_back(sel.action);
            out.cumulative_regret.push_back(regret);
            out.inner_rejections.push_back(config.record_rejections ? sel.inner_rejections : 0);
            out.outer_rejections.push_back(config.record_rejections ? sel.outer_rejections : 0);
        }
        return out;
    } catch (const std::exception& e) {
        throw TrialError("trial " + std::to_string(trial_index + 1) + ": " + e.what());
    }
}

std::vector<TrialResult> run_experiment(const ExperimentConfig& config) {
    config.validate();
    std::vector<TrialResult> results(config.trials);
    std::vector<std::exception_ptr> errors(config.trials);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};

    auto worker = [&] {
        while (!failed.load()) {
            const std::size_t k = next.fetch_add(1);
            if (k >= config.trials) return;
            try {
                results[k] = run_trial(config, k);
            } catch (...) {
                errors[k] = std::current_exception();
                failed.store(true);
            }
        }
    };

    const std::size_t threads = std::min(config.jobs, config.trials);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

std::vector<double> moving_average(std::span<const double> values, std::size_t window) {
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    std::vector<double> out(values.size());
    double sum = 0.0;
    for (std::size_t t = 0; t < values.size(); ++t) {
        sum += values[t];
        if (t >= window) sum -= values[t - window];
        out[t] = sum / static_cast<double>(std::min(window, t + 1));
    }
    return out;
}

Aggregate aggregate(std::span<const TrialResult> results, std::size_t window) {
    if (results.empty()) throw std::invalid_argument("aggregate needs at least one trial");
    const std::size_t horizon = results.front().cumulative_regret.size();
    for (const auto& r : results) {
        if (r.cumulative_regret.size() != horizon || r.inner_rejections.size() != horizon ||
            r.outer_rejections.size() != horizon) {
            throw std::invalid_argument("trials have mismatched horizons");
        }
    }
    const double k = static_cast<double>(results.size());
    Aggregate agg;
    agg.mean_regret.assign(horizon, 0.0);
    agg.stderr_regret.assign(horizon, 0.0);
    agg.mean_rejections_ma.assign(horizon, 0.0);

    std::vector<double> rejections(horizon);
    for (const auto& r : results) {
        for (std::size_t t = 0; t < horizon; ++t) {
            agg.mean_regret[t] += r.cumulative_regret[t];
            rejections[t] = static_cast<double>(r.inner_rejections[t] + r.outer_rejections[t]);
        }
        const auto smoothed = moving_average(rejections, window);
        for (std::size_t t = 0; t < horizon; ++t) agg.mean_rejections_ma[t] += smoothed[t];
    }
    for (std::size_t t = 0; t < horizon; ++t) {
        agg.mean_regret[t] /= k;
        agg.mean_rejections_ma[t] /= k;
    }
    if (results.size() > 1) {
        for (std::size_t t = 0; t < horizon; ++t) {
            double ss = 0.0;
            for (const auto& r : results) {
                const double d = r.cumulative_regret[t] - agg.mean_regret[t];
                ss += d * d;
            }
            agg.stderr_regret[t] = std::sqrt(ss / (k - 1.0)) / std::sqrt(k);
        }
    }
    return agg;
}

void write_raw_csv(std::ostream& out, std::span<const TrialResult> results) {
    out << "trial,t,action,cum_regret,inner_rejections,outer_rejections\n";
    for (const auto& r : results) {
        for (std::size_t t = 0; t < r.actions.size(); ++t) {
            out << r.trial + 1 << ',' << t + 1 << ',' << r.actions[t] + 1 << ',';
            put_double(out, r.cumulative_regret[t]);
            out << ',' << r.inner_rejections[t] << ',' << r.outer_rejections[t] << '\n';
        }
    }
}

void write_aggregate_csv(std::ostream& out, const Aggregate& agg) {
    out << "t,mean_regret,stderr_regret,mean_rejections_ma\n";
    for (std::size_t t = 0; t < agg.mean_regret.size(); ++t) {
        out << t + 1 << ',';
        put_double(out, agg.mean_regret[t]);
        out << ',';
        put_double(out, agg.stderr_regret[t]);
        out << ',';
        put_double(out, agg.mean_rejections_ma[t]);
        out << '\n';
    }
}

}  // namespace pmlab
