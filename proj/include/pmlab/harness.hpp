#pragma once

#include "pmlab/game.hpp"
#include "pmlab/policies.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace pmlab {

struct ExperimentConfig {
    Game game;
    Vector opponent;  // p*, known to the harness only
    PolicyConfig policy;
    std::size_t horizon = 10000;
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    std::size_t window = 100;
    bool record_rejections = true;

    // Throws std::invalid_argument on T = 0, K = 0, W = 0, jobs = 0 or an
    // opponent that is not a strategy of the game.
    void validate() const;
};

struct TrialResult {
    std::size_t trial = 0;  // 0-based
    std::vector<std::size_t> actions;
    std::vector<double> cumulative_regret;
    std::vector<std::uint64_t> inner_rejections;
    std::vector<std::uint64_t> outer_rejections;
};

struct TrialError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using PolicyFactory = std::function<std::unique_ptr<Policy>(const Game&)>;

TrialResult run_trial(const ExperimentConfig& config, std::size_t trial_index);
// Same protocol with a caller-supplied policy (test doubles, scripted play).
TrialResult run_trial(const ExperimentConfig& config, std::size_t trial_index,
                      const PolicyFactory& factory);

// Runs all trials on up to config.jobs threads. Results are ordered by trial
// index; the first failing trial (by index) aborts the experiment.
std::vector<TrialResult> run_experiment(const ExperimentConfig& config);

// Trailing moving average; the first window-1 entries average what is available.
std::vector<double> moving_average(std::span<const double> values, std::size_t window);

struct Aggregate {
    std::vector<double> mean_regret;
    std::vector<double> stderr_regret;
    std::vector<double> mean_rejections_ma;
};

Aggregate aggregate(std::span<const TrialResult> results, std::size_t window);

// trial,t,action,cum_regret,inner_rejections,outer_rejections (1-based trial,
// round and action).
void write_raw_csv(std::ostream& out, std::span<const TrialResult> results);
// t,mean_regret,stderr_regret,mean_rejections_ma
void write_aggregate_csv(std::ostream& out, const Aggregate& agg);

}  // namespace pmlab
