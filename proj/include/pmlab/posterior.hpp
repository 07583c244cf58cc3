#pragma once

#include "pmlab/game.hpp"
#include "pmlab/rng.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace pmlab {

struct SamplerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gaussian over the first M-1 coordinates of points on the plane sum(p) = 1:
// density proportional to exp(-1/2 x^T B_tilde x + b_tilde^T x).
struct ProjectedGaussian {
    Matrix B_tilde;
    Vector b_tilde;
};

// Restricts exp(-1/2 p^T B p + b^T p) to the plane sum(p) = 1, parameterised
// by the leading M-1 coordinates.
ProjectedGaussian project_to_simplex_plane(const Matrix& B, const Vector& b);

// Posterior statistics for the multinomial feedback model with a Gaussian
// prior of precision lambda * I restricted to the simplex.
//
//   B = lambda I + sum_i n_i S_i^T S_i
//   b = sum_i n_i S_i^T q_i
//
// Feedback is stored as integer symbol counts; q_i is derived on demand.
// Single owner: the cached proposal factorisation is rebuilt lazily after
// each update.
class PosteriorState {
public:
    PosteriorState(const Game& game, double lambda);

    void update(std::size_t action, std::size_t symbol);

    std::size_t n_actions() const { return signals_.size(); }
    std::size_t n_outcomes() const { return static_cast<std::size_t>(B_.rows()); }
    std::size_t n_symbols() const { return n_symbols_; }
    double lambda() const { return lambda_; }
    std::uint64_t rounds() const { return rounds_; }

    const Matrix& precision() const { return B_; }
    const Vector& moment() const { return b_; }
    const Matrix& signal(std::size_t action) const { return signals_[action]; }
    std::uint64_t plays(std::size_t action) const { return plays_[action]; }
    std::uint64_t symbol_count(std::size_t action, std::size_t symbol) const {
        return counts_[action * n_symbols_ + symbol];
    }
    // Empirical feedback distribution q_i; all zeros when the action is unplayed.
    Vector feedback_distribution(std::size_t action) const;

    struct Proposal {
        Eigen::LLT<Matrix> factor;  // of B_tilde
        Vector mean;                // B_tilde^{-1} b_tilde
    };
    const Proposal& proposal();

private:
    double lambda_;
    std::size_t n_symbols_;
    std::vector<Matrix> signals_;
    std::vector<Matrix> grams_;  // S_i^T S_i
    std::vector<std::size_t> symbol_of_;  // h_{i,j}, row-major N x M
    Matrix B_;
    Vector b_;
    std::vector<std::uint64_t> plays_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t rounds_ = 0;
    std::optional<Proposal> proposal_;

    friend double log_density_gap(const PosteriorState& state, const Vector& p);
};

inline constexpr std::uint64_t kDefaultDrawCap = 1'000'000;

struct ProposalDraw {
    Vector p;
    std::uint64_t inner_rejections = 0;
};

// Draws from the proposal restricted to the simplex by rejecting Gaussian
// draws of the leading M-1 coordinates that leave {x >= 0, sum(x) <= 1}.
// The last coordinate is 1 - sum(x). Throws SamplerError after `max_draws`
// consecutive rejections.
ProposalDraw sample_proposal(PosteriorState& state, Rng& rng,
                             std::uint64_t max_draws = kDefaultDrawCap);

// log F(p) - log G(p) = sum_i n_i (1/2 ||q_i - S_i p||^2 - KL(q_i || S_i p)).
// The prior factors cancel. Returns -inf where the target density is zero.
double log_density_gap(const PosteriorState& state, const Vector& p);

struct SamplerLimits {
    std::uint64_t max_inner = kDefaultDrawCap;  // per proposal
    std::uint64_t max_outer = kDefaultDrawCap;
};

struct PosteriorDraw {
    Vector p;
    std::uint64_t inner_rejections = 0;
    std::uint64_t outer_rejections = 0;
};

// Accept-reject sampling against the proposal: accept when R * u < F/G.
// R = 1 yields exact posterior draws; R = 0 accepts the first proposal.
PosteriorDraw accept_reject_sample(PosteriorState& state, double R, Rng& rng,
                                   SamplerLimits limits = {});

}  // namespace pmlab
