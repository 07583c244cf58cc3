#include "pmlab/posterior.hpp"

#include <cmath>
#include <limits>

namespace pmlab {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

}  // namespace

ProjectedGaussian project_to_simplex_plane(const Matrix& B, const Vector& b) {
    const Eigen::Index m = B.rows();
    if (m < 2 || B.cols() != m || b.size() != m) {
        throw std::invalid_argument("projection needs a square B and matching b, M >= 2");
    }
    const Eigen::Index k = m - 1;
    const Matrix C = B.topLeftCorner(k, k);
    const Vector d = B.col(m - 1).head(k);
    const double f = B(m - 1, m - 1);
    const Vector ones = Vector::Ones(k);
    const Matrix D = 0.5 * (d * ones.transpose() + ones * d.transpose());

    ProjectedGaussian out;
    out.B_tilde = C - 2.0 * D + f * ones * ones.transpose();
    out.b_tilde = f * ones - d + b.head(k) - b[m - 1] * ones;
    return out;
}

PosteriorState::PosteriorState(const Game& game, double lambda)
    : lambda_(lambda), n_symbols_(game.n_symbols()) {
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("prior precision lambda must be positive");
    }
    const std::size_t n = game.n_actions();
    const std::size_t m = game.n_outcomes();
    signals_.reserve(n);
    grams_.reserve(n);
    symbol_of_.reserve(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        signals_.push_back(signal_matrix(game, i));
        grams_.push_back(signals_.back().transpose() * signals_.back());
        for (std::size_t j = 0; j < m; ++j) symbol_of_.push_back(game.symbol(i, j));
    }
    B_ = lambda * Matrix::Identity(idx(m), idx(m));
    b_ = Vector::Zero(idx(m));
    plays_.assign(n, 0);
    counts_.assign(n * n_symbols_, 0);
}

void PosteriorState::update(std::size_t action, std::size_t symbol) {
    if (action >= n_actions() || symbol >= n_symbols_) {
        throw std::out_of_range("posterior update with invalid action or symbol");
    }
    B_ += grams_[action];
    b_ += signals_[action].row(idx(symbol)).transpose();
    ++plays_[action];
    ++counts_[action * n_symbols_ + symbol];
    ++rounds_;
    proposal_.reset();
}

Vector PosteriorState::feedback_distribution(std::size_t action) const {
    Vector q = Vector::Zero(idx(n_symbols_));
    if (plays_[action] == 0) return q;
    const double n = static_cast<double>(plays_[action]);
    for (std::size_t y = 0; y < n_symbols_; ++y) {
        q[idx(y)] = static_cast<double>(symbol_count(action, y)) / n;
    }
    return q;
}

const PosteriorState::Proposal& PosteriorState::proposal() {
    if (!proposal_) {
        const ProjectedGaussian pg = project_to_simplex_plane(B_, b_);
        Proposal prop{Eigen::LLT<Matrix>(pg.B_tilde), Vector()};
        if (prop.factor.info() != Eigen::Success) {
            throw SamplerError("projected precision matrix is not positive definite");
        }
        prop.mean = prop.factor.solve(pg.b_tilde);
        proposal_ = std::move(prop);
    }
    return *proposal_;
}

ProposalDraw sample_proposal(PosteriorState& state, Rng& rng, std::uint64_t max_draws) {
    const PosteriorState::Proposal& prop = state.proposal();
    const Eigen::Index k = prop.mean.size();
    Vector z(k);
    ProposalDraw out;
    while (true) {
        for (Eigen::Index c = 0; c < k; ++c) z[c] = rng.normal();
        // Covariance B_tilde^{-1} = U^{-1} U^{-T} with B_tilde = U^T U.
        const Vector x = prop.mean + prop.factor.matrixU().solve(z);
        bool inside = true;
        double total = 0.0;
        for (Eigen::Index c = 0; c < k && inside; ++c) {
            inside = x[c] >= 0.0;
            total += x[c];
        }
        if (inside && total <= 1.0) {
            out.p.resize(k + 1);
            out.p.head(k) = x;
            out.p[k] = 1.0 - total;
            return out;
        }
        if (++out.inner_rejections >= max_draws) {
            throw SamplerError("proposal sampler rejected " + std::to_string(max_draws) +
                               " consecutive draws outside the simplex");
        }
    }
}

double log_density_gap(const PosteriorState& state, const Vector& p) {
    const std::size_t m = state.n_outcomes();
    const std::size_t a = state.n_symbols_;
    std::vector<double> sp(a);
    double gap = 0.0;
    for (std::size_t i = 0; i < state.n_actions(); ++i) {
        const std::uint64_t n = state.plays_[i];
        if (n == 0) continue;
        std::fill(sp.begin(), sp.end(), 0.0);
        for (std::size_t j = 0; j < m; ++j) sp[state.symbol_of_[i * m + j]] += p[idx(j)];
        double sq = 0.0;
        double kl = 0.0;
        const double nd = static_cast<double>(n);
        for (std::size_t y = 0; y < a; ++y) {
            const double q = static_cast<double>(state.counts_[i * a + y]) / nd;
            const double diff = q - sp[y];
            sq += diff * diff;
            if (q > 0.0) {
                if (sp[y] <= 0.0) return -std::numeric_limits<double>::infinity();
                kl += q * std::log(q / sp[y]);
            }
        }
        gap += nd * (0.5 * sq - kl);
    }
    return gap;
}

PosteriorDraw accept_reject_sample(PosteriorState& state, double R, Rng& rng,
                                   SamplerLimits limits) {
    if (!(R >= 0.0 && R <= 1.0)) {
        throw std::invalid_argument("accept-reject constant R must lie in [0, 1]");
    }
    const double log_r = R > 0.0 ? std::log(R) : 0.0;
    PosteriorDraw out;
    while (true) {
        ProposalDraw prop = sample_proposal(state, rng, limits.max_inner);
        out.inner_rejections += prop.inner_rejections;
        if (R == 0.0) {
            out.p = std::move(prop.p);
            return out;
        }
        const double u = rng.uniform();
        if (log_r + std::log(u) < log_density_gap(state, prop.p)) {
            out.p = std::move(prop.p);
            return out;
        }
        if (++out.outer_rejections >= limits.max_outer) {
            throw SamplerError("accept-reject sampler rejected " +
                               std::to_string(limits.max_outer) + " proposals");
        }
    }
}

}  // namespace pmlab
