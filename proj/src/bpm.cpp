#include "pmlab/bpm.hpp"

#include <stdexcept>

namespace pmlab {

BpmPosterior::BpmPosterior(const Game& game, double lambda) {
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("prior precision lambda must be positive");
    }
    const auto m = static_cast<Eigen::Index>(game.n_outcomes());
    const auto a = static_cast<Eigen::Index>(game.n_symbols());
    for (std::size_t i = 0; i < game.n_actions(); ++i) {
        const Matrix s = signal_matrix(game, i);
        std::vector<Eigen::Index> used;
        std::vector<bool> emits(static_cast<std::size_t>(a), false);
        for (Eigen::Index y = 0; y < a; ++y) {
            if (s.row(y).sum() > 0.0) {
                used.push_back(y);
                emits[static_cast<std::size_t>(y)] = true;
            }
        }
        Matrix reduced(static_cast<Eigen::Index>(used.size()), m);
        for (std::size_t r = 0; r < used.size(); ++r) {
            reduced.row(static_cast<Eigen::Index>(r)) = s.row(used[r]);
        }
        // whitened = S^T (S S^T)^{-1}, M x |used|
        const Matrix gram = reduced * reduced.transpose();
        const Matrix whitened = reduced.transpose() * gram.ldlt().solve(
            Matrix::Identity(gram.rows(), gram.cols()));
        increments_.push_back(whitened * reduced);
        Matrix per_symbol = Matrix::Zero(m, a);
        for (std::size_t r = 0; r < used.size(); ++r) {
            per_symbol.col(used[r]) = whitened.col(static_cast<Eigen::Index>(r));
        }
        moment_increments_.push_back(std::move(per_symbol));
        emits_.push_back(std::move(emits));
    }
    B_ = lambda * Matrix::Identity(m, m);
    b_ = Vector::Zero(m);
}

void BpmPosterior::update(std::size_t action, std::size_t symbol) {
    if (action >= increments_.size() || symbol >= emits_[action].size()) {
        throw std::out_of_range("BPM update with invalid action or symbol");
    }
    if (!emits_[action][symbol]) {
        throw std::invalid_argument("action " + std::to_string(action + 1) +
                                    " cannot emit symbol " + std::to_string(symbol + 1));
    }
    B_ += increments_[action];
    b_ += moment_increments_[action].col(static_cast<Eigen::Index>(symbol));
    factor_.reset();
}

Vector BpmPosterior::sample(Rng& rng) {
    if (!factor_) {
        factor_.emplace(B_);
        if (factor_->info() != Eigen::Success) {
            throw std::runtime_error("BPM precision matrix is not positive definite");
        }
    }
    const Vector mean = factor_->solve(b_);
    Vector z(mean.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = rng.normal();
    return mean + factor_->matrixU().solve(z);
}

}  // namespace pmlab
