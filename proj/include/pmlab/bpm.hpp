#pragma once

#include "pmlab/game.hpp"
#include "pmlab/rng.hpp"

#include <optional>
#include <vector>

namespace pmlab {

// Gaussian posterior used by BPM-TS: prior N(0, sigma0^2 I) with
// sigma0^2 = 1 / lambda, and per-observation increments whitened by the row
// Gram matrix of the signal matrix,
//
//   B += S^T (S S^T)^{-1} S,    b += S^T (S S^T)^{-1} e_y.
//
// Symbols an action can never emit give all-zero rows in S_i; those rows are
// dropped so the row Gram matrix is invertible.
class BpmPosterior {
public:
    BpmPosterior(const Game& game, double lambda);

    void update(std::size_t action, std::size_t symbol);

    // Unconstrained draw from N(B^{-1} b, B^{-1}) over R^M.
    Vector sample(Rng& rng);

    const Matrix& precision() const { return B_; }
    const Vector& moment() const { return b_; }
    const Matrix& precision_increment(std::size_t action) const { return increments_[action]; }

private:
    std::vector<Matrix> increments_;
    // Column y holds S^T (S S^T)^{-1} e_y, zero for symbols the action cannot emit.
    std::vector<Matrix> moment_increments_;
    std::vector<std::vector<bool>> emits_;
    Matrix B_;
    Vector b_;
    std::optional<Eigen::LLT<Matrix>> factor_;
};

}  // namespace pmlab
