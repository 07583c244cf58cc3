#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace pmlab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IndexMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

// A finite partial-monitoring game: N actions, M outcomes, A feedback symbols.
// Indices are 0-based throughout the library; the CLI and file formats are
// 1-based.
class Game {
public:
    // `feedback` holds 0-based symbols. `n_symbols` may be a superset of the
    // symbols actually used; pass 0 to infer it from the matrix.
    Game(Matrix loss, IndexMatrix feedback, std::size_t n_symbols = 0);

    std::size_t n_actions() const { return static_cast<std::size_t>(loss_.rows()); }
    std::size_t n_outcomes() const { return static_cast<std::size_t>(loss_.cols()); }
    std::size_t n_symbols() const { return n_symbols_; }

    const Matrix& loss() const { return loss_; }
    const IndexMatrix& feedback() const { return feedback_; }

    double loss(std::size_t i, std::size_t j) const { return loss_(i, j); }
    std::size_t symbol(std::size_t i, std::size_t j) const {
        return static_cast<std::size_t>(feedback_(i, j));
    }

    // Same feedback, loss replaced. Used for shift/scale invariance checks.
    Game with_loss(Matrix loss) const;

private:
    Matrix loss_;
    IndexMatrix feedback_;
    std::size_t n_symbols_;
};

// A x M indicator matrix: (S_i)(y, j) = 1 iff h(i, j) = y.
Matrix signal_matrix(const Game& game, std::size_t action);

// Throws std::invalid_argument unless p is a probability vector of the right
// length (entries >= 0, sum within 1e-12 of one).
void check_strategy(const Game& game, const Vector& p);

double expected_loss(const Game& game, std::size_t action, const Vector& p);

// Expected losses of every action, accumulated left to right so that values
// are reproducible independent of vectorisation.
Vector expected_losses(const Game& game, const Vector& p);

// Lowest-index argmin of L_i^T p. `p` need not be a probability vector.
std::size_t best_action(const Game& game, const Vector& p);

// Delta_i = L_i^T p* - min_k L_k^T p*.
Vector gaps(const Game& game, const Vector& p_star);

// Running sums of Delta over the played actions.
std::vector<double> pseudo_regret(const Game& game, const Vector& p_star,
                                  std::span<const std::size_t> actions);

// {"loss": [[...]], "feedback": [[...]]} with 1-based symbols, plus an
// optional "n_symbols".
Game game_from_json(const std::string& text);
Game load_game_file(const std::string& path);
std::string game_to_json(const Game& game);

}  // namespace pmlab
