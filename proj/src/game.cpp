#include "pmlab/game.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pmlab {

namespace {

void check_action(const Game& game, std::size_t action) {
    if (action >= game.n_actions()) {
        throw std::out_of_range("action index " + std::to_string(action + 1) +
                                " out of range [1, " +
                                std::to_string(game.n_actions()) + "]");
    }
}

void check_length(const Game& game, const Vector& p) {
    if (static_cast<std::size_t>(p.size()) != game.n_outcomes()) {
        throw std::invalid_argument("strategy has length " + std::to_string(p.size()) +
                                    ", game has " + std::to_string(game.n_outcomes()) +
                                    " outcomes");
    }
}

}  // namespace

Game::Game(Matrix loss, IndexMatrix feedback, std::size_t n_symbols)
    : loss_(std::move(loss)), feedback_(std::move(feedback)), n_symbols_(n_symbols) {
    if (loss_.rows() != feedback_.rows() || loss_.cols() != feedback_.cols()) {
        throw std::invalid_argument("loss and feedback matrices differ in shape");
    }
    if (loss_.rows() < 1 || loss_.cols() < 2) {
        throw std::invalid_argument("a game needs at least one action and two outcomes");
    }
    if (!loss_.allFinite()) {
        throw std::invalid_argument("loss matrix contains non-finite entries");
    }
    if (feedback_.minCoeff() < 0) {
        throw std::invalid_argument("feedback symbols must be >= 1");
    }
    const auto used = static_cast<std::size_t>(feedback_.maxCoeff()) + 1;
    if (n_symbols_ == 0) {
        n_symbols_ = used;
    } else if (used > n_symbols_) {
        throw std::invalid_argument("feedback uses symbol " + std::to_string(used) +
                                    " but only " + std::to_string(n_symbols_) +
                                    " symbols were declared");
    }
}

Game Game::with_loss(Matrix loss) const {
    return Game(std::move(loss), feedback_, n_symbols_);
}

Matrix signal_matrix(const Game& game, std::size_t action) {
    check_action(game, action);
    Matrix s = Matrix::Zero(static_cast<Eigen::Index>(game.n_symbols()),
                            static_cast<Eigen::Index>(game.n_outcomes()));
    for (std::size_t j = 0; j < game.n_outcomes(); ++j) {
        s(static_cast<Eigen::Index>(game.symbol(action, j)), static_cast<Eigen::Index>(j)) = 1.0;
    }
    return s;
}

void check_strategy(const Game& game, const Vector& p) {
    check_length(game, p);
    double total = 0.0;
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        if (!(p[k] >= 0.0)) {
            throw std::invalid_argument("strategy has a negative or NaN entry");
        }
        total += p[k];
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("strategy does not sum to one");
    }
}

double expected_loss(const Game& game, std::size_t action, const Vector& p) {
    check_action(game, action);
    check_length(game, p);
    double acc = 0.0;
    for (Eigen::Index j = 0; j < p.size(); ++j) {
        acc += game.loss()(static_cast<Eigen::Index>(action), j) * p[j];
    }
    return acc;
}

Vector expected_losses(const Game& game, const Vector& p) {
    check_length(game, p);
    Vector out(static_cast<Eigen::Index>(game.n_actions()));
    for (std::size_t i = 0; i < game.n_actions(); ++i) {
        out[static_cast<Eigen::Index>(i)] = expected_loss(game, i, p);
    }
    return out;
}

std::size_t best_action(const Game& game, const Vector& p) {
    const Vector values = expected_losses(game, p);
    std::size_t best = 0;
    for (Eigen::Index i = 1; i < values.size(); ++i) {
        if (values[i] < values[static_cast<Eigen::Index>(best)]) {
            best = static_cast<std::size_t>(i);
        }
    }
    return best;
}

Vector gaps(const Game& game, const Vector& p_star) {
    check_strategy(game, p_star);
    const Vector values = expected_losses(game, p_star);
    const double best = values.minCoeff();
    Vector out = values.array() - best;
    return out;
}

std::vector<double> pseudo_regret(const Game& game, const Vector& p_star,
                                  std::span<const std::size_t> actions) {
    const Vector delta = gaps(game, p_star);
    std::vector<double> out;
    out.reserve(actions.size());
    double acc = 0.0;
    for (std::size_t a : actions) {
        check_action(game, a);
        acc += delta[static_cast<Eigen::Index>(a)];
        out.push_back(acc);
    }
    return out;
}

Game game_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("game file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("loss") || !doc.contains("feedback")) {
        throw std::invalid_argument("game JSON needs \"loss\" and \"feedback\" arrays");
    }
    const auto loss_rows = doc["loss"].get<std::vector<std::vector<double>>>();
    const auto fb_rows = doc["feedback"].get<std::vector<std::vector<int>>>();
    if (loss_rows.empty() || loss_rows.size() != fb_rows.size()) {
        throw std::invalid_argument("loss and feedback must have the same number of rows");
    }
    const std::size_t n = loss_rows.size();
    const std::size_t m = loss_rows.front().size();
    Matrix loss(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    IndexMatrix feedback(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < n; ++i) {
        if (loss_rows[i].size() != m || fb_rows[i].size() != m) {
            throw std::invalid_argument("ragged row " + std::to_string(i + 1) + " in game JSON");
        }
        for (std::size_t j = 0; j < m; ++j) {
            if (fb_rows[i][j] < 1) {
                throw std::invalid_argument("feedback symbols are 1-based");
            }
            loss(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = loss_rows[i][j];
            feedback(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = fb_rows[i][j] - 1;
        }
    }
    std::size_t n_symbols = 0;
    if (doc.contains("n_symbols")) {
        n_symbols = doc["n_symbols"].get<std::size_t>();
    }
    return Game(std::move(loss), std::move(feedback), n_symbols);
}

Game load_game_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read game file '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return game_from_json(buffer.str());
}

std::string game_to_json(const Game& game) {
    nlohmann::json doc;
    auto& loss = doc["loss"] = nlohmann::json::array();
    auto& feedback = doc["feedback"] = nlohmann::json::array();
    for (std::size_t i = 0; i < game.n_actions(); ++i) {
        std::vector<double> lrow;
        std::vector<int> frow;
        for (std::size_t j = 0; j < game.n_outcomes(); ++j) {
            lrow.push_back(game.loss(i, j));
            frow.push_back(static_cast<int>(game.symbol(i, j)) + 1);
        }
        loss.push_back(lrow);
        feedback.push_back(frow);
    }
    doc["n_symbols"] = game.n_symbols();
    return doc.dump();
}

}  // namespace pmlab
