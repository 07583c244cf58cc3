#pragma once

#include "pmlab/game.hpp"
#include "pmlab/lp.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pmlab {

struct CellStatus {
    bool pareto_optimal = false;
    // The cell has nonempty interior relative to the simplex.
    bool strictly_pareto_optimal = false;
    // Optimal value of max_p min_j -(L_i - L_j)^T p over the simplex, capped
    // at 1. Negative iff the cell is empty.
    double margin = 0.0;
};

CellStatus cell_status(const Game& game, std::size_t action);
bool is_pareto_optimal(const Game& game, std::size_t action);

// C_i ∩ C_j expressed as {p in simplex : (L_i-L_j)^T p = 0, (L_i-L_k)^T p <= 0}.
struct CellIntersection {
    bool feasible = false;
    std::size_t affine_dimension = 0;
    // LP optima gathered while probing the polytope.
    std::vector<Vector> points;
};

CellIntersection probe_cell_intersection(const Game& game, std::size_t i, std::size_t j);

bool are_neighbors(const Game& game, std::size_t i, std::size_t j);

// N+_{i,j}, sorted. Requires i and j to be neighbors.
std::vector<std::size_t> neighborhood_action_set(const Game& game, std::size_t i,
                                                 std::size_t j);

struct ObservabilityWitness {
    std::pair<std::size_t, std::size_t> pair;
    Vector z;  // length 2A, minimum norm
    double residual = 0.0;
    bool observable = false;
};

inline constexpr double kObservabilityTolerance = 1e-8;

// Minimum-norm least-squares solution of [S_i^T S_j^T] z = L_i - L_j.
ObservabilityWitness observability_witness(const Game& game, std::size_t i, std::size_t j);

bool is_strongly_locally_observable(const Game& game);
bool is_locally_observable(const Game& game);

struct DifficultyReport {
    std::size_t optimal_action = 0;
    Vector gaps;
    // Indexed by action; zero at the optimal action.
    Vector z_norms;
    Vector per_action;  // Lambda_i = Delta_i / ||z_{opt,i}||, zero at the optimum
    double lambda_min = 0.0;
    double epsilon = 0.0;
    double epsilon_prime = 0.0;
    // Distance term of epsilon is computed by an iterative projection.
    bool epsilon_approximate = true;
};

struct UnobservablePairError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Throws std::invalid_argument when the optimum is not unique and
// UnobservablePairError when some (optimal, i) pair has no witness.
DifficultyReport difficulty_report(const Game& game, const Vector& p_star);

// Groups of actions with identical loss and feedback rows.
struct DuplicateCollapse {
    Game game;
    // representatives[k] is the original index of action k in `game`.
    std::vector<std::size_t> representatives;
    // Each group lists original indices; only groups of size > 1 appear.
    std::vector<std::vector<std::size_t>> duplicate_groups;
};

DuplicateCollapse collapse_duplicates(const Game& game);

}  // namespace pmlab
