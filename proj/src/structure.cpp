#include "pmlab/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace pmlab {

namespace {

constexpr double kLpTol = 1e-9;
constexpr double kRankTol = 1e-7;
constexpr double kRefineTol = 1e-6;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void check_pair(const Game& game, std::size_t i, std::size_t j) {
    if (i >= game.n_actions() || j >= game.n_actions()) {
        throw std::out_of_range("action index out of range");
    }
}

Vector row_diff(const Game& game, std::size_t i, std::size_t j) {
    return (game.loss().row(idx(i)) - game.loss().row(idx(j))).transpose();
}

LpResult checked(const LinearProgram& lp) {
    LpResult r = solve_lp(lp);
    if (r.status == LpStatus::unbounded) {
        throw LpError("unexpected unbounded LP over a bounded polytope");
    }
    return r;
}

// Polytope C_i ∩ C_j as an LP skeleton with an empty objective.
LinearProgram intersection_lp(const Game& game, std::size_t i, std::size_t j) {
    const auto m = idx(game.n_outcomes());
    LinearProgram lp;
    lp.objective = Vector::Zero(m);
    lp.A_eq.resize(2, m);
    lp.A_eq.row(0).setOnes();
    lp.A_eq.row(1) = row_diff(game, i, j).transpose();
    lp.b_eq = Vector::Zero(2);
    lp.b_eq[0] = 1.0;

    std::vector<std::size_t> others;
    for (std::size_t k = 0; k < game.n_actions(); ++k) {
        if (k != i && k != j) others.push_back(k);
    }
    lp.A_ub.resize(idx(others.size()), m);
    for (std::size_t r = 0; r < others.size(); ++r) {
        lp.A_ub.row(idx(r)) = row_diff(game, i, others[r]).transpose();
    }
    lp.b_ub = Vector::Zero(idx(others.size()));
    return lp;
}

// Orthonormal basis (columns) of span{p - base : p in points}.
Matrix hull_basis(const std::vector<Vector>& points, Eigen::Index dim) {
    if (points.size() < 2) return Matrix(dim, 0);
    Matrix centered(dim, idx(points.size() - 1));
    for (std::size_t k = 1; k < points.size(); ++k) {
        centered.col(idx(k - 1)) = points[k] - points.front();
    }
    Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeThinU);
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
        if (svd.singularValues()[k] > kRankTol) ++rank;
    }
    return svd.matrixU().leftCols(rank);
}

std::size_t numerical_rank(const std::vector<Vector>& points, Eigen::Index dim) {
    return static_cast<std::size_t>(hull_basis(points, dim).cols());
}

// Dykstra's alternating projection of x0 onto {p >= 0, E p = e}.
Vector project_onto_face(const Vector& x0, const Matrix& E, const Vector& e) {
    const Matrix gram_inv = (E * E.transpose()).inverse();
    auto affine = [&](const Vector& v) -> Vector {
        return v - E.transpose() * (gram_inv * (E * v - e));
    };
    Vector x = x0;
    Vector corr_affine = Vector::Zero(x0.size());
    Vector corr_orthant = Vector::Zero(x0.size());
    for (int iter = 0; iter < 200000; ++iter) {
        const Vector y = affine(x + corr_affine);
        corr_affine = x + corr_affine - y;
        const Vector next = (y + corr_orthant).cwiseMax(0.0);
        corr_orthant = y + corr_orthant - next;
        const double change = (next - x).norm();
        x = next;
        if (change < 1e-14 && (E * x - e).norm() < 1e-12) break;
    }
    return x;
}

double operator_norm(const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()[0];
}

// Residual of the least-squares fit of rhs by the columns of `stacked`.
double stacked_residual(const Matrix& stacked, const Vector& rhs, Vector* solution) {
    Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vector z = svd.solve(rhs);
    const double residual = (stacked * z - rhs).norm();
    if (solution) *solution = std::move(z);
    return residual;
}

}  // namespace

CellStatus cell_status(const Game& game, std::size_t action) {
    check_pair(game, action, action);
    const auto m = idx(game.n_outcomes());
    std::vector<std::size_t> rivals;
    for (std::size_t j = 0; j < game.n_actions(); ++j) {
        if (j != action && row_diff(game, action, j).cwiseAbs().maxCoeff() > 0.0) {
            rivals.push_back(j);
        }
    }

    // Variables: p (m), s_plus, s_minus. Maximise s = s_plus - s_minus subject
    // to (L_i - L_j)^T p + s <= 0 for every rival j and s_plus <= 1.
    LinearProgram lp;
    lp.objective = Vector::Zero(m + 2);
    lp.objective[m] = 1.0;
    lp.objective[m + 1] = -1.0;
    lp.A_ub = Matrix::Zero(idx(rivals.size()) + 1, m + 2);
    lp.b_ub = Vector::Zero(idx(rivals.size()) + 1);
    for (std::size_t r = 0; r < rivals.size(); ++r) {
        lp.A_ub.block(idx(r), 0, 1, m) = row_diff(game, action, rivals[r]).transpose();
        lp.A_ub(idx(r), m) = 1.0;
        lp.A_ub(idx(r), m + 1) = -1.0;
    }
    lp.A_ub(idx(rivals.size()), m) = 1.0;
    lp.b_ub[idx(rivals.size())] = 1.0;
    lp.A_eq = Matrix::Zero(1, m + 2);
    lp.A_eq.block(0, 0, 1, m).setOnes();
    lp.b_eq = Vector::Ones(1);

    const LpResult res = solve_lp(lp);
    if (res.status != LpStatus::optimal) {
        throw LpError("cell margin LP for action " + std::to_string(action + 1) +
                      " did not reach an optimum");
    }
    CellStatus status;
    status.margin = res.value;
    status.pareto_optimal = res.value >= -kLpTol;
    status.strictly_pareto_optimal = res.value > kLpTol;
    return status;
}

bool is_pareto_optimal(const Game& game, std::size_t action) {
    return cell_status(game, action).pareto_optimal;
}

CellIntersection probe_cell_intersection(const Game& game, std::size_t i, std::size_t j) {
    check_pair(game, i, j);
    const auto m = idx(game.n_outcomes());
    LinearProgram lp = intersection_lp(game, i, j);

    CellIntersection out;
    const LpResult first = checked(lp);
    if (first.status == LpStatus::infeasible) return out;
    out.feasible = true;
    out.points.push_back(first.x);

    // Randomised objective sweep. The seed depends only on the pair so the
    // result is a pure function of the game.
    std::mt19937_64 gen(0x5eed0000ULL + 131 * i + j);
    std::normal_distribution<double> normal;
    for (Eigen::Index s = 0; s < 4 * (m - 1); ++s) {
        for (Eigen::Index k = 0; k < m; ++k) lp.objective[k] = normal(gen);
        const LpResult r = checked(lp);
        if (r.status == LpStatus::optimal) out.points.push_back(r.x);
    }

    // Refinement: extreme points along directions orthogonal to the hull found
    // so far, until every such direction is flat on the polytope.
    Matrix basis = hull_basis(out.points, m);
    bool grew = true;
    while (grew) {
        grew = false;
        const Matrix proj = Matrix::Identity(m, m) - basis * basis.transpose();
        Eigen::SelfAdjointEigenSolver<Matrix> eig(proj);
        for (Eigen::Index c = 0; c < m && !grew; ++c) {
            if (eig.eigenvalues()[c] < 0.5) continue;
            const Vector dir = eig.eigenvectors().col(c);
            const double base = dir.dot(out.points.front());
            for (double sign : {1.0, -1.0}) {
                lp.objective = sign * dir;
                const LpResult r = checked(lp);
                if (r.status != LpStatus::optimal) continue;
                if (sign * (dir.dot(r.x) - base) > kRefineTol) {
                    Vector v = r.x - out.points.front();
                    v -= basis * (basis.transpose() * v);
                    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
                    basis.col(basis.cols() - 1) = v.normalized();
                    out.points.push_back(r.x);
                    grew = true;
                    break;
                }
            }
        }
    }
    out.affine_dimension = numerical_rank(out.points, m);
    return out;
}

bool are_neighbors(const Game& game, std::size_t i, std::size_t j) {
    check_pair(game, i, j);
    if (i == j) throw std::invalid_argument("neighbor test needs two distinct actions");
    if (!is_pareto_optimal(game, i) || !is_pareto_optimal(game, j)) return false;
    const CellIntersection probe = probe_cell_intersection(game, i, j);
    return probe.feasible && probe.affine_dimension + 2 == game.n_outcomes();
}

std::vector<std::size_t> neighborhood_action_set(const Game& game, std::size_t i,
                                                 std::size_t j) {
    if (!are_neighbors(game, i, j)) {
        throw std::invalid_argument("actions " + std::to_string(i + 1) + " and " +
                                    std::to_string(j + 1) + " are not neighbors");
    }
    const CellIntersection probe = probe_cell_intersection(game, i, j);
    LinearProgram lp = intersection_lp(game, i, j);
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < game.n_actions(); ++k) {
        if (k == i || k == j) {
            out.push_back(k);
            continue;
        }
        const Vector dir = row_diff(game, k, i);
        bool contained = std::all_of(probe.points.begin(), probe.points.end(),
                                     [&](const Vector& p) { return dir.dot(p) <= kLpTol; });
        if (contained) {
            // The collected points need not include every vertex; the LP
            // optimum of (L_k - L_i)^T p over the polytope settles it.
            lp.objective = dir;
            const LpResult r = checked(lp);
            contained = r.status == LpStatus::optimal && r.value <= kLpTol;
        }
        if (contained) out.push_back(k);
    }
    return out;
}

ObservabilityWitness observability_witness(const Game& game, std::size_t i, std::size_t j) {
    check_pair(game, i, j);
    const auto a = idx(game.n_symbols());
    const auto m = idx(game.n_outcomes());
    Matrix stacked(m, 2 * a);
    stacked.leftCols(a) = signal_matrix(game, i).transpose();
    stacked.rightCols(a) = signal_matrix(game, j).transpose();

    ObservabilityWitness w;
    w.pair = {i, j};
    w.residual = stacked_residual(stacked, row_diff(game, i, j), &w.z);
    w.observable = w.residual <= kObservabilityTolerance;
    return w;
}

bool is_strongly_locally_observable(const Game& game) {
    for (std::size_t i = 0; i < game.n_actions(); ++i) {
        for (std::size_t j = 0; j < game.n_actions(); ++j) {
            if (i != j && !observability_witness(game, i, j).observable) return false;
        }
    }
    return true;
}

bool is_locally_observable(const Game& game) {
    std::vector<std::size_t> pareto;
    for (std::size_t i = 0; i < game.n_actions(); ++i) {
        if (is_pareto_optimal(game, i)) pareto.push_back(i);
    }
    const auto a = idx(game.n_symbols());
    for (std::size_t x = 0; x < pareto.size(); ++x) {
        for (std::size_t y = x + 1; y < pareto.size(); ++y) {
            const std::size_t i = pareto[x];
            const std::size_t j = pareto[y];
            if (!are_neighbors(game, i, j)) continue;
            const auto hood = neighborhood_action_set(game, i, j);
            Matrix stacked(idx(game.n_outcomes()), a * idx(hood.size()));
            for (std::size_t k = 0; k < hood.size(); ++k) {
                stacked.middleCols(a * idx(k), a) = signal_matrix(game, hood[k]).transpose();
            }
            if (stacked_residual(stacked, row_diff(game, i, j), nullptr) >
                kObservabilityTolerance) {
                return false;
            }
        }
    }
    return true;
}

DifficultyReport difficulty_report(const Game& game, const Vector& p_star) {
    DifficultyReport rep;
    rep.gaps = gaps(game, p_star);
    rep.optimal_action = best_action(game, p_star);
    const std::size_t opt = rep.optimal_action;
    const std::size_t n = game.n_actions();
    for (std::size_t i = 0; i < n; ++i) {
        if (i != opt && rep.gaps[idx(i)] <= 1e-12) {
            throw std::invalid_argument("optimal action is not unique (actions " +
                                        std::to_string(opt + 1) + " and " +
                                        std::to_string(i + 1) + ")");
        }
    }

    rep.z_norms = Vector::Zero(idx(n));
    rep.per_action = Vector::Zero(idx(n));
    rep.lambda_min = std::numeric_limits<double>::infinity();
    double loss_ratio_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == opt) continue;
        const ObservabilityWitness w = observability_witness(game, opt, i);
        if (!w.observable) {
            throw UnobservablePairError("pair (" + std::to_string(opt + 1) + ", " +
                                        std::to_string(i + 1) +
                                        ") is not strongly locally observable");
        }
        const double zn = w.z.norm();
        rep.z_norms[idx(i)] = zn;
        rep.per_action[idx(i)] = rep.gaps[idx(i)] / zn;
        rep.lambda_min = std::min(rep.lambda_min, rep.per_action[idx(i)]);
        loss_ratio_max = std::max(loss_ratio_max, row_diff(game, i, opt).norm() / zn);
    }

    const double sqrt_a = std::sqrt(static_cast<double>(game.n_symbols()));
    const double gap_term = rep.lambda_min / (2.0 * sqrt_a);

    // Distance from p* to the complement of its cell: the nearest point lies on
    // some face {(L_opt - L_i)^T p = 0} within the simplex.
    const auto m = idx(game.n_outcomes());
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (i == opt) continue;
        Matrix E(2, m);
        E.row(0).setOnes();
        E.row(1) = row_diff(game, opt, i).transpose();
        Vector e = Vector::Zero(2);
        e[0] = 1.0;
        LinearProgram lp;
        lp.objective = Vector::Zero(m);
        lp.A_eq = E;
        lp.b_eq = e;
        lp.A_ub.resize(0, m);
        lp.b_ub.resize(0);
        if (solve_lp(lp).status != LpStatus::optimal) continue;
        const Vector proj = project_onto_face(p_star, E, e);
        dist = std::min(dist, (proj - p_star).norm());
    }
    rep.epsilon = std::min(gap_term, 4.0 / 3.0 * dist);

    double signal_norm_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        signal_norm_max = std::max(signal_norm_max, operator_norm(signal_matrix(game, i)));
    }
    rep.epsilon_prime =
        rep.epsilon / std::max(16.0 * signal_norm_max, loss_ratio_max / sqrt_a);
    return rep;
}

DuplicateCollapse collapse_duplicates(const Game& game) {
    const std::size_t n = game.n_actions();
    std::vector<std::size_t> reps;
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) {
        bool placed = false;
        for (std::size_t g = 0; g < reps.size(); ++g) {
            const std::size_t r = reps[g];
            if (game.loss().row(idx(r)) == game.loss().row(idx(i)) &&
                game.feedback().row(idx(r)) == game.feedback().row(idx(i))) {
                groups[g].push_back(i);
                placed = true;
                break;
            }
        }
        if (!placed) {
            reps.push_back(i);
            groups.push_back({i});
        }
    }
    Matrix loss(idx(reps.size()), idx(game.n_outcomes()));
    IndexMatrix feedback(idx(reps.size()), idx(game.n_outcomes()));
    for (std::size_t k = 0; k < reps.size(); ++k) {
        loss.row(idx(k)) = game.loss().row(idx(reps[k]));
        feedback.row(idx(k)) = game.feedback().row(idx(reps[k]));
    }
    std::vector<std::vector<std::size_t>> dups;
    for (auto& g : groups) {
        if (g.size() > 1) dups.push_back(std::move(g));
    }
    return DuplicateCollapse{Game(std::move(loss), std::move(feedback), game.n_symbols()),
                             std::move(reps), std::move(dups)};
}

}  // namespace pmlab
