#include "pmlab/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace pmlab {

namespace {

constexpr double kTol = 1e-9;
constexpr int kMaxPivots = 100000;

class Tableau {
public:
    Tableau(Matrix t, std::vector<Eigen::Index> basis)
        : t_(std::move(t)), basis_(std::move(basis)) {}

    Eigen::Index rows() const { return t_.rows(); }
    Eigen::Index cols() const { return t_.cols() - 1; }
    double rhs(Eigen::Index r) const { return t_(r, t_.cols() - 1); }
    double at(Eigen::Index r, Eigen::Index c) const { return t_(r, c); }
    Eigen::Index basic(Eigen::Index r) const { return basis_[static_cast<std::size_t>(r)]; }

    void pivot(Eigen::Index r, Eigen::Index c) {
        t_.row(r) /= t_(r, c);
        for (Eigen::Index k = 0; k < t_.rows(); ++k) {
            if (k != r && t_(k, c) != 0.0) {
                t_.row(k) -= t_(k, c) * t_.row(r);
            }
        }
        t_(r, c) = 1.0;
        basis_[static_cast<std::size_t>(r)] = c;
    }

    double value(const Vector& cost) const {
        double v = 0.0;
        for (Eigen::Index r = 0; r < rows(); ++r) {
            v += cost[basic(r)] * rhs(r);
        }
        return v;
    }

    // Maximises cost over the allowed columns from the current basic feasible
    // solution. Returns false if the objective is unbounded.
    bool optimise(const Vector& cost, const std::vector<bool>& allowed, int& pivots) {
        std::vector<bool> in_basis(static_cast<std::size_t>(cols()), false);
        while (true) {
            std::fill(in_basis.begin(), in_basis.end(), false);
            for (auto b : basis_) in_basis[static_cast<std::size_t>(b)] = true;

            Eigen::Index entering = -1;
            for (Eigen::Index c = 0; c < cols(); ++c) {
                const auto idx = static_cast<std::size_t>(c);
                if (!allowed[idx] || in_basis[idx]) continue;
                double reduced = cost[c];
                for (Eigen::Index r = 0; r < rows(); ++r) {
                    reduced -= cost[basic(r)] * at(r, c);
                }
                if (reduced > kTol) {
                    entering = c;
                    break;
                }
            }
            if (entering < 0) return true;

            Eigen::Index leaving = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (Eigen::Index r = 0; r < rows(); ++r) {
                const double a = at(r, entering);
                if (a <= kTol) continue;
                const double ratio = rhs(r) / a;
                if (ratio < best_ratio - 1e-12 ||
                    (std::abs(ratio - best_ratio) <= 1e-12 && basic(r) < basic(leaving))) {
                    best_ratio = ratio;
                    leaving = r;
                }
            }
            if (leaving < 0) return false;
            if (++pivots > kMaxPivots) {
                throw LpError("simplex pivot budget exhausted");
            }
            pivot(leaving, entering);
        }
    }

private:
    Matrix t_;
    std::vector<Eigen::Index> basis_;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
    const Eigen::Index n = lp.objective.size();
    const Eigen::Index m_ub = lp.A_ub.rows();
    const Eigen::Index m_eq = lp.A_eq.rows();
    if ((m_ub > 0 && lp.A_ub.cols() != n) || (m_eq > 0 && lp.A_eq.cols() != n) ||
        lp.b_ub.size() != m_ub || lp.b_eq.size() != m_eq) {
        throw LpError("linear program dimensions are inconsistent");
    }
    if (!lp.objective.allFinite() || (m_ub > 0 && !lp.A_ub.allFinite()) ||
        (m_eq > 0 && !lp.A_eq.allFinite()) || !lp.b_ub.allFinite() || !lp.b_eq.allFinite()) {
        throw LpError("linear program contains non-finite coefficients");
    }

    const Eigen::Index m = m_ub + m_eq;
    const Eigen::Index art0 = n + m_ub;
    const Eigen::Index ncols = art0 + m;

    Matrix t = Matrix::Zero(m, ncols + 1);
    for (Eigen::Index r = 0; r < m_ub; ++r) {
        t.block(r, 0, 1, n) = lp.A_ub.row(r);
        t(r, n + r) = 1.0;
        t(r, ncols) = lp.b_ub[r];
    }
    for (Eigen::Index r = 0; r < m_eq; ++r) {
        t.block(m_ub + r, 0, 1, n) = lp.A_eq.row(r);
        t(m_ub + r, ncols) = lp.b_eq[r];
    }
    for (Eigen::Index r = 0; r < m; ++r) {
        if (t(r, ncols) < 0.0) t.row(r) *= -1.0;
        t(r, art0 + r) = 1.0;
    }

    std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
    for (Eigen::Index r = 0; r < m; ++r) basis[static_cast<std::size_t>(r)] = art0 + r;
    Tableau tab(std::move(t), std::move(basis));

    int pivots = 0;
    std::vector<bool> allowed(static_cast<std::size_t>(ncols), true);

    // Phase 1: drive the artificial variables to zero.
    Vector phase1 = Vector::Zero(ncols);
    phase1.tail(m).setConstant(-1.0);
    tab.optimise(phase1, allowed, pivots);
    double scale = 1.0;
    if (m_ub > 0) scale = std::max(scale, lp.b_ub.cwiseAbs().maxCoeff());
    if (m_eq > 0) scale = std::max(scale, lp.b_eq.cwiseAbs().maxCoeff());
    LpResult result;
    if (-tab.value(phase1) > kTol * scale) {
        result.status = LpStatus::infeasible;
        return result;
    }

    // Pivot remaining (zero-valued) artificials out where possible; rows where
    // that fails are redundant and stay inert.
    for (Eigen::Index r = 0; r < tab.rows(); ++r) {
        if (tab.basic(r) < art0) continue;
        for (Eigen::Index c = 0; c < art0; ++c) {
            if (std::abs(tab.at(r, c)) > kTol) {
                tab.pivot(r, c);
                break;
            }
        }
    }
    for (Eigen::Index c = art0; c < ncols; ++c) allowed[static_cast<std::size_t>(c)] = false;

    Vector phase2 = Vector::Zero(ncols);
    phase2.head(n) = lp.objective;
    if (!tab.optimise(phase2, allowed, pivots)) {
        result.status = LpStatus::unbounded;
        return result;
    }

    result.status = LpStatus::optimal;
    result.x = Vector::Zero(n);
    for (Eigen::Index r = 0; r < tab.rows(); ++r) {
        if (tab.basic(r) < n) result.x[tab.basic(r)] = std::max(0.0, tab.rhs(r));
    }
    result.value = lp.objective.dot(result.x);
    return result;
}

}  // namespace pmlab
