#pragma once

#include "pmlab/game.hpp"

#include <stdexcept>

namespace pmlab {

// maximize c^T x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0.
// Either constraint block may be empty (zero rows, matching column count).
struct LinearProgram {
    Vector objective;
    Matrix A_ub;
    Vector b_ub;
    Matrix A_eq;
    Vector b_eq;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    Vector x;
    double value = 0.0;
};

struct LpError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dense two-phase simplex, Bland's rule. Feasibility and optimality
// tolerance 1e-9. Throws LpError on malformed input or if the pivot budget is
// exhausted.
LpResult solve_lp(const LinearProgram& lp);

}  // namespace pmlab
