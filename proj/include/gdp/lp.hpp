#pragma once

#include "gdp/linalg.hpp"

namespace gdp {

struct LpFeasibility {
    bool feasible = false;
    RationalVector witness;  // when feasible: x >= 0 with Ax = b, exactly
};

// Decides whether {x >= 0 : Ax = b} is nonempty, by phase-one simplex over
// exact rationals with Bland's pivot rule (termination guaranteed, no
// tolerances anywhere). Throws std::invalid_argument on shape mismatch.
LpFeasibility lp_feasible(const RationalMatrix& A, const RationalVector& b);

}  // namespace gdp
