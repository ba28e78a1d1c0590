#include "gdp/lp.hpp"

#include <stdexcept>

namespace gdp {

LpFeasibility lp_feasible(const RationalMatrix& A, const RationalVector& b) {
    if (A.rows() != b.size()) {
        throw std::invalid_argument("lp_feasible: row count does not match right-hand side");
    }
    const Index m = A.rows();
    const Index n = A.cols();

    // Tableau [A' | I | b'] with b' >= 0, one artificial variable per row.
    // Minimizing the artificial sum decides feasibility.
    const Index total = n + m;
    RationalMatrix T(m, total + 1);
    T.setZero();
    for (Index i = 0; i < m; ++i) {
        const bool flip = b(i) < 0;
        for (Index j = 0; j < n; ++j) T(i, j) = flip ? Rational(-A(i, j)) : A(i, j);
        T(i, n + i) = 1;
        T(i, total) = flip ? Rational(-b(i)) : b(i);
    }
    std::vector<Index> basis(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

    // Reduced cost row for the artificial-sum objective. Entry `total` holds
    // minus the current objective value.
    RationalVector z = RationalVector::Zero(total + 1);
    for (Index j = 0; j <= total; ++j) {
        Rational s = 0;
        for (Index i = 0; i < m; ++i) s += T(i, j);
        if (j < n || j == total) z(j) = -s;
    }

    while (true) {
        Index enter = -1;
        for (Index j = 0; j < total; ++j) {
            if (z(j) < 0) {
                enter = j;
                break;
            }
        }
        if (enter < 0) break;

        Index leave = -1;
        Rational best = 0;
        for (Index i = 0; i < m; ++i) {
            if (T(i, enter) <= 0) continue;
            const Rational ratio = T(i, total) / T(i, enter);
            if (leave < 0 || ratio < best ||
                (ratio == best && basis[static_cast<std::size_t>(i)] <
                                      basis[static_cast<std::size_t>(leave)])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave < 0) {
            throw std::logic_error("lp_feasible: phase-one objective unbounded");
        }

        const Rational piv = T(leave, enter);
        if (piv != 1) {
            for (Index j = 0; j <= total; ++j) T(leave, j) /= piv;
        }
        for (Index i = 0; i < m; ++i) {
            if (i == leave || T(i, enter) == 0) continue;
            const Rational f = T(i, enter);
            for (Index j = 0; j <= total; ++j) T(i, j) -= f * T(leave, j);
        }
        if (z(enter) != 0) {
            const Rational f = z(enter);
            for (Index j = 0; j <= total; ++j) z(j) -= f * T(leave, j);
        }
        basis[static_cast<std::size_t>(leave)] = enter;
    }

    LpFeasibility out;
    if (z(total) != 0) {
        out.feasible = false;
        return out;
    }
    out.feasible = true;
    out.witness = RationalVector::Zero(n);
    for (Index i = 0; i < m; ++i) {
        if (basis[static_cast<std::size_t>(i)] < n) {
            out.witness(basis[static_cast<std::size_t>(i)]) = T(i, total);
        }
    }
    return out;
}

}  // namespace gdp
