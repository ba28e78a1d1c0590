#include "gdp/linalg.hpp"

#include <stdexcept>

namespace gdp {

RrefResult rref(const RationalMatrix& M) {
    RrefResult out;
    out.reduced = M;
    RationalMatrix& R = out.reduced;
    const Index rows = R.rows();
    const Index cols = R.cols();
    Index r = 0;
    for (Index c = 0; c < cols && r < rows; ++c) {
        Index pivot = -1;
        for (Index i = r; i < rows; ++i) {
            if (R(i, c) != 0) {
                pivot = i;
                break;
            }
        }
        if (pivot < 0) continue;
        if (pivot != r) R.row(pivot).swap(R.row(r));
        if (R(r, c) != 1) {
            const Rational inv = R(r, c);
            for (Index j = c; j < cols; ++j) R(r, j) /= inv;
        }
        for (Index i = 0; i < rows; ++i) {
            if (i == r || R(i, c) == 0) continue;
            const Rational f = R(i, c);
            for (Index j = c; j < cols; ++j) R(i, j) -= f * R(r, j);
        }
        out.pivot_columns.push_back(c);
        ++r;
    }
    out.rank = r;
    return out;
}

Index matrix_rank(const RationalMatrix& M) {
    return rref(M).rank;
}

std::vector<RationalVector> nullspace_basis(const RationalMatrix& M) {
    const RrefResult rr = rref(M);
    const Index n = M.cols();
    std::vector<char> is_pivot(static_cast<std::size_t>(n), 0);
    for (Index c : rr.pivot_columns) is_pivot[static_cast<std::size_t>(c)] = 1;
    std::vector<RationalVector> basis;
    for (Index c = 0; c < n; ++c) {
        if (is_pivot[static_cast<std::size_t>(c)]) continue;
        RationalVector v = RationalVector::Zero(n);
        v(c) = 1;
        for (Index i = 0; i < rr.rank; ++i) {
            v(rr.pivot_columns[static_cast<std::size_t>(i)]) = -rr.reduced(i, c);
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<RationalVector> solve_linear(const RationalMatrix& M, const RationalVector& rhs) {
    if (M.rows() != rhs.size()) {
        throw std::invalid_argument("solve_linear: row count does not match right-hand side");
    }
    RationalMatrix aug(M.rows(), M.cols() + 1);
    aug.leftCols(M.cols()) = M;
    aug.col(M.cols()) = rhs;
    const RrefResult rr = rref(aug);
    for (Index c : rr.pivot_columns) {
        if (c == M.cols()) return std::nullopt;
    }
    RationalVector x = RationalVector::Zero(M.cols());
    for (Index i = 0; i < rr.rank; ++i) {
        x(rr.pivot_columns[static_cast<std::size_t>(i)]) = rr.reduced(i, M.cols());
    }
    return x;
}

bool affinely_independent(const std::vector<RationalVector>& points) {
    if (points.size() <= 1) return true;
    const Index dim = points[0].size();
    for (const RationalVector& p : points) {
        if (p.size() != dim) {
            throw std::invalid_argument("affinely_independent: points of mixed dimension");
        }
    }
    RationalMatrix diffs(static_cast<Index>(points.size()) - 1, dim);
    for (std::size_t i = 1; i < points.size(); ++i) {
        diffs.row(static_cast<Index>(i) - 1) = (points[i] - points[0]).transpose();
    }
    return matrix_rank(diffs) == static_cast<Index>(points.size()) - 1;
}

std::optional<AffineSolution> affine_solution(const RationalMatrix& M, const RationalVector& rhs) {
    if (M.rows() != rhs.size()) {
        throw std::invalid_argument("affine_solution: row count does not match right-hand side");
    }
    RationalMatrix aug(M.rows(), M.cols() + 1);
    aug.leftCols(M.cols()) = M;
    aug.col(M.cols()) = rhs;
    const RrefResult rr = rref(aug);
    const Index n = M.cols();
    std::vector<char> is_pivot(static_cast<std::size_t>(n), 0);
    AffineSolution sol;
    sol.x0 = RationalVector::Zero(n);
    for (Index i = 0; i < rr.rank; ++i) {
        const Index c = rr.pivot_columns[static_cast<std::size_t>(i)];
        if (c == n) return std::nullopt;
        is_pivot[static_cast<std::size_t>(c)] = 1;
        sol.x0(c) = rr.reduced(i, n);
    }
    for (Index c = 0; c < n; ++c) {
        if (is_pivot[static_cast<std::size_t>(c)]) continue;
        RationalVector v = RationalVector::Zero(n);
        v(c) = 1;
        for (Index i = 0; i < rr.rank; ++i) {
            v(rr.pivot_columns[static_cast<std::size_t>(i)]) = -rr.reduced(i, c);
        }
        sol.kernel.push_back(std::move(v));
    }
    return sol;
}

Int integer_determinant(std::vector<std::vector<Int>> M) {
    const std::size_t n = M.size();
    for (const auto& row : M) {
        if (row.size() != n) throw std::invalid_argument("integer_determinant: matrix not square");
    }
    if (n == 0) return 1;
    Int prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (M[k][k] == 0) {
            std::size_t s = k + 1;
            while (s < n && M[s][k] == 0) ++s;
            if (s == n) return 0;
            std::swap(M[k], M[s]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) / prev;
            }
            M[i][k] = 0;
        }
        prev = M[k][k];
    }
    return sign > 0 ? M[n - 1][n - 1] : Int(-M[n - 1][n - 1]);
}

}  // namespace gdp
