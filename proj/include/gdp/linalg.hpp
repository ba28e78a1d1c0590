#pragma once

#include "gdp/rational.hpp"

#include <boost/multiprecision/eigen.hpp>

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace gdp {

using RationalMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RationalVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
using Index = Eigen::Index;

struct RrefResult {
    RationalMatrix reduced;
    Index rank = 0;
    std::vector<Index> pivot_columns;  // strictly increasing
};

// Reduced row echelon form by exact Gauss-Jordan elimination.
RrefResult rref(const RationalMatrix& M);

Index matrix_rank(const RationalMatrix& M);

// Basis of {x : Mx = 0}, one vector per free column, in column order.
// Empty result means the kernel is trivial.
std::vector<RationalVector> nullspace_basis(const RationalMatrix& M);

// Particular solution of Mx = rhs with all free variables at zero,
// or nullopt when the system is inconsistent.
std::optional<RationalVector> solve_linear(const RationalMatrix& M, const RationalVector& rhs);

// True when no point is an affine combination of the others. Conventions:
// the empty family and singletons are affinely independent.
bool affinely_independent(const std::vector<RationalVector>& points);

struct AffineSolution {
    RationalVector x0;                   // particular solution, free variables at zero
    std::vector<RationalVector> kernel;  // nullspace basis of M
};

// Full solution set {x0 + span(kernel)} of Mx = rhs, or nullopt when inconsistent.
std::optional<AffineSolution> affine_solution(const RationalMatrix& M, const RationalVector& rhs);

// Exact determinant of a square integer matrix by Bareiss fraction-free
// elimination. The 0x0 determinant is 1.
Int integer_determinant(std::vector<std::vector<Int>> M);

}  // namespace gdp
