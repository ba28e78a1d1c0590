#pragma once

#include "gdp/lp.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace gdp {

// Thrown when an enumeration would exceed its configured work budget.
struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Point = RationalVector;
using Support = std::vector<Index>;  // sorted variable indices

// Bounded {x : Ax = b, x >= 0}. Boundedness is validated at construction by
// checking that the recession cone {x >= 0 : Ax = 0} is trivial; violations
// throw std::invalid_argument.
class StandardFormPolytope {
  public:
    StandardFormPolytope(RationalMatrix A, RationalVector b,
                         std::vector<std::string> labels = {});

    const RationalMatrix& equalities() const { return A_; }
    const RationalVector& rhs() const { return b_; }
    const std::vector<std::string>& labels() const { return labels_; }
    Index num_variables() const { return A_.cols(); }

    bool contains(const Point& x) const;  // Ax = b and x >= 0

  private:
    RationalMatrix A_;
    RationalVector b_;
    std::vector<std::string> labels_;
};

Support support(const Point& x);

// Support preorder: supp(y) contained in supp(x).
bool preceq(const Point& y, const Point& x);

// Exact lexicographic coordinate order, the canonical order for vertex lists.
bool lex_less(const Point& a, const Point& b);

// A feasible x is a vertex iff the equality columns on supp(x) are linearly
// independent (equivalently, x is minimal in the support preorder). Throws
// std::invalid_argument when x is not in the polytope.
bool is_vertex(const StandardFormPolytope& P, const Point& x);

enum class Engine { Auto, Naive, DoubleDescription };

struct EnumOptions {
    Engine engine = Engine::Auto;
    // Cap on the number of column subsets the naive engine may visit before
    // it refuses with BudgetExceeded.
    long long naive_budget = 5'000'000;
};

// Every vertex, exactly deduplicated, in lexicographic coordinate order.
std::vector<Point> enumerate_vertices(const StandardFormPolytope& P,
                                      const EnumOptions& opts = {});

// Vertex set of the carrier face of x: all vertices y with y preceq x.
// Throws std::invalid_argument when x is not in the polytope.
std::vector<Point> vsupp(const StandardFormPolytope& P, const Point& x,
                         const EnumOptions& opts = {});

struct HullIntersection {
    enum class Kind { Empty, Unique, Multiple };
    Kind kind = Kind::Multiple;
    Point point;  // populated when kind == Unique
    // Convex coefficients of `point` over each input set, in input order.
    // Populated only when every set is affinely independent (the coefficients
    // are unique exactly then).
    std::vector<std::vector<Rational>> coefficients;
    bool coefficients_valid = false;
};

// Classifies the intersection of the convex hulls of the given point sets as
// empty, a single point, or higher-dimensional. Sets must be nonempty and all
// points must share one ambient dimension.
HullIntersection hull_intersection_unique(const std::vector<std::vector<Point>>& sets);

}  // namespace gdp
