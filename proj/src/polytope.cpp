#include "gdp/polytope.hpp"

#include <algorithm>
#include <set>

namespace gdp {

namespace detail {
std::vector<Point> enumerate_vertices_dd(const RationalMatrix& A, const RationalVector& b);
}

StandardFormPolytope::StandardFormPolytope(RationalMatrix A, RationalVector b,
                                           std::vector<std::string> labels)
    : A_(std::move(A)), b_(std::move(b)), labels_(std::move(labels)) {
    if (A_.rows() != b_.size()) {
        throw std::invalid_argument("polytope: row count does not match right-hand side");
    }
    if (!labels_.empty() && static_cast<Index>(labels_.size()) != A_.cols()) {
        throw std::invalid_argument("polytope: label count does not match variable count");
    }
    if (labels_.empty()) {
        labels_.reserve(static_cast<std::size_t>(A_.cols()));
        for (Index j = 0; j < A_.cols(); ++j) labels_.push_back("x" + std::to_string(j));
    }
    // Trivial recession cone check: any nonzero x >= 0 with Ax = 0 would be an
    // unbounded direction. Normalizing by sum(x) = 1 turns this into a pure
    // feasibility question.
    if (A_.cols() > 0) {
        RationalMatrix R(A_.rows() + 1, A_.cols());
        R.topRows(A_.rows()) = A_;
        for (Index j = 0; j < A_.cols(); ++j) R(A_.rows(), j) = 1;
        RationalVector rhs = RationalVector::Zero(A_.rows() + 1);
        rhs(A_.rows()) = 1;
        if (lp_feasible(R, rhs).feasible) {
            throw std::invalid_argument("polytope: unbounded (nontrivial recession cone)");
        }
    }
}

bool StandardFormPolytope::contains(const Point& x) const {
    if (x.size() != A_.cols()) {
        throw std::invalid_argument("polytope: point dimension does not match variable count");
    }
    for (Index j = 0; j < x.size(); ++j) {
        if (x(j) < 0) return false;
    }
    const RationalVector image = A_ * x;
    for (Index i = 0; i < b_.size(); ++i) {
        if (image(i) != b_(i)) return false;
    }
    return true;
}

Support support(const Point& x) {
    Support s;
    for (Index j = 0; j < x.size(); ++j) {
        if (x(j) != 0) s.push_back(j);
    }
    return s;
}

bool preceq(const Point& y, const Point& x) {
    if (y.size() != x.size()) {
        throw std::invalid_argument("preceq: points of mixed dimension");
    }
    for (Index j = 0; j < y.size(); ++j) {
        if (y(j) != 0 && x(j) == 0) return false;
    }
    return true;
}

bool lex_less(const Point& a, const Point& b) {
    const Index n = std::min(a.size(), b.size());
    for (Index j = 0; j < n; ++j) {
        if (a(j) != b(j)) return a(j) < b(j);
    }
    return a.size() < b.size();
}

bool is_vertex(const StandardFormPolytope& P, const Point& x) {
    if (!P.contains(x)) {
        throw std::invalid_argument("is_vertex: point is not in the polytope");
    }
    const Support s = support(x);
    RationalMatrix cols(P.equalities().rows(), static_cast<Index>(s.size()));
    for (std::size_t k = 0; k < s.size(); ++k) {
        cols.col(static_cast<Index>(k)) = P.equalities().col(s[k]);
    }
    return matrix_rank(cols) == static_cast<Index>(s.size());
}

namespace {

Int binomial(Index n, Index k) {
    if (k < 0 || k > n) return 0;
    Int r = 1;
    for (Index i = 0; i < k; ++i) {
        r *= n - i;
        r /= i + 1;
    }
    return r;
}

struct PointLess {
    bool operator()(const Point& a, const Point& b) const { return lex_less(a, b); }
};

// Basic-solution enumeration over the row-reduced system: every vertex is the
// unique solution supported on some independent column set of size rank.
std::vector<Point> enumerate_vertices_naive(const RationalMatrix& A, const RationalVector& b,
                                            long long budget) {
    RationalMatrix aug(A.rows(), A.cols() + 1);
    aug.leftCols(A.cols()) = A;
    aug.col(A.cols()) = b;
    const RrefResult rr = rref(aug);
    const Index n = A.cols();
    for (Index c : rr.pivot_columns) {
        if (c == n) return {};  // inconsistent equalities: empty polytope
    }
    const Index r = rr.rank;
    const RationalMatrix R = rr.reduced.topRows(r);

    if (binomial(n, r) > budget) {
        throw BudgetExceeded(
            "naive vertex enumeration: C(" + std::to_string(n) + "," + std::to_string(r) +
            ") column subsets exceed the budget of " + std::to_string(budget) +
            "; use the double-description engine or raise the budget");
    }

    std::set<Point, PointLess> found;
    std::vector<Index> subset(static_cast<std::size_t>(r));
    for (Index i = 0; i < r; ++i) subset[static_cast<std::size_t>(i)] = i;
    RationalMatrix block(r, r + 1);
    while (true) {
        for (Index i = 0; i < r; ++i) {
            for (Index j = 0; j < r; ++j) block(i, j) = R(i, subset[static_cast<std::size_t>(j)]);
            block(i, r) = R(i, n);
        }
        const RrefResult sol = rref(block);
        bool basic = sol.rank == r;
        if (basic) {
            for (Index c : sol.pivot_columns) {
                if (c == r) basic = false;  // cannot happen for square full rank, kept for clarity
            }
        }
        if (basic) {
            bool nonneg = true;
            for (Index i = 0; i < r && nonneg; ++i) {
                if (sol.reduced(i, r) < 0) nonneg = false;
            }
            if (nonneg) {
                Point x = Point::Zero(n);
                for (Index i = 0; i < r; ++i) {
                    x(subset[static_cast<std::size_t>(i)]) = sol.reduced(i, r);
                }
                found.insert(std::move(x));
            }
        }
        // next r-subset of {0..n-1} in lexicographic order
        Index i = r;
        while (i > 0 && subset[static_cast<std::size_t>(i - 1)] == n - r + i - 1) --i;
        if (i == 0) break;
        ++subset[static_cast<std::size_t>(i - 1)];
        for (Index j = i; j < r; ++j) {
            subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    if (r == 0) {
        // no equality constraints left: boundedness forces the zero polytope
        Point x = Point::Zero(n);
        bool ok = true;
        for (Index i = 0; i < b.size(); ++i) {
            if (b(i) != 0) ok = false;
        }
        if (ok) found.insert(std::move(x));
    }
    return {found.begin(), found.end()};
}

}  // namespace

std::vector<Point> enumerate_vertices(const StandardFormPolytope& P, const EnumOptions& opts) {
    switch (opts.engine) {
        case Engine::Naive:
            return enumerate_vertices_naive(P.equalities(), P.rhs(), opts.naive_budget);
        case Engine::DoubleDescription:
            return detail::enumerate_vertices_dd(P.equalities(), P.rhs());
        case Engine::Auto:
            break;
    }
    const Index r = matrix_rank(P.equalities());
    const long long small = std::min<long long>(opts.naive_budget, 50'000);
    if (binomial(P.num_variables(), r) <= small) {
        return enumerate_vertices_naive(P.equalities(), P.rhs(), opts.naive_budget);
    }
    return detail::enumerate_vertices_dd(P.equalities(), P.rhs());
}

std::vector<Point> vsupp(const StandardFormPolytope& P, const Point& x, const EnumOptions& opts) {
    if (!P.contains(x)) {
        throw std::invalid_argument("vsupp: point is not in the polytope");
    }
    const Support s = support(x);
    RationalMatrix sub(P.equalities().rows(), static_cast<Index>(s.size()));
    std::vector<std::string> sublabels;
    sublabels.reserve(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
        sub.col(static_cast<Index>(k)) = P.equalities().col(s[k]);
        sublabels.push_back(P.labels()[static_cast<std::size_t>(s[k])]);
    }
    const StandardFormPolytope face(sub, P.rhs(), sublabels);
    const std::vector<Point> small = enumerate_vertices(face, opts);
    std::vector<Point> out;
    out.reserve(small.size());
    for (const Point& y : small) {
        Point full = Point::Zero(P.num_variables());
        for (std::size_t k = 0; k < s.size(); ++k) full(s[k]) = y(static_cast<Index>(k));
        out.push_back(std::move(full));
    }
    return out;
}

HullIntersection hull_intersection_unique(const std::vector<std::vector<Point>>& sets) {
    if (sets.empty()) {
        throw std::invalid_argument("hull_intersection_unique: no sets given");
    }
    Index dim = -1;
    Index total = 0;
    for (const auto& S : sets) {
        if (S.empty()) {
            throw std::invalid_argument("hull_intersection_unique: empty set");
        }
        for (const Point& p : S) {
            if (dim < 0) dim = p.size();
            if (p.size() != dim) {
                throw std::invalid_argument("hull_intersection_unique: points of mixed dimension");
            }
            ++total;
        }
    }
    const Index k = static_cast<Index>(sets.size());

    // Coefficient polytope: one convex-combination weight per point, each set
    // normalized to 1, and all barycenters pinned to the barycenter of set 0.
    RationalMatrix A = RationalMatrix::Zero(k + (k - 1) * dim, total);
    RationalVector b = RationalVector::Zero(A.rows());
    std::vector<Index> offset(sets.size());
    {
        Index at = 0;
        for (std::size_t i = 0; i < sets.size(); ++i) {
            offset[i] = at;
            at += static_cast<Index>(sets[i].size());
        }
    }
    for (Index i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < sets[static_cast<std::size_t>(i)].size(); ++j) {
            A(i, offset[static_cast<std::size_t>(i)] + static_cast<Index>(j)) = 1;
        }
        b(i) = 1;
    }
    for (Index i = 1; i < k; ++i) {
        const Index row0 = k + (i - 1) * dim;
        for (std::size_t j = 0; j < sets[static_cast<std::size_t>(i)].size(); ++j) {
            const Point& p = sets[static_cast<std::size_t>(i)][j];
            for (Index d = 0; d < dim; ++d) {
                A(row0 + d, offset[static_cast<std::size_t>(i)] + static_cast<Index>(j)) = p(d);
            }
        }
        for (std::size_t j = 0; j < sets[0].size(); ++j) {
            const Point& p = sets[0][j];
            for (Index d = 0; d < dim; ++d) {
                A(row0 + d, offset[0] + static_cast<Index>(j)) = -p(d);
            }
        }
    }

    const StandardFormPolytope C(A, b);
    const std::vector<Point> verts = enumerate_vertices(C);

    HullIntersection out;
    if (verts.empty()) {
        out.kind = HullIntersection::Kind::Empty;
        return out;
    }
    auto image = [&](const Point& lambda) {
        Point u = Point::Zero(dim);
        for (std::size_t j = 0; j < sets[0].size(); ++j) {
            u += lambda(offset[0] + static_cast<Index>(j)) * sets[0][j];
        }
        return u;
    };
    const Point u = image(verts[0]);
    for (std::size_t t = 1; t < verts.size(); ++t) {
        const Point v = image(verts[t]);
        for (Index d = 0; d < dim; ++d) {
            if (v(d) != u(d)) {
                out.kind = HullIntersection::Kind::Multiple;
                return out;
            }
        }
    }
    out.kind = HullIntersection::Kind::Unique;
    out.point = u;

    bool all_independent = true;
    for (const auto& S : sets) {
        if (!affinely_independent(S)) {
            all_independent = false;
            break;
        }
    }
    if (all_independent) {
        // unique affine coefficients per set; convexity is automatic since the
        // point lies in each hull
        for (const auto& S : sets) {
            RationalMatrix M(dim + 1, static_cast<Index>(S.size()));
            RationalVector rhs(dim + 1);
            for (std::size_t j = 0; j < S.size(); ++j) {
                for (Index d = 0; d < dim; ++d) M(d, static_cast<Index>(j)) = S[j](d);
                M(dim, static_cast<Index>(j)) = 1;
            }
            rhs.head(dim) = u;
            rhs(dim) = 1;
            const auto alpha = solve_linear(M, rhs);
            if (!alpha) throw std::logic_error("hull_intersection_unique: lost feasibility");
            std::vector<Rational> coeff;
            coeff.reserve(S.size());
            for (Index j = 0; j < alpha->size(); ++j) coeff.push_back((*alpha)(j));
            out.coefficients.push_back(std::move(coeff));
        }
        out.coefficients_valid = true;
    }
    return out;
}

}  // namespace gdp
