#include "gdp/polytope.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>

// Exact double description: vertices of {x >= 0 : Ax = b} are the extreme
// rays of the homogenization cone {(s,t) : s >= 0, x0*s + N*t >= 0}, where
// x0 + span(N) parametrizes the affine solution set of Ax = b. The cone is
// pointed whenever the polytope is bounded, so the classic combinatorial
// adjacency test applies throughout.

namespace gdp::detail {

namespace {

using Mask = std::vector<std::uint64_t>;

void set_bit(Mask& m, std::size_t k) { m[k >> 6] |= std::uint64_t(1) << (k & 63); }

Mask intersect(const Mask& a, const Mask& b) {
    Mask out(a.size());
    for (std::size_t w = 0; w < a.size(); ++w) out[w] = a[w] & b[w];
    return out;
}

bool mask_subset(const Mask& sub, const Mask& sup) {
    for (std::size_t w = 0; w < sub.size(); ++w) {
        if (sub[w] & ~sup[w]) return false;
    }
    return true;
}

int mask_popcount(const Mask& m) {
    int c = 0;
    for (std::uint64_t w : m) c += __builtin_popcountll(w);
    return c;
}

struct Ray {
    std::vector<Int> v;
    Mask zeros;
};

Int dot(const std::vector<Int>& a, const std::vector<Int>& b) {
    Int s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void make_primitive(std::vector<Int>& v) {
    Int g = 0;
    for (const Int& x : v) g = boost::multiprecision::gcd(g, x);
    if (g > 1) {
        for (Int& x : v) x /= g;
    }
}

std::vector<Int> integer_row(const std::vector<Rational>& r) {
    Int L = 1;
    for (const Rational& q : r) L = boost::multiprecision::lcm(L, denominator(q));
    std::vector<Int> out;
    out.reserve(r.size());
    for (const Rational& q : r) out.push_back(numerator(q) * (L / denominator(q)));
    make_primitive(out);
    return out;
}

}  // namespace

std::vector<Point> enumerate_vertices_dd(const RationalMatrix& A, const RationalVector& b) {
    const auto par = affine_solution(A, b);
    if (!par) return {};
    const Index n = A.cols();
    const Index d = static_cast<Index>(par->kernel.size());
    if (d == 0) {
        for (Index j = 0; j < n; ++j) {
            if (par->x0(j) < 0) return {};
        }
        return {par->x0};
    }
    const Index D = d + 1;

    // one inequality per variable plus the homogenizing s >= 0
    std::vector<std::vector<Int>> all_rows;
    all_rows.reserve(static_cast<std::size_t>(n) + 1);
    for (Index i = 0; i < n; ++i) {
        std::vector<Rational> row(static_cast<std::size_t>(D));
        row[0] = par->x0(i);
        for (Index j = 0; j < d; ++j) {
            row[static_cast<std::size_t>(j) + 1] = par->kernel[static_cast<std::size_t>(j)](i);
        }
        all_rows.push_back(integer_row(row));
    }
    {
        std::vector<Int> srow(static_cast<std::size_t>(D), 0);
        srow[0] = 1;
        all_rows.push_back(std::move(srow));
    }

    // rows with many nonzeros first: they discard infeasible rays early
    std::vector<std::size_t> order(all_rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<int> nnz(all_rows.size(), 0);
    for (std::size_t i = 0; i < all_rows.size(); ++i) {
        for (const Int& x : all_rows[i]) {
            if (x != 0) ++nnz[i];
        }
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (nnz[a] != nnz[b]) return nnz[a] > nnz[b];
        return a < b;
    });

    // initial simplicial cone from the first D independent rows
    std::vector<std::size_t> basis;
    std::vector<std::size_t> queue;
    {
        RationalMatrix acc(D, D);
        Index have = 0;
        for (std::size_t idx : order) {
            bool taken = false;
            if (have < D) {
                for (Index j = 0; j < D; ++j) {
                    acc(have, j) = Rational(all_rows[idx][static_cast<std::size_t>(j)]);
                }
                if (matrix_rank(acc.topRows(have + 1)) == have + 1) {
                    basis.push_back(idx);
                    ++have;
                    taken = true;
                }
            }
            if (!taken) queue.push_back(idx);
        }
        if (have != D) {
            throw std::logic_error("double description: constraint rows do not span");
        }
    }

    const std::size_t total = all_rows.size();
    const std::size_t words = (total + 63) / 64;

    std::vector<Ray> rays;
    {
        RationalMatrix BI(D, 2 * D);
        BI.setZero();
        for (Index i = 0; i < D; ++i) {
            for (Index j = 0; j < D; ++j) {
                BI(i, j) = Rational(all_rows[basis[static_cast<std::size_t>(i)]][static_cast<std::size_t>(j)]);
            }
            BI(i, D + i) = 1;
        }
        const RrefResult rr = rref(BI);
        for (Index j = 0; j < D; ++j) {
            std::vector<Rational> col(static_cast<std::size_t>(D));
            for (Index i = 0; i < D; ++i) col[static_cast<std::size_t>(i)] = rr.reduced(i, D + j);
            Ray ray;
            ray.v = integer_row(col);
            ray.zeros = Mask(words, 0);
            for (std::size_t k = 0; k < basis.size(); ++k) {
                if (dot(all_rows[basis[k]], ray.v) == 0) set_bit(ray.zeros, k);
            }
            rays.push_back(std::move(ray));
        }
    }

    std::size_t processed = basis.size();
    for (std::size_t qi = 0; qi < queue.size() && !rays.empty(); ++qi, ++processed) {
        const std::vector<Int>& h = all_rows[queue[qi]];
        std::vector<Int> val(rays.size());
        std::vector<std::size_t> pos, zero, neg;
        for (std::size_t r = 0; r < rays.size(); ++r) {
            val[r] = dot(h, rays[r].v);
            if (val[r] > 0) {
                pos.push_back(r);
            } else if (val[r] < 0) {
                neg.push_back(r);
            } else {
                zero.push_back(r);
            }
        }
        if (neg.empty()) {
            for (std::size_t r : zero) set_bit(rays[r].zeros, processed);
            continue;
        }

        // combine adjacent (positive, negative) pairs while the pre-cut ray
        // list is still intact; (p,q) span a 2-face iff no other extreme ray
        // is tight on every constraint both are tight on
        std::vector<Ray> created;
        for (std::size_t p : pos) {
            for (std::size_t q : neg) {
                Mask common = intersect(rays[p].zeros, rays[q].zeros);
                if (mask_popcount(common) < static_cast<int>(D) - 2) continue;
                bool adjacent = true;
                for (std::size_t r = 0; r < rays.size(); ++r) {
                    if (r == p || r == q) continue;
                    if (mask_subset(common, rays[r].zeros)) {
                        adjacent = false;
                        break;
                    }
                }
                if (!adjacent) continue;
                Ray nr;
                nr.v.resize(static_cast<std::size_t>(D));
                for (std::size_t i = 0; i < static_cast<std::size_t>(D); ++i) {
                    nr.v[i] = val[p] * rays[q].v[i] - val[q] * rays[p].v[i];
                }
                make_primitive(nr.v);
                set_bit(common, processed);
                nr.zeros = std::move(common);
                created.push_back(std::move(nr));
            }
        }

        std::vector<Ray> next;
        next.reserve(pos.size() + zero.size() + created.size());
        for (std::size_t r : pos) next.push_back(std::move(rays[r]));
        for (std::size_t r : zero) {
            set_bit(rays[r].zeros, processed);
            next.push_back(std::move(rays[r]));
        }
        for (Ray& nr : created) next.push_back(std::move(nr));
        rays = std::move(next);
    }

    std::vector<Point> out;
    out.reserve(rays.size());
    for (const Ray& r : rays) {
        if (r.v[0] <= 0) {
            throw std::logic_error("double description: final ray escapes the s > 0 halfspace");
        }
        Point x = par->x0;
        for (Index j = 0; j < d; ++j) {
            const Rational t = Rational(r.v[static_cast<std::size_t>(j) + 1]) / Rational(r.v[0]);
            if (t != 0) x += t * par->kernel[static_cast<std::size_t>(j)];
        }
        out.push_back(std::move(x));
    }
    std::sort(out.begin(), out.end(), lex_less);
    return out;
}

}  // namespace gdp::detail
