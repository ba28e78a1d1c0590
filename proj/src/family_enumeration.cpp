#include "gdp/criteria.hpp"

#include "gdp/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <future>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

namespace gdp {

namespace {

long long reduce_row(std::vector<long long>& r) {
    long long g = 0;
    for (long long v : r) g = std::gcd(g, v < 0 ? -v : v);
    if (g > 1) {
        for (long long& v : r) v /= g;
    }
    return g;
}

// Incremental exact row reduction over the integers. Rows are kept in echelon
// form with gcd-reduced entries, so values stay far below overflow for the
// dimensions used here (at most 2m <= 10 columns).
struct Eliminator {
    std::vector<std::vector<long long>> rows;  // sorted by pivot column
    std::vector<int> pivots;

    int rank() const { return static_cast<int>(rows.size()); }

    void insert(std::vector<long long> r) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const long long at = r[static_cast<std::size_t>(pivots[i])];
            if (at == 0) continue;
            const long long lead = rows[i][static_cast<std::size_t>(pivots[i])];
            for (std::size_t c = 0; c < r.size(); ++c) {
                r[c] = lead * r[c] - at * rows[i][c];
            }
            reduce_row(r);
        }
        int pivot = -1;
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (r[c] != 0) {
                pivot = static_cast<int>(c);
                break;
            }
        }
        if (pivot < 0) return;
        std::size_t at = 0;
        while (at < pivots.size() && pivots[at] < pivot) ++at;
        rows.insert(rows.begin() + static_cast<std::ptrdiff_t>(at), std::move(r));
        pivots.insert(pivots.begin() + static_cast<std::ptrdiff_t>(at), pivot);
    }

    // Kernel vector when the rank is dim-1: integer, gcd-reduced, entry signs
    // as produced by back substitution.
    std::vector<long long> kernel_vector(int dim) const {
        std::vector<bool> is_pivot(static_cast<std::size_t>(dim), false);
        for (int p : pivots) is_pivot[static_cast<std::size_t>(p)] = true;
        int free_col = -1;
        for (int c = 0; c < dim; ++c) {
            if (!is_pivot[static_cast<std::size_t>(c)]) free_col = c;
        }
        std::vector<long long> x(static_cast<std::size_t>(dim), 0);
        x[static_cast<std::size_t>(free_col)] = 1;
        for (std::size_t i = rows.size(); i-- > 0;) {
            const std::vector<long long>& row = rows[i];
            const int pc = pivots[i];
            long long s = 0;
            for (int c = pc + 1; c < dim; ++c) {
                s += row[static_cast<std::size_t>(c)] * x[static_cast<std::size_t>(c)];
            }
            const long long lead = row[static_cast<std::size_t>(pc)];
            if (s % lead != 0) {
                const long long g = std::gcd(s < 0 ? -s : s, lead < 0 ? -lead : lead);
                const long long t = (lead < 0 ? -lead : lead) / g;
                for (long long& v : x) v *= t;
                s *= t;
            }
            x[static_cast<std::size_t>(pc)] = -s / lead;
        }
        reduce_row(x);
        return x;
    }
};

struct ForestData {
    std::vector<std::pair<int, int>> edges;         // (left position, right position)
    std::vector<std::vector<long long>> rows;       // component balance rows, dim su+sw
    bool diagonal = false;                          // every edge (i, i)
};

// All acyclic edge subsets of the complete bipartite graph on su x sw
// positions in which every position meets an edge.
std::vector<ForestData> covering_forests(int su, int sw) {
    const int ne = su * sw;
    std::vector<ForestData> out;
    for (unsigned mask = 1; mask < (1u << ne); ++mask) {
        std::vector<std::pair<int, int>> edges;
        std::vector<int> parent(static_cast<std::size_t>(su + sw));
        std::iota(parent.begin(), parent.end(), 0);
        const auto find = [&](int a) {
            while (parent[static_cast<std::size_t>(a)] != a) {
                a = parent[static_cast<std::size_t>(a)] =
                    parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            }
            return a;
        };
        std::vector<bool> left_used(static_cast<std::size_t>(su), false);
        std::vector<bool> right_used(static_cast<std::size_t>(sw), false);
        bool acyclic = true;
        for (int e = 0; e < ne && acyclic; ++e) {
            if (!(mask & (1u << e))) continue;
            const int i = e / sw, j = e % sw;
            const int a = find(i), b = find(su + j);
            if (a == b) {
                acyclic = false;
                break;
            }
            parent[static_cast<std::size_t>(b)] = a;
            edges.emplace_back(i, j);
            left_used[static_cast<std::size_t>(i)] = true;
            right_used[static_cast<std::size_t>(j)] = true;
        }
        if (!acyclic) continue;
        if (std::find(left_used.begin(), left_used.end(), false) != left_used.end()) continue;
        if (std::find(right_used.begin(), right_used.end(), false) != right_used.end()) continue;

        ForestData f;
        f.edges = std::move(edges);
        f.diagonal = su == sw && std::all_of(f.edges.begin(), f.edges.end(), [](const auto& e) {
                         return e.first == e.second;
                     });
        std::vector<std::vector<int>> members(static_cast<std::size_t>(su + sw));
        for (int k = 0; k < su + sw; ++k) {
            members[static_cast<std::size_t>(find(k))].push_back(k);
        }
        for (const auto& comp : members) {
            if (comp.empty()) continue;
            std::vector<long long> row(static_cast<std::size_t>(su + sw), 0);
            for (int k : comp) row[static_cast<std::size_t>(k)] = k < su ? 1 : -1;
            f.rows.push_back(std::move(row));
        }
        out.push_back(std::move(f));
    }
    return out;
}

// Coefficients expressing the marginal pair over a forest's edges, by peeling
// leaves. Returns false when any coefficient fails to be strictly positive.
bool leaf_coefficients(const ForestData& f, int su,
                       const std::vector<long long>& left_residual_in,
                       const std::vector<long long>& right_residual_in,
                       std::vector<long long>& lambda) {
    std::vector<long long> left = left_residual_in;
    std::vector<long long> right = right_residual_in;
    const std::size_t ne = f.edges.size();
    lambda.assign(ne, 0);
    std::vector<int> degree(static_cast<std::size_t>(su + static_cast<int>(right.size())), 0);
    std::vector<bool> done(ne, false);
    for (const auto& [i, j] : f.edges) {
        ++degree[static_cast<std::size_t>(i)];
        ++degree[static_cast<std::size_t>(su + j)];
    }
    std::size_t remaining = ne;
    while (remaining > 0) {
        bool progressed = false;
        for (std::size_t e = 0; e < ne; ++e) {
            if (done[e]) continue;
            const auto [i, j] = f.edges[e];
            const bool left_leaf = degree[static_cast<std::size_t>(i)] == 1;
            const bool right_leaf = degree[static_cast<std::size_t>(su + j)] == 1;
            if (!left_leaf && !right_leaf) continue;
            const long long v = left_leaf ? left[static_cast<std::size_t>(i)]
                                          : right[static_cast<std::size_t>(j)];
            if (v <= 0) return false;
            lambda[e] = v;
            left[static_cast<std::size_t>(i)] -= v;
            right[static_cast<std::size_t>(j)] -= v;
            --degree[static_cast<std::size_t>(i)];
            --degree[static_cast<std::size_t>(su + j)];
            done[e] = true;
            --remaining;
            progressed = true;
        }
        if (!progressed) return false;  // unreachable for forests
    }
    return true;
}

struct SupportTask {
    std::vector<int> left_labels;
    std::vector<int> right_labels;
    bool rose = false;
    int dim = 0;                                         // search space dimension
    const std::vector<ForestData>* forests = nullptr;
    std::vector<std::vector<std::vector<long long>>> rows;  // per forest, in task space
};

void emit_candidates(const SupportTask& task, const Scenario& S, int n, int m,
                     const std::vector<int>& chosen, const Eliminator& elim,
                     std::vector<GraphDistribution>& out) {
    const std::vector<long long> kernel = elim.kernel_vector(task.dim);
    bool negative = false, positive = false;
    for (long long v : kernel) {
        if (v == 0) return;
        (v < 0 ? negative : positive) = true;
    }
    if (negative && positive) return;
    std::vector<long long> x = kernel;
    if (negative) {
        for (long long& v : x) v = -v;
    }

    const int su = static_cast<int>(task.left_labels.size());
    std::vector<long long> left(x.begin(), x.begin() + su);
    std::vector<long long> right =
        task.rose ? left : std::vector<long long>(x.begin() + su, x.end());
    long long total = 0;
    for (long long v : left) total += v;

    // One coefficient vector per distinct forest of the multiset.
    std::vector<std::vector<long long>> lambda(chosen.size());
    std::vector<int> source(chosen.size(), -1);
    for (std::size_t k = 0; k < chosen.size(); ++k) {
        if (k > 0 && chosen[k] == chosen[k - 1]) {
            source[k] = source[k - 1];
            continue;
        }
        if (!leaf_coefficients((*task.forests)[static_cast<std::size_t>(chosen[k])], su, left,
                               right, lambda[k])) {
            return;
        }
        source[k] = static_cast<int>(k);
    }

    std::vector<int> order = chosen;
    do {
        std::vector<RationalMatrix> mats;
        mats.reserve(order.size());
        for (int fi : order) {
            const std::size_t slot = static_cast<std::size_t>(
                std::find(chosen.begin(), chosen.end(), fi) - chosen.begin());
            const ForestData& f = (*task.forests)[static_cast<std::size_t>(fi)];
            RationalMatrix mat = RationalMatrix::Zero(m, m);
            for (std::size_t e = 0; e < f.edges.size(); ++e) {
                mat(task.left_labels[static_cast<std::size_t>(f.edges[e].first)],
                    task.right_labels[static_cast<std::size_t>(f.edges[e].second)]) =
                    Rational(lambda[source[slot]][e]) / total;
            }
            mats.push_back(std::move(mat));
        }
        out.emplace_back(S, std::move(mats));
    } while (std::next_permutation(order.begin(), order.end()));
    (void)n;
}

void search(const SupportTask& task, const Scenario& S, int n, int m, std::size_t start,
            std::vector<int>& chosen, const Eliminator& elim, std::atomic<long long>& budget,
            std::vector<GraphDistribution>& out) {
    if (chosen.size() == static_cast<std::size_t>(n)) {
        if (elim.rank() == task.dim - 1) emit_candidates(task, S, n, m, chosen, elim, out);
        return;
    }
    for (std::size_t f = start; f < task.forests->size(); ++f) {
        if (budget.fetch_sub(1) <= 0) {
            throw BudgetExceeded("family enumeration: support search budget exhausted");
        }
        Eliminator next = elim;
        for (const auto& row : task.rows[f]) next.insert(row);
        if (next.rank() == task.dim) continue;  // trivial kernel, no extension survives
        chosen.push_back(static_cast<int>(f));
        search(task, S, n, m, f, chosen, next, budget, out);
        chosen.pop_back();
    }
}

std::vector<GraphDistribution> enumerate_family(int n, int m, bool rose, long long budget_limit) {
    const Scenario S = rose ? rose_scenario(n, m) : dipole_scenario(n, m);

    // Forest pools per position-space size, built up front and shared.
    std::vector<std::vector<std::vector<ForestData>>> pool(
        static_cast<std::size_t>(m) + 1,
        std::vector<std::vector<ForestData>>(static_cast<std::size_t>(m) + 1));
    for (int su = 1; su <= m; ++su) {
        for (int sw = 1; sw <= m; ++sw) {
            if (rose && su != sw) continue;
            pool[static_cast<std::size_t>(su)][static_cast<std::size_t>(sw)] =
                covering_forests(su, sw);
        }
    }

    const auto labels_of = [&](unsigned mask) {
        std::vector<int> labels;
        for (int a = 0; a < m; ++a) {
            if (mask & (1u << a)) labels.push_back(a);
        }
        return labels;
    };

    std::vector<SupportTask> tasks;
    for (unsigned lm = 1; lm < (1u << m); ++lm) {
        for (unsigned rm = 1; rm < (1u << m); ++rm) {
            if (rose && rm != lm) continue;
            SupportTask task;
            task.left_labels = labels_of(lm);
            task.right_labels = labels_of(rm);
            task.rose = rose;
            const int su = static_cast<int>(task.left_labels.size());
            const int sw = static_cast<int>(task.right_labels.size());
            task.dim = rose ? su : su + sw;
            task.forests = &pool[static_cast<std::size_t>(su)][static_cast<std::size_t>(sw)];
            task.rows.reserve(task.forests->size());
            for (const ForestData& f : *task.forests) {
                std::vector<std::vector<long long>> rows;
                for (const auto& row : f.rows) {
                    if (rose) {
                        std::vector<long long> folded(static_cast<std::size_t>(su), 0);
                        for (int c = 0; c < su; ++c) {
                            folded[static_cast<std::size_t>(c)] =
                                row[static_cast<std::size_t>(c)] +
                                row[static_cast<std::size_t>(su + c)];
                        }
                        bool zero = std::all_of(folded.begin(), folded.end(),
                                                [](long long v) { return v == 0; });
                        if (!zero) rows.push_back(std::move(folded));
                    } else {
                        rows.push_back(row);
                    }
                }
                task.rows.push_back(std::move(rows));
            }
            tasks.push_back(std::move(task));
        }
    }

    std::atomic<long long> budget(budget_limit);
    std::vector<std::vector<GraphDistribution>> results(tasks.size());
    const std::size_t workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    std::exception_ptr failure;
    for (std::size_t batch = 0; batch < tasks.size(); batch += workers) {
        const std::size_t end = std::min(tasks.size(), batch + workers);
        std::vector<std::future<void>> futs;
        for (std::size_t t = batch; t < end; ++t) {
            futs.push_back(std::async(std::launch::async, [&, t] {
                std::vector<int> chosen;
                Eliminator elim;
                search(tasks[t], S, n, m, 0, chosen, elim, budget, results[t]);
            }));
        }
        for (auto& fut : futs) {
            try {
                fut.get();
            } catch (...) {
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
    }

    std::vector<GraphDistribution> out;
    for (auto& part : results) {
        for (auto& p : part) out.push_back(std::move(p));
    }
    std::sort(out.begin(), out.end(), [](const GraphDistribution& a, const GraphDistribution& b) {
        return lex_less(flatten(a), flatten(b));
    });
    return out;
}

}  // namespace

std::vector<GraphDistribution> enumerate_dipole_vertices(int n, int m, long long budget) {
    return enumerate_family(n, m, false, budget);
}

std::vector<GraphDistribution> enumerate_rose_vertices(int n, int m, long long budget) {
    return enumerate_family(n, m, true, budget);
}

}  // namespace gdp
