#include "gdp/criteria.hpp"

#include "gdp/linalg.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gdp {

namespace {

struct UnionFind {
    std::vector<int> parent;

    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }

    // False when a and b were already in one component.
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[b] = a;
        return true;
    }
};

void check_label(int value, int outcomes, const char* where) {
    if (value < 0 || value >= outcomes) {
        throw std::invalid_argument(std::string(where) + ": outcome label out of range");
    }
}

}  // namespace

Point ProductSimplexVertex::expand() const {
    if (outcomes <= 0) {
        throw std::invalid_argument("product-simplex vertex: outcome count must be positive");
    }
    Point x = Point::Zero(static_cast<Index>(block_outcomes.size()) * outcomes);
    for (std::size_t j = 0; j < block_outcomes.size(); ++j) {
        check_label(block_outcomes[j], outcomes, "product-simplex vertex");
        x(static_cast<Index>(j) * outcomes + block_outcomes[j]) = 1;
    }
    return x;
}

SupportBipartiteGraph support_graph(const std::vector<ProductSimplexVertex>& set) {
    if (set.empty()) {
        throw std::invalid_argument("support graph: the set is empty");
    }
    SupportBipartiteGraph h;
    h.outcomes = set.front().outcomes;
    std::set<std::pair<int, int>> edges;
    for (const ProductSimplexVertex& v : set) {
        if (v.block_outcomes.size() != 2) {
            throw std::invalid_argument("support graph: elements must have exactly two blocks");
        }
        if (v.outcomes != h.outcomes) {
            throw std::invalid_argument("support graph: mixed outcome counts");
        }
        check_label(v.block_outcomes[0], h.outcomes, "support graph");
        check_label(v.block_outcomes[1], h.outcomes, "support graph");
        edges.emplace(v.block_outcomes[0], v.block_outcomes[1]);
    }
    h.edges.assign(edges.begin(), edges.end());
    return h;
}

bool is_acyclic(const SupportBipartiteGraph& h) {
    const int m = h.outcomes;
    UnionFind uf(2 * m);
    for (const auto& [a, b] : h.edges) {
        check_label(a, m, "acyclicity test");
        check_label(b, m, "acyclicity test");
        if (!uf.unite(a, m + b)) return false;
    }
    return true;
}

bool is_rose(const Scenario& S) {
    return S.nodes().size() == 1 && !S.edges().empty();
}

bool is_dipole(const Scenario& S) {
    if (S.nodes().size() != 2 || S.edges().empty()) return false;
    const Edge& first = S.edges().front();
    if (first.source == first.target) return false;
    return std::all_of(S.edges().begin(), S.edges().end(), [&](const Edge& e) {
        return e.source == first.source && e.target == first.target;
    });
}

std::vector<std::vector<ProductSimplexVertex>> a_sets(const GraphDistribution& p) {
    const Scenario& S = p.scenario();
    if (!is_rose(S) && !is_dipole(S)) {
        throw std::invalid_argument("a_sets: scenario is neither a rose nor a dipole");
    }
    const int m = S.outcomes();
    std::vector<std::vector<ProductSimplexVertex>> out;
    out.reserve(p.edge_matrices().size());
    for (const RationalMatrix& mat : p.edge_matrices()) {
        std::vector<ProductSimplexVertex> set;
        for (Index a = 0; a < m; ++a) {
            for (Index b = 0; b < m; ++b) {
                if (mat(a, b) != 0) {
                    set.push_back({{static_cast<int>(a), static_cast<int>(b)}, m});
                }
            }
        }
        out.push_back(std::move(set));
    }
    return out;
}

QMatrix q_matrix(const std::vector<SupportBipartiteGraph>& graphs, int outcomes,
                 QVariant variant) {
    if (outcomes <= 0) {
        throw std::invalid_argument("balance matrix: outcome count must be positive");
    }
    const int m = outcomes;
    std::vector<QRow> rows;
    for (std::size_t g = 0; g < graphs.size(); ++g) {
        const SupportBipartiteGraph& h = graphs[g];
        if (h.outcomes != m) {
            throw std::invalid_argument("balance matrix: graph outcome count differs");
        }
        UnionFind uf(2 * m);
        for (const auto& [a, b] : h.edges) {
            check_label(a, m, "balance matrix");
            check_label(b, m, "balance matrix");
            uf.unite(a, m + b);
        }
        // Key each component by its smallest member; map order then gives the
        // row order within the graph.
        std::map<int, QRow> components;
        std::map<int, int> root_key;
        for (int k = 0; k < 2 * m; ++k) {
            const int root = uf.find(k);
            const auto inserted = root_key.try_emplace(root, k);
            QRow& row = components[inserted.first->second];
            row.graph = static_cast<int>(g);
            if (k < m) {
                row.left.push_back(k);
            } else {
                row.right.push_back(k - m);
            }
        }
        for (auto& [key, row] : components) rows.push_back(std::move(row));
    }
    if (variant == QVariant::Tilde) {
        for (int a = 0; a < m; ++a) rows.push_back({-1, {a}, {a}});
    }

    QMatrix q;
    q.matrix = RationalMatrix::Zero(static_cast<Index>(rows.size()), 2 * m);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (int a : rows[i].left) q.matrix(static_cast<Index>(i), a) = 1;
        for (int b : rows[i].right) q.matrix(static_cast<Index>(i), m + b) = -1;
    }
    q.rows = std::move(rows);
    return q;
}

namespace {

std::string render_certificate(const GraphDistribution& p, const VertexCriterionReport& rep,
                               QVariant variant) {
    const Scenario& S = p.scenario();
    const int m = S.outcomes();
    std::ostringstream out;
    out << "vertex criterion: " << S.edges().size() << " edge(s), " << m << " outcomes\n";
    for (std::size_t i = 0; i < rep.graphs.size(); ++i) {
        out << "edge " << S.edges()[i].id << ": support";
        for (const auto& [a, b] : rep.graphs[i].edges) out << " u" << a << "-w" << b;
        out << (rep.acyclic[i] ? "  (acyclic)" : "  (contains a cycle)") << "\n";
    }
    out << "balance rows over u0..u" << m - 1 << ", w0..w" << m - 1;
    if (variant == QVariant::Tilde) out << " with anchor rows";
    out << ":\n";
    for (std::size_t i = 0; i < rep.q.rows.size(); ++i) {
        const QRow& row = rep.q.rows[i];
        if (row.graph >= 0) {
            out << "  [" << S.edges()[static_cast<std::size_t>(row.graph)].id << "] {";
            for (std::size_t j = 0; j < row.left.size(); ++j) {
                out << (j ? " " : "") << "u" << row.left[j];
            }
            out << " |";
            for (int b : row.right) out << " w" << b;
            out << "}";
        } else {
            out << "  [anchor] u" << row.left.front() << "-w" << row.right.front();
        }
        out << " ->";
        for (Index c = 0; c < rep.q.matrix.cols(); ++c) {
            out << " " << to_string(rep.q.matrix(static_cast<Index>(i), c));
        }
        out << "\n";
    }
    out << "rank " << rep.rank << " of required " << rep.required_rank << "\n";
    out << "verdict: " << (rep.vertex ? "vertex" : "not a vertex") << "\n";
    return out.str();
}

VertexCriterionReport criterion_report(const GraphDistribution& p, QVariant variant) {
    const int m = p.scenario().outcomes();
    VertexCriterionReport rep;
    for (const auto& set : a_sets(p)) rep.graphs.push_back(support_graph(set));
    bool all_acyclic = true;
    for (const SupportBipartiteGraph& h : rep.graphs) {
        rep.acyclic.push_back(is_acyclic(h));
        all_acyclic = all_acyclic && rep.acyclic.back();
    }
    rep.q = q_matrix(rep.graphs, m, variant);
    rep.rank = matrix_rank(rep.q.matrix);
    rep.required_rank = 2 * m - 1;
    rep.vertex = all_acyclic && rep.rank == rep.required_rank;
    rep.text = render_certificate(p, rep, variant);
    return rep;
}

}  // namespace

VertexCriterionReport dipole_is_vertex(const GraphDistribution& p) {
    if (!is_dipole(p.scenario())) {
        throw std::invalid_argument("dipole vertex test: scenario is not a dipole");
    }
    return criterion_report(p, QVariant::Plain);
}

VertexCriterionReport rose_is_vertex(const GraphDistribution& p) {
    if (!is_rose(p.scenario())) {
        throw std::invalid_argument("rose vertex test: scenario is not a rose");
    }
    return criterion_report(p, QVariant::Tilde);
}

}  // namespace gdp
