#include "gdp/collapse.hpp"

#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>

namespace gdp {

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
    while (parent[i] != i) {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    return i;
}

}  // namespace

CollapseMap collapse(const Scenario& S, const std::vector<std::string>& edge_ids) {
    std::set<std::string> chosen;
    for (const std::string& id : edge_ids) {
        S.edge_index(id);
        if (!chosen.insert(id).second)
            throw std::invalid_argument("collapse: duplicate edge '" + id + "'");
    }

    const auto& nodes = S.nodes();
    std::vector<std::size_t> parent(nodes.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    for (const Edge& e : S.edges()) {
        if (chosen.count(e.id) == 0) continue;
        std::size_t a = find_root(parent, S.node_index(e.source));
        std::size_t b = find_root(parent, S.node_index(e.target));
        if (a == b)
            throw std::invalid_argument("collapse: edge '" + e.id +
                                        "' closes a cycle among the chosen edges");
        if (a < b)
            parent[b] = a;
        else
            parent[a] = b;
    }

    std::vector<std::string> quotient_nodes;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (find_root(parent, i) == i) quotient_nodes.push_back(nodes[i]);
    std::map<std::string, std::string> node_projection;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        node_projection[nodes[i]] = nodes[find_root(parent, i)];

    std::vector<Edge> quotient_edges;
    std::map<std::string, std::string> edge_projection;
    for (const Edge& e : S.edges()) {
        if (chosen.count(e.id) != 0) continue;
        quotient_edges.push_back(
            Edge{e.id, node_projection.at(e.source), node_projection.at(e.target)});
        edge_projection[e.id] = e.id;
    }

    return CollapseMap{S,
                       std::vector<std::string>(chosen.begin(), chosen.end()),
                       Scenario(std::move(quotient_nodes), std::move(quotient_edges), S.outcomes()),
                       std::move(node_projection),
                       std::move(edge_projection)};
}

GraphDistribution pullback(const CollapseMap& cm, const GraphDistribution& p) {
    if (!(p.scenario() == cm.quotient))
        throw std::invalid_argument("pullback: the distribution does not live on the quotient");

    const std::set<std::string> chosen(cm.collapsed_edges.begin(), cm.collapsed_edges.end());
    const int m = cm.source.outcomes();
    std::vector<RationalMatrix> matrices;
    matrices.reserve(cm.source.edges().size());
    for (const Edge& e : cm.source.edges()) {
        if (chosen.count(e.id) != 0) {
            const RationalVector& w = p.node_vector(cm.node_projection.at(e.source));
            RationalMatrix diag = RationalMatrix::Zero(m, m);
            for (int i = 0; i < m; ++i) diag(i, i) = w(i);
            matrices.push_back(std::move(diag));
        } else {
            matrices.push_back(p.edge_matrix(e.id));
        }
    }
    return GraphDistribution(cm.source, std::move(matrices));
}

bool is_collapsed(const RationalMatrix& M) {
    for (Index i = 0; i < M.rows(); ++i)
        for (Index j = 0; j < M.cols(); ++j)
            if (i != j && M(i, j) != 0) return false;
    return true;
}

Int spanning_tree_count(const Scenario& S) {
    const auto& nodes = S.nodes();
    const std::size_t k = nodes.size();
    if (k == 0) throw std::invalid_argument("spanning tree count: empty node set");

    std::vector<std::size_t> parent(k);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    for (const Edge& e : S.edges()) {
        std::size_t a = find_root(parent, S.node_index(e.source));
        std::size_t b = find_root(parent, S.node_index(e.target));
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    for (std::size_t i = 0; i < k; ++i)
        if (find_root(parent, i) != 0)
            throw std::invalid_argument("spanning tree count: the graph is disconnected");

    if (k == 1) return 1;

    // Laplacian with the first row and column removed; parallel edges add
    // multiplicity and self-loops contribute nothing.
    std::vector<std::vector<Int>> minor(k - 1, std::vector<Int>(k - 1, 0));
    for (const Edge& e : S.edges()) {
        const std::size_t a = S.node_index(e.source);
        const std::size_t b = S.node_index(e.target);
        if (a == b) continue;
        if (a > 0) minor[a - 1][a - 1] += 1;
        if (b > 0) minor[b - 1][b - 1] += 1;
        if (a > 0 && b > 0) {
            minor[a - 1][b - 1] -= 1;
            minor[b - 1][a - 1] -= 1;
        }
    }
    return integer_determinant(std::move(minor));
}

}  // namespace gdp
