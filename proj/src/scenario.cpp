#include "gdp/scenario.hpp"

#include <algorithm>
#include <set>

namespace gdp {

namespace {

// A node incidence: which edge touches the node, and in which role.
// Source incidences read marginals from row sums, target incidences from
// column sums. A self-loop contributes one of each.
struct Incidence {
    std::size_t edge;
    bool as_source;
};

std::vector<std::vector<Incidence>> incidences(const Scenario& S) {
    std::vector<std::vector<Incidence>> by_node(S.nodes().size());
    for (std::size_t e = 0; e < S.edges().size(); ++e) {
        by_node[S.node_index(S.edges()[e].source)].push_back({e, true});
        by_node[S.node_index(S.edges()[e].target)].push_back({e, false});
    }
    return by_node;
}

RationalVector marginal(const RationalMatrix& p, bool from_rows) {
    const Index m = p.rows();
    RationalVector v(m);
    for (Index a = 0; a < m; ++a) {
        Rational s = 0;
        for (Index b = 0; b < m; ++b) s += from_rows ? p(a, b) : p(b, a);
        v(a) = s;
    }
    return v;
}

}  // namespace

Scenario::Scenario(std::vector<std::string> nodes, std::vector<Edge> edges, int outcomes)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), m_(outcomes) {
    if (m_ < 2) {
        throw std::invalid_argument("scenario: outcome count must be at least 2");
    }
    std::set<std::string> seen;
    for (const std::string& v : nodes_) {
        if (!seen.insert(v).second) {
            throw std::invalid_argument("scenario: duplicate node id '" + v + "'");
        }
    }
    std::set<std::string> edge_ids;
    for (const Edge& e : edges_) {
        if (!edge_ids.insert(e.id).second) {
            throw std::invalid_argument("scenario: duplicate edge id '" + e.id + "'");
        }
        if (!seen.count(e.source)) {
            throw std::invalid_argument("scenario: edge '" + e.id + "' has unknown source '" +
                                        e.source + "'");
        }
        if (!seen.count(e.target)) {
            throw std::invalid_argument("scenario: edge '" + e.id + "' has unknown target '" +
                                        e.target + "'");
        }
    }
}

std::size_t Scenario::node_index(const std::string& id) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i] == id) return i;
    }
    throw std::invalid_argument("scenario: unknown node '" + id + "'");
}

std::size_t Scenario::edge_index(const std::string& id) const {
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        if (edges_[i].id == id) return i;
    }
    throw std::invalid_argument("scenario: unknown edge '" + id + "'");
}

bool Scenario::node_is_isolated(const std::string& id) const {
    node_index(id);  // existence check
    for (const Edge& e : edges_) {
        if (e.source == id || e.target == id) return false;
    }
    return true;
}

Scenario rose_scenario(int loops, int outcomes) {
    if (loops < 1) throw std::invalid_argument("rose_scenario: need at least one loop");
    std::vector<Edge> edges;
    for (int i = 1; i <= loops; ++i) edges.push_back({"s" + std::to_string(i), "v", "v"});
    return {{"v"}, std::move(edges), outcomes};
}

Scenario dipole_scenario(int edges, int outcomes) {
    if (edges < 1) throw std::invalid_argument("dipole_scenario: need at least one edge");
    std::vector<Edge> es;
    for (int i = 1; i <= edges; ++i) es.push_back({"t" + std::to_string(i), "v1", "v2"});
    return {{"v1", "v2"}, std::move(es), outcomes};
}

Scenario cycle_scenario(int length, int outcomes) {
    if (length < 1) throw std::invalid_argument("cycle_scenario: need at least one edge");
    std::vector<std::string> nodes;
    std::vector<Edge> edges;
    for (int i = 1; i <= length; ++i) nodes.push_back("v" + std::to_string(i));
    for (int i = 1; i <= length; ++i) {
        const int next = i == length ? 1 : i + 1;
        edges.push_back({"s" + std::to_string(i), "v" + std::to_string(i),
                         "v" + std::to_string(next)});
    }
    return {std::move(nodes), std::move(edges), outcomes};
}

Scenario complete_bipartite_scenario(int left, int right, int outcomes) {
    if (left < 1 || right < 1) {
        throw std::invalid_argument("complete_bipartite_scenario: sides must be nonempty");
    }
    std::vector<std::string> nodes;
    std::vector<Edge> edges;
    for (int i = 1; i <= left; ++i) nodes.push_back("x" + std::to_string(i));
    for (int j = 1; j <= right; ++j) nodes.push_back("y" + std::to_string(j));
    for (int i = 1; i <= left; ++i) {
        for (int j = 1; j <= right; ++j) {
            edges.push_back({"x" + std::to_string(i) + "y" + std::to_string(j),
                             "x" + std::to_string(i), "y" + std::to_string(j)});
        }
    }
    return {std::move(nodes), std::move(edges), outcomes};
}

GraphDistribution::GraphDistribution(Scenario scenario, std::vector<RationalMatrix> edge_matrices,
                                     std::map<std::string, RationalVector> isolated_node_vectors)
    : scenario_(std::move(scenario)), matrices_(std::move(edge_matrices)) {
    const Index m = scenario_.outcomes();
    if (matrices_.size() != scenario_.edges().size()) {
        throw std::invalid_argument("distribution: there must be one matrix per edge");
    }
    for (std::size_t e = 0; e < matrices_.size(); ++e) {
        const RationalMatrix& p = matrices_[e];
        if (p.rows() != m || p.cols() != m) {
            throw std::invalid_argument("distribution: matrix of edge '" + scenario_.edges()[e].id +
                                        "' is not " + std::to_string(m) + "x" + std::to_string(m));
        }
        Rational total = 0;
        for (Index a = 0; a < m; ++a) {
            for (Index b = 0; b < m; ++b) {
                if (p(a, b) < 0) {
                    throw std::invalid_argument("distribution: negative entry on edge '" +
                                                scenario_.edges()[e].id + "'");
                }
                total += p(a, b);
            }
        }
        if (total != 1) {
            throw std::invalid_argument("distribution: entries of edge '" +
                                        scenario_.edges()[e].id + "' do not sum to 1");
        }
    }

    const auto by_node = incidences(scenario_);
    node_vectors_.resize(scenario_.nodes().size());
    for (std::size_t v = 0; v < by_node.size(); ++v) {
        const std::string& id = scenario_.nodes()[v];
        if (by_node[v].empty()) {
            const auto it = isolated_node_vectors.find(id);
            if (it == isolated_node_vectors.end()) {
                throw std::invalid_argument("distribution: isolated node '" + id +
                                            "' needs an explicit vector");
            }
            const RationalVector& q = it->second;
            if (q.size() != m) {
                throw std::invalid_argument("distribution: vector of node '" + id +
                                            "' has wrong length");
            }
            Rational total = 0;
            for (Index a = 0; a < m; ++a) {
                if (q(a) < 0) {
                    throw std::invalid_argument("distribution: negative entry at node '" + id + "'");
                }
                total += q(a);
            }
            if (total != 1) {
                throw std::invalid_argument("distribution: vector of node '" + id +
                                            "' does not sum to 1");
            }
            node_vectors_[v] = q;
            isolated_node_vectors.erase(it);
            continue;
        }
        const Incidence& anchor = by_node[v][0];
        node_vectors_[v] = marginal(matrices_[anchor.edge], anchor.as_source);
        for (std::size_t k = 1; k < by_node[v].size(); ++k) {
            const Incidence& inc = by_node[v][k];
            const RationalVector other = marginal(matrices_[inc.edge], inc.as_source);
            for (Index a = 0; a < m; ++a) {
                if (other(a) != node_vectors_[v](a)) {
                    throw std::invalid_argument(
                        "distribution: marginals disagree at node '" + id + "' between edges '" +
                        scenario_.edges()[anchor.edge].id + "' and '" +
                        scenario_.edges()[inc.edge].id + "'");
                }
            }
        }
    }
    if (!isolated_node_vectors.empty()) {
        throw std::invalid_argument("distribution: explicit vector given for non-isolated node '" +
                                    isolated_node_vectors.begin()->first + "'");
    }
}

const RationalMatrix& GraphDistribution::edge_matrix(const std::string& id) const {
    return matrices_[scenario_.edge_index(id)];
}

const RationalVector& GraphDistribution::node_vector(const std::string& id) const {
    return node_vectors_[scenario_.node_index(id)];
}

bool GraphDistribution::is_deterministic() const {
    for (const RationalMatrix& p : matrices_) {
        for (Index a = 0; a < p.rows(); ++a) {
            for (Index b = 0; b < p.cols(); ++b) {
                if (p(a, b) != 0 && p(a, b) != 1) return false;
            }
        }
    }
    for (const RationalVector& q : node_vectors_) {
        for (Index a = 0; a < q.size(); ++a) {
            if (q(a) != 0 && q(a) != 1) return false;
        }
    }
    return true;
}

bool GraphDistribution::operator==(const GraphDistribution& other) const {
    if (!(scenario_ == other.scenario_)) return false;
    for (std::size_t e = 0; e < matrices_.size(); ++e) {
        const RationalMatrix& a = matrices_[e];
        const RationalMatrix& b = other.matrices_[e];
        for (Index i = 0; i < a.rows(); ++i) {
            for (Index j = 0; j < a.cols(); ++j) {
                if (a(i, j) != b(i, j)) return false;
            }
        }
    }
    for (std::size_t v = 0; v < node_vectors_.size(); ++v) {
        for (Index a = 0; a < node_vectors_[v].size(); ++a) {
            if (node_vectors_[v](a) != other.node_vectors_[v](a)) return false;
        }
    }
    return true;
}

StandardFormPolytope build_polytope(const Scenario& S) {
    if (S.edges().empty()) {
        throw std::invalid_argument("build_polytope: scenario has no edges");
    }
    const Index m = S.outcomes();
    const Index per_edge = m * m;
    const Index n = static_cast<Index>(S.edges().size()) * per_edge;
    const auto var = [&](std::size_t e, Index a, Index b) {
        return static_cast<Index>(e) * per_edge + a * m + b;
    };

    const auto by_node = incidences(S);
    Index rows = static_cast<Index>(S.edges().size());
    for (const auto& incs : by_node) {
        if (incs.size() > 1) rows += static_cast<Index>(incs.size() - 1) * m;
    }

    RationalMatrix A = RationalMatrix::Zero(rows, n);
    RationalVector b = RationalVector::Zero(rows);
    Index r = 0;
    for (std::size_t e = 0; e < S.edges().size(); ++e, ++r) {
        for (Index a = 0; a < m; ++a) {
            for (Index bb = 0; bb < m; ++bb) A(r, var(e, a, bb)) = 1;
        }
        b(r) = 1;
    }
    // marginal agreement: every later incidence at a node matches the first
    for (const auto& incs : by_node) {
        for (std::size_t k = 1; k < incs.size(); ++k) {
            for (Index a = 0; a < m; ++a, ++r) {
                for (Index bb = 0; bb < m; ++bb) {
                    const Index plus = incs[k].as_source ? var(incs[k].edge, a, bb)
                                                         : var(incs[k].edge, bb, a);
                    A(r, plus) += 1;
                    const Index minus = incs[0].as_source ? var(incs[0].edge, a, bb)
                                                          : var(incs[0].edge, bb, a);
                    A(r, minus) -= 1;
                }
            }
        }
    }

    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(n));
    for (const Edge& e : S.edges()) {
        for (Index a = 0; a < m; ++a) {
            for (Index bb = 0; bb < m; ++bb) {
                labels.push_back(e.id + "[" + std::to_string(a) + "," + std::to_string(bb) + "]");
            }
        }
    }
    return {A, b, labels};
}

Point flatten(const GraphDistribution& p) {
    const Scenario& S = p.scenario();
    for (const std::string& v : S.nodes()) {
        if (S.node_is_isolated(v)) {
            throw std::invalid_argument("flatten: scenario has isolated node '" + v + "'");
        }
    }
    const Index m = S.outcomes();
    Point x(static_cast<Index>(S.edges().size()) * m * m);
    Index at = 0;
    for (const RationalMatrix& mat : p.edge_matrices()) {
        for (Index a = 0; a < m; ++a) {
            for (Index b = 0; b < m; ++b) x(at++) = mat(a, b);
        }
    }
    return x;
}

GraphDistribution unflatten(const Scenario& S, const Point& x) {
    const Index m = S.outcomes();
    if (x.size() != static_cast<Index>(S.edges().size()) * m * m) {
        throw std::invalid_argument("unflatten: wrong coordinate count");
    }
    for (const std::string& v : S.nodes()) {
        if (S.node_is_isolated(v)) {
            throw std::invalid_argument("unflatten: scenario has isolated node '" + v + "'");
        }
    }
    std::vector<RationalMatrix> mats;
    Index at = 0;
    for (std::size_t e = 0; e < S.edges().size(); ++e) {
        RationalMatrix p(m, m);
        for (Index a = 0; a < m; ++a) {
            for (Index b = 0; b < m; ++b) p(a, b) = x(at++);
        }
        mats.push_back(std::move(p));
    }
    return {S, std::move(mats)};
}

std::vector<GraphDistribution> deterministic_distributions(const Scenario& S) {
    const int m = S.outcomes();
    const std::size_t nodes = S.nodes().size();
    std::vector<GraphDistribution> out;
    std::vector<int> f(nodes, 0);
    while (true) {
        std::vector<RationalMatrix> mats;
        mats.reserve(S.edges().size());
        for (const Edge& e : S.edges()) {
            RationalMatrix p = RationalMatrix::Zero(m, m);
            p(f[S.node_index(e.source)], f[S.node_index(e.target)]) = 1;
            mats.push_back(std::move(p));
        }
        std::map<std::string, RationalVector> isolated;
        for (std::size_t v = 0; v < nodes; ++v) {
            if (S.node_is_isolated(S.nodes()[v])) {
                RationalVector q = RationalVector::Zero(m);
                q(f[v]) = 1;
                isolated[S.nodes()[v]] = std::move(q);
            }
        }
        out.emplace_back(S, std::move(mats), std::move(isolated));
        // next assignment, last node varies fastest
        std::size_t i = nodes;
        while (i > 0 && f[i - 1] == m - 1) {
            f[i - 1] = 0;
            --i;
        }
        if (i == 0) break;
        ++f[i - 1];
    }
    return out;
}

GraphDistribution cycle_distribution(const CyclePerm& mu, int outcomes) {
    const int k = static_cast<int>(mu.size());
    if (k < 1 || k > outcomes) {
        throw std::invalid_argument("cycle_distribution: length must be between 1 and m");
    }
    std::set<int> seen;
    for (int i : mu) {
        if (i < 0 || i >= outcomes) {
            throw std::invalid_argument("cycle_distribution: outcome out of range");
        }
        if (!seen.insert(i).second) {
            throw std::invalid_argument("cycle_distribution: repeated outcome");
        }
    }
    RationalMatrix p = RationalMatrix::Zero(outcomes, outcomes);
    for (int j = 0; j < k; ++j) {
        p(mu[static_cast<std::size_t>(j)], mu[static_cast<std::size_t>((j + 1) % k)]) =
            Rational(1) / k;
    }
    return {rose_scenario(1, outcomes), {std::move(p)}};
}

std::vector<CyclePerm> all_cycle_perms(int outcomes) {
    std::vector<CyclePerm> out;
    for (int k = 1; k <= outcomes; ++k) {
        // k-subsets in lexicographic order, smallest element pinned first,
        // remaining elements permuted
        std::vector<int> subset(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) subset[static_cast<std::size_t>(i)] = i;
        while (true) {
            std::vector<int> rest(subset.begin() + 1, subset.end());
            std::sort(rest.begin(), rest.end());
            do {
                CyclePerm mu;
                mu.push_back(subset[0]);
                mu.insert(mu.end(), rest.begin(), rest.end());
                out.push_back(std::move(mu));
            } while (std::next_permutation(rest.begin(), rest.end()));
            int i = k;
            while (i > 0 && subset[static_cast<std::size_t>(i - 1)] == outcomes - k + i - 1) --i;
            if (i == 0) break;
            ++subset[static_cast<std::size_t>(i - 1)];
            for (int j = i; j < k; ++j) {
                subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
            }
        }
    }
    return out;
}

Point embed_distribution(const GraphDistribution& q) {
    const Scenario& S = q.scenario();
    const Index m = S.outcomes();
    Index dim = static_cast<Index>(S.edges().size()) * m * m;
    for (const std::string& v : S.nodes()) {
        if (S.node_is_isolated(v)) dim += m;
    }
    RationalVector x(dim);
    Index at = 0;
    for (const RationalMatrix& mat : q.edge_matrices()) {
        for (Index a = 0; a < m; ++a) {
            for (Index b = 0; b < m; ++b) x(at++) = mat(a, b);
        }
    }
    for (const std::string& v : S.nodes()) {
        if (S.node_is_isolated(v)) {
            x.segment(at, m) = q.node_vector(v);
            at += m;
        }
    }
    return x;
}

bool is_contextual(const Scenario& S, const GraphDistribution& p) {
    if (!(p.scenario() == S)) {
        throw std::invalid_argument("is_contextual: distribution belongs to a different scenario");
    }
    Rational count = 1;
    for (std::size_t i = 0; i < S.nodes().size(); ++i) {
        count *= S.outcomes();
        if (count > 1'000'000) {
            throw BudgetExceeded("is_contextual: more than 10^6 deterministic columns");
        }
    }

    const auto dets = deterministic_distributions(S);
    const Point target = embed_distribution(p);
    const Index dim = target.size();
    RationalMatrix A(dim + 1, static_cast<Index>(dets.size()));
    for (std::size_t j = 0; j < dets.size(); ++j) {
        A.col(static_cast<Index>(j)).head(dim) = embed_distribution(dets[j]);
        A(dim, static_cast<Index>(j)) = 1;
    }
    RationalVector rhs(dim + 1);
    rhs.head(dim) = target;
    rhs(dim) = 1;
    return !lp_feasible(A, rhs).feasible;
}

ContextualityWitness contextuality_witness(const Scenario& S, const GraphDistribution& p) {
    if (!(p.scenario() == S)) {
        throw std::invalid_argument(
            "contextuality witness: distribution belongs to a different scenario");
    }
    Rational count = 1;
    for (std::size_t i = 0; i < S.nodes().size(); ++i) {
        count *= S.outcomes();
        if (count > 5000) {
            throw BudgetExceeded("contextuality witness: more than 5000 outcome assignments");
        }
    }

    const auto dets = deterministic_distributions(S);
    const Point target = embed_distribution(p);
    const Index dim = target.size();
    const Index terms = static_cast<Index>(dets.size());

    RationalMatrix A(dim + 1, terms);
    for (Index j = 0; j < terms; ++j) {
        A.col(j).head(dim) = embed_distribution(dets[static_cast<std::size_t>(j)]);
        A(dim, j) = 1;
    }
    RationalVector rhs(dim + 1);
    rhs.head(dim) = target;
    rhs(dim) = 1;

    ContextualityWitness w;
    const LpFeasibility primal = lp_feasible(A, rhs);
    if (primal.feasible) {
        for (Index j = 0; j < terms; ++j) {
            if (primal.witness(j) == 0) continue;
            ContextualityWitness::Term term;
            term.weight = primal.witness(j);
            const GraphDistribution& q = dets[static_cast<std::size_t>(j)];
            for (const std::string& v : S.nodes()) {
                const RationalVector& e = q.node_vector(v);
                for (Index a = 0; a < e.size(); ++a) {
                    if (e(a) == 1) term.assignment[v] = static_cast<int>(a);
                }
            }
            w.decomposition.push_back(std::move(term));
        }
        return w;
    }

    // Separation: some y has A^T y <= 0 on every assignment column while
    // rhs^T y = 1. Split y into a positive difference and slack the
    // inequalities to reach standard form.
    w.contextual = true;
    const Index y_dim = dim + 1;
    RationalMatrix B = RationalMatrix::Zero(terms + 1, 2 * y_dim + terms);
    for (Index r = 0; r < terms; ++r) {
        for (Index i = 0; i < y_dim; ++i) {
            B(r, i) = A(i, r);
            B(r, y_dim + i) = -A(i, r);
        }
        B(r, 2 * y_dim + r) = 1;
    }
    for (Index i = 0; i < y_dim; ++i) {
        B(terms, i) = rhs(i);
        B(terms, y_dim + i) = -rhs(i);
    }
    RationalVector goal = RationalVector::Zero(terms + 1);
    goal(terms) = 1;
    const LpFeasibility dual = lp_feasible(B, goal);
    if (!dual.feasible) {
        throw std::logic_error("contextuality witness: no separating functional found");
    }
    w.functional = RationalVector(dim);
    for (Index i = 0; i < dim; ++i) w.functional(i) = dual.witness(i) - dual.witness(y_dim + i);
    w.threshold = -(dual.witness(dim) - dual.witness(y_dim + dim));
    return w;
}

GraphDistribution restrict_distribution(const GraphDistribution& p, const Scenario& subgraph) {
    const Scenario& S = p.scenario();
    if (subgraph.outcomes() != S.outcomes()) {
        throw std::invalid_argument("restrict: outcome counts differ");
    }
    for (const std::string& v : subgraph.nodes()) {
        S.node_index(v);  // throws on unknown node
    }
    std::vector<RationalMatrix> mats;
    for (const Edge& e : subgraph.edges()) {
        const Edge& orig = S.edges()[S.edge_index(e.id)];
        if (!(orig == e)) {
            throw std::invalid_argument("restrict: edge '" + e.id +
                                        "' differs from its original");
        }
        mats.push_back(p.edge_matrix(e.id));
    }
    std::map<std::string, RationalVector> isolated;
    for (const std::string& v : subgraph.nodes()) {
        if (subgraph.node_is_isolated(v)) isolated[v] = p.node_vector(v);
    }
    return {subgraph, std::move(mats), std::move(isolated)};
}

}  // namespace gdp
