#pragma once

#include "gdp/polytope.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace gdp {

struct Edge {
    std::string id;
    std::string source;  // d1
    std::string target;  // d0
    bool operator==(const Edge&) const = default;
};

// A directed multigraph together with an outcome count m >= 2. Multi-edges
// and self-loops are permitted; edge endpoints must name declared nodes.
class Scenario {
  public:
    Scenario(std::vector<std::string> nodes, std::vector<Edge> edges, int outcomes);

    const std::vector<std::string>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    int outcomes() const { return m_; }

    std::size_t node_index(const std::string& id) const;
    std::size_t edge_index(const std::string& id) const;
    bool node_is_isolated(const std::string& id) const;

    bool operator==(const Scenario&) const = default;

  private:
    std::vector<std::string> nodes_;
    std::vector<Edge> edges_;
    int m_;
};

Scenario rose_scenario(int loops, int outcomes);              // one node, n self-loops
Scenario dipole_scenario(int edges, int outcomes);            // two nodes, n parallel edges
Scenario cycle_scenario(int length, int outcomes);            // directed n-cycle
Scenario complete_bipartite_scenario(int left, int right, int outcomes);

// An assignment of an m x m probability matrix to every edge, with row sums
// matching the source node's distribution and column sums the target's.
// Node distributions are derived; only isolated nodes carry explicit vectors.
class GraphDistribution {
  public:
    GraphDistribution(Scenario scenario, std::vector<RationalMatrix> edge_matrices,
                      std::map<std::string, RationalVector> isolated_node_vectors = {});

    const Scenario& scenario() const { return scenario_; }
    const std::vector<RationalMatrix>& edge_matrices() const { return matrices_; }
    const RationalMatrix& edge_matrix(const std::string& id) const;
    const RationalVector& node_vector(const std::string& id) const;

    bool is_deterministic() const;  // every entry 0 or 1

    bool operator==(const GraphDistribution& other) const;

  private:
    Scenario scenario_;
    std::vector<RationalMatrix> matrices_;
    std::vector<RationalVector> node_vectors_;  // aligned with scenario_.nodes()
};

// Dist(X,m) in standard form: one variable per edge entry p_sigma[a,b]
// (edge-major, row-major), per-edge normalization rows, and per-node marginal
// agreement rows pairing every incidence with the node's first incidence.
// Throws std::invalid_argument when the edge set is empty.
StandardFormPolytope build_polytope(const Scenario& S);

// Canonical coordinates of the edge matrices in build_polytope's variable
// order. Requires a scenario without isolated nodes in both directions.
Point flatten(const GraphDistribution& p);
GraphDistribution unflatten(const Scenario& S, const Point& x);

// Coordinates of a distribution including isolated nodes: all edge entries in
// edge order, then the vector of each isolated node in node order. Agrees with
// flatten when no node is isolated.
Point embed_distribution(const GraphDistribution& p);

// One distribution per outcome assignment f : nodes -> Z_m, in lexicographic
// order of the assignment digits; edge sigma gets the unit matrix
// E_{f(source), f(target)}.
std::vector<GraphDistribution> deterministic_distributions(const Scenario& S);

// Distinct outcomes [i_1, ..., i_k] of Z_m traversed cyclically.
using CyclePerm = std::vector<int>;

// Distribution on the single-loop scenario with entry 1/k at each
// (i_j, i_{j+1 mod k}); always a vertex of Dist(C1, m).
GraphDistribution cycle_distribution(const CyclePerm& mu, int outcomes);

// All cycle permutations for m outcomes: sum over k of C(m,k)(k-1)! of them,
// smallest member first in each, ordered by length then lexicographically.
std::vector<CyclePerm> all_cycle_perms(int outcomes);

// True iff p admits no convex decomposition into deterministic distributions
// (exact LP infeasibility). Refuses scenarios with more than 10^6 outcome
// assignments with BudgetExceeded.
bool is_contextual(const Scenario& S, const GraphDistribution& p);

// Re-checkable evidence for either contextuality verdict. A decomposable
// distribution carries convex weights over outcome assignments; a contextual
// one carries a linear functional over the embedded coordinates satisfying
// functional . q <= threshold on every deterministic q while
// functional . p = threshold + 1.
struct ContextualityWitness {
    bool contextual = false;
    struct Term {
        std::map<std::string, int> assignment;  // node id -> outcome
        Rational weight = 0;
    };
    std::vector<Term> decomposition;  // nonzero-weight terms only
    RationalVector functional;
    Rational threshold = 0;
};

// Computes the witness for p: the decomposition is the feasible point of the
// convex-combination program, the functional comes from an exact auxiliary
// program for the separation. Refuses more than 5000 outcome assignments
// with BudgetExceeded (the separation program has one row per assignment).
ContextualityWitness contextuality_witness(const Scenario& S, const GraphDistribution& p);

// Restriction along a subgraph inclusion: edge matrices and node vectors are
// copied; nodes isolated in the subgraph keep their derived vectors.
GraphDistribution restrict_distribution(const GraphDistribution& p, const Scenario& subgraph);

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(const std::string& message, int line, int column);
};

// Text formats. Scenario: `outcomes m`, then `node <id>` and
// `edge <id> <source> <target>` lines. Distribution: per edge a block
// `edge <id>` followed by m rows of m rationals; isolated nodes use
// `node <id>` followed by one row of m rationals. Whitespace-delimited,
// `#` starts a comment.
Scenario parse_scenario(std::istream& in);
GraphDistribution parse_distribution(std::istream& in, const Scenario& S);
std::string format_scenario(const Scenario& S);
std::string format_distribution(const GraphDistribution& p);

}  // namespace gdp
