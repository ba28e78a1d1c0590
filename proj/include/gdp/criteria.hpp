#pragma once

#include "gdp/polytope.hpp"
#include "gdp/scenario.hpp"

#include <string>
#include <utility>
#include <vector>

namespace gdp {

// Vertex of a product of outcome simplices: one outcome per block. Expands to
// the 0/1 indicator vector with a one at position block*m + outcome.
struct ProductSimplexVertex {
    std::vector<int> block_outcomes;
    int outcomes = 0;

    Point expand() const;

    friend auto operator<=>(const ProductSimplexVertex&, const ProductSimplexVertex&) = default;
};

// Which outcome pairs occur in a two-block set, drawn as a bipartite graph:
// left vertices u_a for the first block, right vertices w_b for the second,
// one edge per occurring pair.
struct SupportBipartiteGraph {
    int outcomes = 0;
    std::vector<std::pair<int, int>> edges;  // (a, b), sorted, no duplicates

    bool operator==(const SupportBipartiteGraph&) const = default;
};

// Support graph of a set of two-block product-simplex vertices. Rejects
// blocks counts other than two and inconsistent outcome counts.
SupportBipartiteGraph support_graph(const std::vector<ProductSimplexVertex>& set);

// No cycle through the edge set. Equivalent to affine independence of any
// two-block set the graph supports.
bool is_acyclic(const SupportBipartiteGraph& h);

// One node whose edges are all self-loops, at least one edge.
bool is_rose(const Scenario& S);
// Two distinct nodes with every edge running from the same source to the
// same target, at least one edge.
bool is_dipole(const Scenario& S);

// One set per edge of a rose or dipole distribution: the outcome pairs with
// nonzero probability, as two-block indicator vertices in row-major order.
std::vector<std::vector<ProductSimplexVertex>> a_sets(const GraphDistribution& p);

enum class QVariant { Plain, Tilde };

struct QRow {
    int graph = -1;          // originating graph index, -1 for anchor rows
    std::vector<int> left;   // u-labels in the component
    std::vector<int> right;  // w-labels in the component
};

// Component balance matrix of a family of support graphs over the full label
// sets {u_0..u_{m-1}} and {w_0..w_{m-1}}: one row per connected component
// of each graph, +1 on the u-columns of its members, -1 on the w-columns.
// Labels untouched by a graph form singleton components and contribute unit
// rows. Components are emitted graph by graph in input order and inside a
// graph sorted by smallest member, keyed a for u_a and m+b for w_b. The
// Tilde variant appends the anchor rows e_a - e_{m+a} for every label a.
struct QMatrix {
    RationalMatrix matrix;
    std::vector<QRow> rows;
};

QMatrix q_matrix(const std::vector<SupportBipartiteGraph>& graphs, int outcomes, QVariant variant);

struct VertexCriterionReport {
    bool vertex = false;
    std::vector<SupportBipartiteGraph> graphs;  // per edge supports
    std::vector<bool> acyclic;                  // per edge
    QMatrix q;
    Index rank = 0;
    Index required_rank = 0;  // 2m - 1
    std::string text;         // printable certificate
};

// Exact vertex test for dipole distributions: every support graph acyclic and
// the Plain balance matrix of full rank 2m-1. Throws std::invalid_argument
// when the scenario is not a dipole.
VertexCriterionReport dipole_is_vertex(const GraphDistribution& p);

// Same test for rose distributions with the Tilde balance matrix.
VertexCriterionReport rose_is_vertex(const GraphDistribution& p);

struct FiberCheck {
    bool vertex = false;                     // sufficient condition met
    std::vector<std::size_t> carrier_sizes;  // vertices of each part's carrier face
    std::vector<std::size_t> image_sizes;    // distinct glue restrictions of those
    std::vector<bool> injective;             // restriction to the glue is injective
    std::vector<bool> independent;           // glue images affinely independent
    HullIntersection intersection;           // of the glue image hulls
    std::string text;
};

// Sufficient vertex test for a distribution assembled from parts overlapping
// exactly in the glue subgraph: collect the carrier-face vertices of every
// part, restrict them to the glue, and demand injective restriction, affine
// independence, and a unique hull intersection. A negative answer leaves
// vertexhood undecided. The parts must agree on the glue; every node of a
// part must lie on one of its edges.
FiberCheck fiber_sufficient_vertex(const Scenario& glue,
                                   const std::vector<GraphDistribution>& parts,
                                   const EnumOptions& opts = {});

// Same check with the parts cut out of one distribution on the whole graph.
FiberCheck fiber_sufficient_vertex(const GraphDistribution& p, const Scenario& glue,
                                   const std::vector<Scenario>& parts,
                                   const EnumOptions& opts = {});

struct ConverseReport {
    bool all_hold = false;
    std::vector<bool> carrier_independent;  // per part
    std::vector<std::string> violations;
    HullIntersection intersection;
    std::string text;
};

// Conditions every vertex assembled over a glue satisfies: parts whose
// carrier vertices are affinely independent restrict injectively to affinely
// independent glue images; the glue image hulls meet in exactly one point;
// over every independent image set that point has unique, everywhere nonzero
// coefficients. Throws std::invalid_argument when p is not a vertex.
ConverseReport converse_checks(const GraphDistribution& p, const Scenario& glue,
                               const std::vector<Scenario>& parts,
                               const EnumOptions& opts = {});

struct ConstructionInput {
    // Dipole and complete bipartite: one set per edge resp. target node.
    std::vector<std::vector<ProductSimplexVertex>> sets;
    // Complete bipartite only: target outcome per set element, injective.
    std::vector<std::vector<int>> outcome_maps;
    // Rose only: cycle supports per loop.
    std::vector<std::vector<CyclePerm>> lifts;
};

// Builds the distribution determined by the given supports and verifies it is
// a vertex. Dipoles take two-block sets; roses take cycle lifts whose average
// points must pick up the loop marginals bijectively and generate the face of
// their mixture; complete bipartite graphs take sets over the source blocks
// plus injective outcome maps. Throws std::invalid_argument when a condition
// fails: affine dependence, empty or non-unique hull intersection, a zero
// coefficient, an oversized set, a non-injective map, or a lift whose mixture
// leaves the spanned face.
GraphDistribution construct_vertex_from_a_sets(const Scenario& S, const ConstructionInput& input);

// All vertices of the n-edge dipole family with m outcomes, in lexicographic
// flatten order. Searches edge supports directly: per edge a covering forest
// over the marginal support labels, the stacked balance rows of kernel
// dimension one, the kernel vector strictly positive, and every forest
// expressing it with positive coefficients. The budget caps visited support
// combinations; exceeding it raises BudgetExceeded.
std::vector<GraphDistribution> enumerate_dipole_vertices(int n, int m,
                                                         long long budget = 50'000'000);

// Rose counterpart; the two marginal supports coincide and the balance rows
// act on one label block.
std::vector<GraphDistribution> enumerate_rose_vertices(int n, int m,
                                                       long long budget = 50'000'000);

// Reads construction input, one `set` line per edge or per target node.
// Elements are outcome tuples "(a,b,...)", each optionally mapped to a target
// outcome as "(a,b)>t", or cycle supports "[c0,c1,...]" for rose lifts. The
// element kinds must not be mixed and '#' starts a comment. Throws ParseError
// with line and column on malformed input.
ConstructionInput parse_construction(std::istream& in, const Scenario& S);

}  // namespace gdp
