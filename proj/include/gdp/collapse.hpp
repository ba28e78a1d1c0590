#pragma once

#include "gdp/scenario.hpp"

#include <map>
#include <string>
#include <vector>

namespace gdp {

// Result of contracting a forest of edges: the quotient scenario together
// with the projections of nodes and surviving edges. Surviving edges keep
// their ids; a merged node class is named after its earliest member.
struct CollapseMap {
    Scenario source;
    std::vector<std::string> collapsed_edges;
    Scenario quotient;
    std::map<std::string, std::string> node_projection;
    std::map<std::string, std::string> edge_projection;
};

// Contracts the given edges. The set must be acyclic as an undirected edge
// set (collapsing a cycle's final edge would create a self-loop) and free of
// self-loops and duplicates; unknown edge ids are rejected.
CollapseMap collapse(const Scenario& S, const std::vector<std::string>& edge_ids);

// Lifts a distribution on the quotient back to the source: surviving edges
// copy their matrices, every collapsed edge receives the diagonal matrix of
// its image node's outcome vector. Preserves vertexhood, determinism, and
// contextuality in both directions.
GraphDistribution pullback(const CollapseMap& cm, const GraphDistribution& p);

// True when every off-diagonal entry vanishes.
bool is_collapsed(const RationalMatrix& M);

// Number of spanning trees, by an integer Laplacian cofactor determinant.
// Parallel edges count with multiplicity, self-loops are ignored, and a
// disconnected scenario is rejected.
Int spanning_tree_count(const Scenario& S);

}  // namespace gdp
