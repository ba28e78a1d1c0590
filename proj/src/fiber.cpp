#include "gdp/criteria.hpp"

#include "gdp/linalg.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace gdp {

namespace {

std::string point_to_string(const Point& x) {
    std::string out = "(";
    for (Index i = 0; i < x.size(); ++i) {
        if (i) out += ", ";
        out += to_string(x(i));
    }
    return out + ")";
}

void require_covered_nodes(const Scenario& part, const char* where) {
    for (const std::string& v : part.nodes()) {
        if (part.node_is_isolated(v)) {
            throw std::invalid_argument(std::string(where) + ": part node '" + v +
                                        "' lies on no edge of its part");
        }
    }
}

// The glue must be a subgraph of every part and the parts must overlap
// pairwise in exactly the glue.
void require_glue_structure(const Scenario& glue, const std::vector<Scenario>& parts,
                            const char* where) {
    if (parts.empty()) {
        throw std::invalid_argument(std::string(where) + ": no parts given");
    }
    std::set<std::string> glue_nodes(glue.nodes().begin(), glue.nodes().end());
    std::set<std::string> glue_edges;
    for (const Edge& e : glue.edges()) glue_edges.insert(e.id);

    std::vector<std::set<std::string>> part_nodes, part_edges;
    for (const Scenario& part : parts) {
        if (part.outcomes() != glue.outcomes()) {
            throw std::invalid_argument(std::string(where) + ": outcome counts differ");
        }
        require_covered_nodes(part, where);
        part_nodes.emplace_back(part.nodes().begin(), part.nodes().end());
        std::set<std::string> ids;
        for (const Edge& e : part.edges()) ids.insert(e.id);
        part_edges.push_back(std::move(ids));
        for (const std::string& v : glue.nodes()) {
            if (!part_nodes.back().count(v)) {
                throw std::invalid_argument(std::string(where) + ": glue node '" + v +
                                            "' missing from a part");
            }
        }
        for (const Edge& e : glue.edges()) {
            if (!part_edges.back().count(e.id)) {
                throw std::invalid_argument(std::string(where) + ": glue edge '" + e.id +
                                            "' missing from a part");
            }
        }
    }
    for (std::size_t i = 0; i < parts.size(); ++i) {
        for (std::size_t j = i + 1; j < parts.size(); ++j) {
            for (const std::string& v : part_nodes[i]) {
                if (part_nodes[j].count(v) && !glue_nodes.count(v)) {
                    throw std::invalid_argument(std::string(where) + ": parts share node '" + v +
                                                "' outside the glue");
                }
            }
            for (const std::string& id : part_edges[i]) {
                if (part_edges[j].count(id) && !glue_edges.count(id)) {
                    throw std::invalid_argument(std::string(where) + ": parts share edge '" + id +
                                                "' outside the glue");
                }
            }
        }
    }
}

struct GlueImages {
    std::size_t carrier_size = 0;
    std::vector<Point> images;                   // distinct, in first-seen order
    std::vector<GraphDistribution> carrier;      // the carrier-face vertices
};

GlueImages glue_images(const GraphDistribution& part, const Scenario& glue,
                       const EnumOptions& opts) {
    GlueImages out;
    const StandardFormPolytope P = build_polytope(part.scenario());
    const std::vector<Point> verts = vsupp(P, flatten(part), opts);
    out.carrier_size = verts.size();
    for (const Point& v : verts) {
        GraphDistribution q = unflatten(part.scenario(), v);
        Point image = embed_distribution(restrict_distribution(q, glue));
        const bool seen = std::any_of(out.images.begin(), out.images.end(),
                                      [&](const Point& w) { return w == image; });
        if (!seen) out.images.push_back(std::move(image));
        out.carrier.push_back(std::move(q));
    }
    return out;
}

std::string render_fiber_text(const Scenario& glue, const FiberCheck& chk) {
    std::ostringstream out;
    out << "fiber check over glue with " << glue.nodes().size() << " node(s) and "
        << glue.edges().size() << " edge(s)\n";
    for (std::size_t i = 0; i < chk.carrier_sizes.size(); ++i) {
        out << "part " << i + 1 << ": carrier " << chk.carrier_sizes[i] << " vertices, "
            << chk.image_sizes[i] << " distinct glue images"
            << (chk.injective[i] ? "" : " (collision)")
            << (chk.independent[i] ? ", affinely independent" : ", affinely dependent") << "\n";
    }
    switch (chk.intersection.kind) {
        case HullIntersection::Kind::Empty:
            out << "glue image hulls: empty intersection\n";
            break;
        case HullIntersection::Kind::Unique:
            out << "glue image hulls: unique common point " << point_to_string(chk.intersection.point)
                << "\n";
            break;
        case HullIntersection::Kind::Multiple:
            out << "glue image hulls: intersection has more than one point\n";
            break;
    }
    out << "verdict: " << (chk.vertex ? "vertex" : "inconclusive") << "\n";
    return out.str();
}

// Unique affine coefficients of u over an affinely independent set.
std::optional<std::vector<Rational>> affine_coefficients(const std::vector<Point>& set,
                                                         const Point& u) {
    const Index dim = u.size();
    RationalMatrix M(dim + 1, static_cast<Index>(set.size()));
    for (std::size_t j = 0; j < set.size(); ++j) {
        M.col(static_cast<Index>(j)).head(dim) = set[j];
        M(dim, static_cast<Index>(j)) = 1;
    }
    RationalVector rhs(dim + 1);
    rhs.head(dim) = u;
    rhs(dim) = 1;
    const auto sol = solve_linear(M, rhs);
    if (!sol) return std::nullopt;
    std::vector<Rational> out;
    for (Index j = 0; j < sol->size(); ++j) out.push_back((*sol)(j));
    return out;
}

}  // namespace

FiberCheck fiber_sufficient_vertex(const Scenario& glue,
                                   const std::vector<GraphDistribution>& parts,
                                   const EnumOptions& opts) {
    std::vector<Scenario> part_scenarios;
    for (const GraphDistribution& q : parts) part_scenarios.push_back(q.scenario());
    require_glue_structure(glue, part_scenarios, "fiber check");

    std::optional<GraphDistribution> shared;
    for (const GraphDistribution& q : parts) {
        GraphDistribution r = restrict_distribution(q, glue);
        if (!shared) {
            shared = std::move(r);
        } else if (!(*shared == r)) {
            throw std::invalid_argument("fiber check: parts disagree on the glue");
        }
    }

    FiberCheck chk;
    std::vector<std::vector<Point>> image_sets;
    for (const GraphDistribution& q : parts) {
        GlueImages gi = glue_images(q, glue, opts);
        chk.carrier_sizes.push_back(gi.carrier_size);
        chk.image_sizes.push_back(gi.images.size());
        chk.injective.push_back(gi.images.size() == gi.carrier_size);
        chk.independent.push_back(affinely_independent(gi.images));
        image_sets.push_back(std::move(gi.images));
    }
    chk.intersection = hull_intersection_unique(image_sets);
    chk.vertex = chk.intersection.kind == HullIntersection::Kind::Unique &&
                 std::all_of(chk.injective.begin(), chk.injective.end(), [](bool b) { return b; }) &&
                 std::all_of(chk.independent.begin(), chk.independent.end(),
                             [](bool b) { return b; });
    chk.text = render_fiber_text(glue, chk);
    return chk;
}

FiberCheck fiber_sufficient_vertex(const GraphDistribution& p, const Scenario& glue,
                                   const std::vector<Scenario>& parts, const EnumOptions& opts) {
    // The parts must assemble to the whole scenario.
    std::set<std::string> covered_nodes, covered_edges;
    for (const Scenario& part : parts) {
        covered_nodes.insert(part.nodes().begin(), part.nodes().end());
        for (const Edge& e : part.edges()) covered_edges.insert(e.id);
    }
    const Scenario& S = p.scenario();
    if (covered_nodes.size() != S.nodes().size() || covered_edges.size() != S.edges().size()) {
        throw std::invalid_argument("fiber check: parts do not cover the scenario");
    }
    std::vector<GraphDistribution> cut;
    for (const Scenario& part : parts) cut.push_back(restrict_distribution(p, part));
    return fiber_sufficient_vertex(glue, cut, opts);
}

ConverseReport converse_checks(const GraphDistribution& p, const Scenario& glue,
                               const std::vector<Scenario>& parts, const EnumOptions& opts) {
    require_glue_structure(glue, parts, "converse checks");
    const Scenario& S = p.scenario();
    if (!is_vertex(build_polytope(S), flatten(p))) {
        throw std::invalid_argument("converse checks: the distribution is not a vertex");
    }

    ConverseReport rep;
    const Point u = embed_distribution(restrict_distribution(p, glue));
    std::vector<std::vector<Point>> image_sets;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        GraphDistribution q = restrict_distribution(p, parts[i]);
        GlueImages gi = glue_images(q, glue, opts);
        std::vector<Point> carrier_points;
        for (const GraphDistribution& c : gi.carrier) carrier_points.push_back(flatten(c));
        const bool indep_carrier = affinely_independent(carrier_points);
        rep.carrier_independent.push_back(indep_carrier);
        if (indep_carrier) {
            if (gi.images.size() != gi.carrier_size) {
                rep.violations.push_back("part " + std::to_string(i + 1) +
                                         ": independent carrier restricts non-injectively");
            }
            if (!affinely_independent(gi.images)) {
                rep.violations.push_back("part " + std::to_string(i + 1) +
                                         ": glue images of an independent carrier are dependent");
            }
        }
        image_sets.push_back(std::move(gi.images));
    }

    rep.intersection = hull_intersection_unique(image_sets);
    if (rep.intersection.kind != HullIntersection::Kind::Unique) {
        rep.violations.push_back("glue image hulls do not meet in exactly one point");
    } else if (!(rep.intersection.point == u)) {
        rep.violations.push_back("common point differs from the glue restriction");
    }

    for (std::size_t i = 0; i < image_sets.size(); ++i) {
        if (!affinely_independent(image_sets[i])) continue;
        const auto coeffs = affine_coefficients(image_sets[i], u);
        if (!coeffs) {
            rep.violations.push_back("part " + std::to_string(i + 1) +
                                     ": glue restriction escapes the image hull");
            continue;
        }
        for (const Rational& c : *coeffs) {
            if (c <= 0) {
                rep.violations.push_back("part " + std::to_string(i + 1) +
                                         ": a hull coefficient is not strictly positive");
                break;
            }
        }
    }

    rep.all_hold = rep.violations.empty();
    std::ostringstream out;
    out << "converse checks over " << parts.size() << " part(s)\n";
    for (std::size_t i = 0; i < rep.carrier_independent.size(); ++i) {
        out << "part " << i + 1 << ": carrier "
            << (rep.carrier_independent[i] ? "affinely independent" : "affinely dependent") << "\n";
    }
    if (rep.intersection.kind == HullIntersection::Kind::Unique) {
        out << "common point " << point_to_string(rep.intersection.point) << "\n";
    }
    for (const std::string& v : rep.violations) out << "violation: " << v << "\n";
    out << (rep.all_hold ? "all conditions hold\n" : "some condition fails\n");
    rep.text = out.str();
    return rep;
}

namespace {

struct BipartiteShape {
    std::vector<std::string> sources;  // in scenario node order
    std::vector<std::string> targets;
    std::map<std::pair<std::string, std::string>, std::size_t> edge_at;
};

std::optional<BipartiteShape> complete_bipartite_shape(const Scenario& S) {
    if (S.edges().empty()) return std::nullopt;
    std::set<std::string> sources, targets;
    BipartiteShape shape;
    for (std::size_t i = 0; i < S.edges().size(); ++i) {
        const Edge& e = S.edges()[i];
        sources.insert(e.source);
        targets.insert(e.target);
        if (!shape.edge_at.emplace(std::make_pair(e.source, e.target), i).second) {
            return std::nullopt;  // parallel edges
        }
    }
    for (const std::string& v : sources) {
        if (targets.count(v)) return std::nullopt;
    }
    if (sources.size() + targets.size() != S.nodes().size()) return std::nullopt;
    if (S.edges().size() != sources.size() * targets.size()) return std::nullopt;
    for (const std::string& v : S.nodes()) {
        if (sources.count(v)) shape.sources.push_back(v);
        if (targets.count(v)) shape.targets.push_back(v);
    }
    return shape;
}

GraphDistribution verified(const Scenario& S, std::vector<RationalMatrix> mats) {
    GraphDistribution p(S, std::move(mats));
    if (!is_vertex(build_polytope(S), flatten(p))) {
        throw std::logic_error("construction: assembled distribution failed vertex verification");
    }
    return p;
}

GraphDistribution construct_dipole(const Scenario& S, const ConstructionInput& input) {
    const int m = S.outcomes();
    const std::size_t n = S.edges().size();
    if (input.sets.size() != n) {
        throw std::invalid_argument("construction: need one set per edge");
    }
    if (!input.lifts.empty() || !input.outcome_maps.empty()) {
        throw std::invalid_argument("construction: dipoles take only two-block sets");
    }
    std::vector<std::vector<Point>> expanded;
    for (std::size_t i = 0; i < n; ++i) {
        if (input.sets[i].empty()) {
            throw std::invalid_argument("construction: set " + std::to_string(i + 1) + " is empty");
        }
        std::vector<Point> pts;
        for (const ProductSimplexVertex& v : input.sets[i]) {
            if (v.block_outcomes.size() != 2 || v.outcomes != m) {
                throw std::invalid_argument("construction: dipole sets need two blocks of " +
                                            std::to_string(m) + " outcomes");
            }
            pts.push_back(v.expand());
        }
        if (!affinely_independent(pts)) {
            throw std::invalid_argument("construction: set " + std::to_string(i + 1) +
                                        " is affinely dependent");
        }
        expanded.push_back(std::move(pts));
    }
    const HullIntersection inter = hull_intersection_unique(expanded);
    if (inter.kind != HullIntersection::Kind::Unique) {
        throw std::invalid_argument(inter.kind == HullIntersection::Kind::Empty
                                        ? "construction: set hulls have empty intersection"
                                        : "construction: set hulls meet in more than one point");
    }
    std::vector<RationalMatrix> mats(n, RationalMatrix::Zero(m, m));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < input.sets[i].size(); ++j) {
            const Rational& c = inter.coefficients[i][j];
            if (c == 0) {
                throw std::invalid_argument("construction: common point needs a zero coefficient");
            }
            mats[i](input.sets[i][j].block_outcomes[0], input.sets[i][j].block_outcomes[1]) = c;
        }
    }
    return verified(S, std::move(mats));
}

GraphDistribution construct_rose(const Scenario& S, const ConstructionInput& input) {
    const int m = S.outcomes();
    const std::size_t n = S.edges().size();
    if (input.lifts.size() != n) {
        throw std::invalid_argument("construction: need one lift per loop");
    }
    if (!input.sets.empty() || !input.outcome_maps.empty()) {
        throw std::invalid_argument("construction: roses take only cycle lifts");
    }
    const Scenario loop = rose_scenario(1, m);
    const StandardFormPolytope loop_polytope = build_polytope(loop);

    std::vector<std::vector<Point>> marginal_sets;
    std::vector<std::vector<GraphDistribution>> lift_dists;
    for (std::size_t k = 0; k < n; ++k) {
        if (input.lifts[k].empty()) {
            throw std::invalid_argument("construction: lift " + std::to_string(k + 1) +
                                        " is empty");
        }
        std::vector<Point> marginals;
        std::vector<GraphDistribution> dists;
        for (const CyclePerm& mu : input.lifts[k]) {
            GraphDistribution q = cycle_distribution(mu, m);
            Point v = q.node_vector("v");
            const bool dup = std::any_of(marginals.begin(), marginals.end(),
                                         [&](const Point& w) { return w == v; });
            if (dup) {
                throw std::invalid_argument("construction: two cycles of lift " +
                                            std::to_string(k + 1) + " share a marginal");
            }
            marginals.push_back(std::move(v));
            dists.push_back(std::move(q));
        }
        if (!affinely_independent(marginals)) {
            throw std::invalid_argument("construction: marginals of lift " + std::to_string(k + 1) +
                                        " are affinely dependent");
        }
        marginal_sets.push_back(std::move(marginals));
        lift_dists.push_back(std::move(dists));
    }

    const HullIntersection inter = hull_intersection_unique(marginal_sets);
    if (inter.kind != HullIntersection::Kind::Unique) {
        throw std::invalid_argument(inter.kind == HullIntersection::Kind::Empty
                                        ? "construction: marginal hulls have empty intersection"
                                        : "construction: marginal hulls meet in more than one point");
    }

    std::vector<RationalMatrix> mats;
    for (std::size_t k = 0; k < n; ++k) {
        RationalMatrix mat = RationalMatrix::Zero(m, m);
        for (std::size_t j = 0; j < lift_dists[k].size(); ++j) {
            const Rational& c = inter.coefficients[k][j];
            if (c == 0) {
                throw std::invalid_argument("construction: common point needs a zero coefficient");
            }
            mat += c * lift_dists[k][j].edge_matrices().front();
        }
        // The mixture must stay inside the face the lift spans: every carrier
        // vertex of the mixed loop distribution has to be one of the cycles.
        const GraphDistribution mixed(loop, {mat});
        for (const Point& w : vsupp(loop_polytope, flatten(mixed))) {
            const bool member = std::any_of(
                lift_dists[k].begin(), lift_dists[k].end(),
                [&](const GraphDistribution& q) { return flatten(q) == w; });
            if (!member) {
                throw std::invalid_argument("construction: lift " + std::to_string(k + 1) +
                                            " does not generate the face of its mixture");
            }
        }
        mats.push_back(std::move(mat));
    }
    return verified(S, std::move(mats));
}

GraphDistribution construct_bipartite(const Scenario& S, const BipartiteShape& shape,
                                      const ConstructionInput& input) {
    const int m = S.outcomes();
    const std::size_t n1 = shape.sources.size();
    const std::size_t n2 = shape.targets.size();
    if (input.sets.size() != n2) {
        throw std::invalid_argument("construction: need one set per target node");
    }
    if (input.outcome_maps.size() != n2) {
        throw std::invalid_argument("construction: need one outcome map per set");
    }
    if (!input.lifts.empty()) {
        throw std::invalid_argument("construction: complete bipartite graphs take no lifts");
    }

    std::vector<std::vector<Point>> expanded;
    for (std::size_t i = 0; i < n2; ++i) {
        const auto& set = input.sets[i];
        const auto& map = input.outcome_maps[i];
        if (set.empty()) {
            throw std::invalid_argument("construction: set " + std::to_string(i + 1) + " is empty");
        }
        if (set.size() > static_cast<std::size_t>(m)) {
            throw std::invalid_argument("construction: set " + std::to_string(i + 1) +
                                        " has more than " + std::to_string(m) + " elements");
        }
        if (map.size() != set.size()) {
            throw std::invalid_argument("construction: outcome map " + std::to_string(i + 1) +
                                        " does not match its set");
        }
        std::set<int> used;
        for (int f : map) {
            if (f < 0 || f >= m) {
                throw std::invalid_argument("construction: outcome map value out of range");
            }
            if (!used.insert(f).second) {
                throw std::invalid_argument("construction: outcome map " + std::to_string(i + 1) +
                                            " is not injective");
            }
        }
        std::vector<Point> pts;
        for (const ProductSimplexVertex& v : set) {
            if (v.block_outcomes.size() != n1 || v.outcomes != m) {
                throw std::invalid_argument("construction: sets need one block per source node");
            }
            pts.push_back(v.expand());
        }
        if (!affinely_independent(pts)) {
            throw std::invalid_argument("construction: set " + std::to_string(i + 1) +
                                        " is affinely dependent");
        }
        expanded.push_back(std::move(pts));
    }

    const HullIntersection inter = hull_intersection_unique(expanded);
    if (inter.kind != HullIntersection::Kind::Unique) {
        throw std::invalid_argument(inter.kind == HullIntersection::Kind::Empty
                                        ? "construction: set hulls have empty intersection"
                                        : "construction: set hulls meet in more than one point");
    }

    std::vector<RationalMatrix> mats(S.edges().size(), RationalMatrix::Zero(m, m));
    for (std::size_t i = 0; i < n2; ++i) {
        for (std::size_t j = 0; j < input.sets[i].size(); ++j) {
            const Rational& c = inter.coefficients[i][j];
            if (c == 0) {
                throw std::invalid_argument("construction: common point needs a zero coefficient");
            }
            const int target_outcome = input.outcome_maps[i][j];
            for (std::size_t k = 0; k < n1; ++k) {
                const std::size_t at =
                    shape.edge_at.at({shape.sources[k], shape.targets[i]});
                mats[at](input.sets[i][j].block_outcomes[k], target_outcome) += c;
            }
        }
    }
    return verified(S, std::move(mats));
}

}  // namespace

GraphDistribution construct_vertex_from_a_sets(const Scenario& S, const ConstructionInput& input) {
    if (is_dipole(S)) return construct_dipole(S, input);
    if (is_rose(S)) return construct_rose(S, input);
    if (const auto shape = complete_bipartite_shape(S)) {
        return construct_bipartite(S, *shape, input);
    }
    throw std::invalid_argument(
        "construction: scenario must be a dipole, a rose, or complete bipartite");
}

}  // namespace gdp
