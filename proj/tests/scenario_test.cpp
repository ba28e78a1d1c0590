#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gdp/scenario.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <random>
#include <sstream>

using namespace gdp;
using gdp::testutil::same_vector;

namespace {

RationalMatrix mat2(Rational a, Rational b, Rational c, Rational d) {
    RationalMatrix p(2, 2);
    p << a, b, c, d;
    return p;
}

const Rational H = Rational(1) / 2;

RationalMatrix diag_half() { return mat2(H, 0, 0, H); }
RationalMatrix anti_half() { return mat2(0, H, H, 0); }

GraphDistribution random_mixture(const Scenario& S, std::mt19937_64& rng, int parts = 4) {
    const auto dets = deterministic_distributions(S);
    std::vector<Rational> w(dets.size(), 0);
    Rational total = 0;
    for (int k = 0; k < parts; ++k) {
        const Rational c = 1 + static_cast<int>(rng() % 7);
        w[rng() % dets.size()] += c;
        total += c;
    }
    std::vector<RationalMatrix> mats;
    for (std::size_t e = 0; e < S.edges().size(); ++e) {
        RationalMatrix acc = RationalMatrix::Zero(S.outcomes(), S.outcomes());
        for (std::size_t d = 0; d < dets.size(); ++d) {
            if (w[d] != 0) acc += (w[d] / total) * dets[d].edge_matrices()[e];
        }
        mats.push_back(std::move(acc));
    }
    return {S, std::move(mats)};
}

}  // namespace

TEST_CASE("scenario validation") {
    CHECK_THROWS_AS(Scenario({"v"}, {}, 1), std::invalid_argument);
    CHECK_THROWS_AS(Scenario({"v", "v"}, {}, 2), std::invalid_argument);
    CHECK_THROWS_AS(Scenario({"v"}, {{"e", "v", "w"}}, 2), std::invalid_argument);
    CHECK_THROWS_AS(Scenario({"v"}, {{"e", "w", "v"}}, 2), std::invalid_argument);
    CHECK_THROWS_AS(Scenario({"v", "w"}, {{"e", "v", "w"}, {"e", "w", "v"}}, 2),
                    std::invalid_argument);
    const Scenario S({"v", "w"}, {{"e", "v", "w"}}, 3);
    CHECK(S.node_index("w") == 1);
    CHECK(S.edge_index("e") == 0);
    CHECK_THROWS_AS(S.node_index("zz"), std::invalid_argument);
}

TEST_CASE("named scenario shapes") {
    const Scenario r3 = rose_scenario(3, 2);
    CHECK(r3.nodes().size() == 1);
    CHECK(r3.edges().size() == 3);
    CHECK(r3.edges()[2].source == "v");
    CHECK(r3.edges()[2].target == "v");

    const Scenario d2 = dipole_scenario(2, 3);
    CHECK(d2.nodes().size() == 2);
    CHECK(d2.edges()[1].source == "v1");
    CHECK(d2.edges()[1].target == "v2");

    const Scenario c4 = cycle_scenario(4, 2);
    CHECK(c4.edges().size() == 4);
    CHECK(c4.edges()[3].source == "v4");
    CHECK(c4.edges()[3].target == "v1");

    const Scenario k23 = complete_bipartite_scenario(2, 3, 2);
    CHECK(k23.nodes().size() == 5);
    CHECK(k23.edges().size() == 6);
    CHECK(k23.edges()[5].id == "x2y3");
    CHECK(k23.edges()[5].source == "x2");
    CHECK(k23.edges()[5].target == "y3");
}

TEST_CASE("distribution validation") {
    const Scenario d1 = dipole_scenario(1, 2);
    CHECK_NOTHROW(GraphDistribution(d1, {diag_half()}));
    CHECK_THROWS_AS(GraphDistribution(d1, {}), std::invalid_argument);
    CHECK_THROWS_AS(GraphDistribution(d1, {mat2(H, H, H, -H)}), std::invalid_argument);
    CHECK_THROWS_AS(GraphDistribution(d1, {mat2(H, H, H, H)}), std::invalid_argument);

    // marginals must agree at the shared node of a two-edge dipole
    const Scenario d2 = dipole_scenario(2, 2);
    CHECK_NOTHROW(GraphDistribution(d2, {diag_half(), anti_half()}));
    CHECK_THROWS_AS(
        GraphDistribution(d2, {diag_half(), mat2(Rational(3) / 4, 0, 0, Rational(1) / 4)}),
        std::invalid_argument);

    // self-loop: row sums must equal column sums
    const Scenario r1 = rose_scenario(1, 2);
    CHECK_NOTHROW(GraphDistribution(r1, {anti_half()}));
    CHECK_THROWS_AS(GraphDistribution(r1, {mat2(0, 1, 0, 0)}), std::invalid_argument);

    // isolated nodes need explicit vectors
    const Scenario iso({"v", "w"}, {{"e", "v", "v"}}, 2);
    CHECK_THROWS_AS(GraphDistribution(iso, {diag_half()}), std::invalid_argument);
    RationalVector q(2);
    q << H, H;
    const GraphDistribution ok(iso, {diag_half()}, {{"w", q}});
    CHECK(same_vector(ok.node_vector("w"), q));
    CHECK(same_vector(ok.node_vector("v"), q));
    CHECK_THROWS_AS(GraphDistribution(iso, {diag_half()}, {{"v", q}, {"w", q}}),
                    std::invalid_argument);
}

TEST_CASE("polytope of a single edge") {
    const Scenario d1 = dipole_scenario(1, 2);
    const auto P = build_polytope(d1);
    CHECK(P.num_variables() == 4);
    CHECK(P.labels()[1] == "t1[0,1]");
    const auto verts = enumerate_vertices(P);
    REQUIRE(verts.size() == 4);
    for (const Point& v : verts) {
        CHECK(support(v).size() == 1);
        const auto p = unflatten(d1, v);
        CHECK(p.is_deterministic());
    }
}

TEST_CASE("single dipole edge has m^2 vertices") {
    for (int m = 2; m <= 4; ++m) {
        const auto P = build_polytope(dipole_scenario(1, m));
        CHECK(enumerate_vertices(P).size() == static_cast<std::size_t>(m) * m);
    }
}

TEST_CASE("single loop with three outcomes has 8 vertices") {
    const auto P = build_polytope(rose_scenario(1, 3));
    CHECK(enumerate_vertices(P).size() == 8);
}

TEST_CASE("empty edge set is rejected") {
    const Scenario nodes_only({"v"}, {}, 2);
    CHECK_THROWS_AS(build_polytope(nodes_only), std::invalid_argument);
}

TEST_CASE("flatten and unflatten invert each other") {
    const Scenario d2 = dipole_scenario(2, 2);
    const GraphDistribution p(d2, {diag_half(), anti_half()});
    const Point x = flatten(p);
    CHECK(x.size() == 8);
    CHECK(unflatten(d2, x) == p);
    CHECK(build_polytope(d2).contains(x));

    // every enumerated vertex parses back cleanly
    const auto P = build_polytope(d2);
    for (const Point& v : enumerate_vertices(P)) {
        const auto q = unflatten(d2, v);
        CHECK(same_vector(flatten(q), v));
    }
}

TEST_CASE("deterministic distributions: count and vertex property") {
    const std::vector<Scenario> cases = {
        dipole_scenario(1, 3), dipole_scenario(2, 2), rose_scenario(1, 3),
        rose_scenario(2, 2),   cycle_scenario(3, 2),  complete_bipartite_scenario(2, 2, 2),
        Scenario({"a", "b", "c", "d"},
                 {{"e1", "a", "b"}, {"e2", "b", "c"}, {"e3", "b", "d"}}, 3),
    };
    for (const Scenario& S : cases) {
        const auto dets = deterministic_distributions(S);
        std::size_t expect = 1;
        for (std::size_t i = 0; i < S.nodes().size(); ++i) expect *= S.outcomes();
        CHECK(dets.size() == expect);
        const auto P = build_polytope(S);
        for (const auto& d : dets) {
            CHECK(d.is_deterministic());
            CHECK(is_vertex(P, flatten(d)));
        }
    }
}

TEST_CASE("three of the nine deterministic distributions on the 3-edge dipole are all-collapsed") {
    const auto dets = deterministic_distributions(dipole_scenario(3, 3));
    REQUIRE(dets.size() == 9);
    int all_diagonal = 0;
    for (const auto& d : dets) {
        bool diag = true;
        for (const RationalMatrix& p : d.edge_matrices()) {
            for (Index a = 0; a < 3; ++a) {
                for (Index b = 0; b < 3; ++b) {
                    if (a != b && p(a, b) != 0) diag = false;
                }
            }
        }
        if (diag) ++all_diagonal;
    }
    CHECK(all_diagonal == 3);
}

TEST_CASE("cycle distributions") {
    {
        const auto p = cycle_distribution({0}, 4);
        CHECK(p.edge_matrices()[0](0, 0) == 1);
        CHECK(p.is_deterministic());
    }
    {
        const auto p = cycle_distribution({0, 1}, 2);
        CHECK(p.edge_matrices()[0] == anti_half());
    }
    {
        const auto p = cycle_distribution({0, 1, 2, 3}, 4);
        const RationalMatrix& m = p.edge_matrices()[0];
        const Rational q = Rational(1) / 4;
        for (int j = 0; j < 4; ++j) {
            CHECK(m(j, (j + 1) % 4) == q);
        }
        CHECK(m(0, 2) == 0);
        CHECK(m.sum() == 1);
    }
    CHECK_THROWS_AS(cycle_distribution({0, 0}, 3), std::invalid_argument);
    CHECK_THROWS_AS(cycle_distribution({0, 3}, 3), std::invalid_argument);
    CHECK_THROWS_AS(cycle_distribution({}, 3), std::invalid_argument);
}

TEST_CASE("cycle permutation census") {
    CHECK(all_cycle_perms(2).size() == 3);
    CHECK(all_cycle_perms(3).size() == 8);
    CHECK(all_cycle_perms(4).size() == 24);
    // distinctness
    for (int m = 2; m <= 4; ++m) {
        auto perms = all_cycle_perms(m);
        std::sort(perms.begin(), perms.end());
        CHECK(std::adjacent_find(perms.begin(), perms.end()) == perms.end());
    }
}

TEST_CASE("vertices of the single-loop polytope are exactly the cycle distributions") {
    for (int m = 2; m <= 4; ++m) {
        const auto P = build_polytope(rose_scenario(1, m));
        const auto verts = enumerate_vertices(P);
        std::vector<Point> expected;
        for (const CyclePerm& mu : all_cycle_perms(m)) {
            expected.push_back(flatten(cycle_distribution(mu, m)));
        }
        std::sort(expected.begin(), expected.end(), lex_less);
        REQUIRE(verts.size() == expected.size());
        for (std::size_t i = 0; i < verts.size(); ++i) {
            CHECK(same_vector(verts[i], expected[i]));
        }
    }
}

TEST_CASE("deterministic distributions are never contextual") {
    for (const Scenario& S : {cycle_scenario(4, 2), rose_scenario(2, 3)}) {
        for (const auto& d : deterministic_distributions(S)) {
            CHECK_FALSE(is_contextual(S, d));
        }
    }
}

TEST_CASE("odd antidiagonal counts on the 4-cycle are contextual, even ones are not") {
    const Scenario c4 = cycle_scenario(4, 2);
    const auto build = [&](std::initializer_list<int> anti) {
        std::vector<RationalMatrix> mats(4, diag_half());
        for (int i : anti) mats[static_cast<std::size_t>(i)] = anti_half();
        return GraphDistribution(c4, std::move(mats));
    };
    CHECK(is_contextual(c4, build({3})));
    CHECK(is_contextual(c4, build({0})));
    CHECK(is_contextual(c4, build({0, 1, 2})));
    CHECK_FALSE(is_contextual(c4, build({})));
    CHECK_FALSE(is_contextual(c4, build({0, 1})));
    CHECK_FALSE(is_contextual(c4, build({0, 1, 2, 3})));
}

TEST_CASE("random deterministic mixtures are never contextual") {
    std::mt19937_64 rng(20260816);
    for (const Scenario& S : {cycle_scenario(4, 2), rose_scenario(2, 2),
                              Scenario({"a", "b", "c"}, {{"e1", "a", "b"}, {"e2", "b", "c"}}, 3)}) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto p = random_mixture(S, rng);
            CHECK_FALSE(is_contextual(S, p));
        }
    }
}

TEST_CASE("gluing at a single node: contextual iff a restriction is") {
    const Scenario glued({"v", "w"}, {{"s", "v", "v"}, {"t", "v", "w"}}, 2);
    const Scenario loop_part({"v"}, {{"s", "v", "v"}}, 2);
    const Scenario edge_part({"v", "w"}, {{"t", "v", "w"}}, 2);

    const GraphDistribution good(glued, {diag_half(), diag_half()});
    CHECK_FALSE(is_contextual(glued, good));
    CHECK_FALSE(is_contextual(loop_part, restrict_distribution(good, loop_part)));

    const GraphDistribution bad(glued, {anti_half(), diag_half()});
    CHECK(is_contextual(glued, bad));
    CHECK(is_contextual(loop_part, restrict_distribution(bad, loop_part)));
    CHECK_FALSE(is_contextual(edge_part, restrict_distribution(bad, edge_part)));

    // brute force over random mixtures: gluing preserves non-contextuality
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = random_mixture(glued, rng);
        const bool whole = is_contextual(glued, p);
        const bool left = is_contextual(loop_part, restrict_distribution(p, loop_part));
        const bool right = is_contextual(edge_part, restrict_distribution(p, edge_part));
        CHECK(whole == (left || right));
    }
}

TEST_CASE("restriction") {
    const Scenario path({"a", "b", "c"}, {{"e1", "a", "b"}, {"e2", "b", "c"}}, 2);
    const GraphDistribution p(path, {diag_half(), anti_half()});

    CHECK(restrict_distribution(p, path) == p);

    const Scenario sub({"a", "b"}, {{"e1", "a", "b"}}, 2);
    const auto q = restrict_distribution(p, sub);
    CHECK(q.edge_matrix("e1") == diag_half());

    // restriction to a bare node set keeps the derived marginals
    const Scenario nodes_only({"a", "c"}, {}, 2);
    const auto r = restrict_distribution(p, nodes_only);
    RationalVector half(2);
    half << H, H;
    CHECK(same_vector(r.node_vector("a"), half));
    CHECK(same_vector(r.node_vector("c"), half));

    CHECK_THROWS_AS(restrict_distribution(p, rose_scenario(1, 2)), std::invalid_argument);
    CHECK_THROWS_AS(restrict_distribution(p, Scenario({"a", "b"}, {{"e1", "b", "a"}}, 2)),
                    std::invalid_argument);
    CHECK_THROWS_AS(restrict_distribution(p, Scenario({"a", "b"}, {{"e1", "a", "b"}}, 3)),
                    std::invalid_argument);
}

TEST_CASE("vertices of small rose polytopes are contextual exactly when non-deterministic") {
    for (int n = 1; n <= 2; ++n) {
        const Scenario S = rose_scenario(n, 3);
        const auto P = build_polytope(S);
        for (const Point& v : enumerate_vertices(P)) {
            const auto p = unflatten(S, v);
            CHECK(is_contextual(S, p) == !p.is_deterministic());
        }
    }
}

TEST_CASE("scenario files round-trip") {
    const Scenario S({"v", "w"}, {{"e1", "v", "w"}, {"e2", "w", "w"}}, 3);
    std::istringstream in(format_scenario(S));
    CHECK(parse_scenario(in) == S);
}

TEST_CASE("distribution files round-trip, including isolated nodes") {
    const Scenario iso({"v", "w"}, {{"s", "v", "v"}}, 2);
    RationalVector q(2);
    q << Rational(1) / 3, Rational(2) / 3;
    const GraphDistribution p(iso, {anti_half()}, {{"w", q}});
    std::istringstream in(format_distribution(p));
    CHECK(parse_distribution(in, iso) == p);
}

TEST_CASE("parser diagnostics carry line and column") {
    {
        std::istringstream in("outcomes x\n");
        try {
            parse_scenario(in);
            FAIL("expected ParseError");
        } catch (const ParseError& err) {
            CHECK(err.line == 1);
            CHECK(err.column == 10);
        }
    }
    {
        std::istringstream in("outcomes 2\nnode v\nnode v\n");
        try {
            parse_scenario(in);
            FAIL("expected ParseError");
        } catch (const ParseError& err) {
            CHECK(err.line == 3);
            CHECK(err.column == 6);
        }
    }
    {
        std::istringstream in("outcomes 2\nnode v\nedge e v w\n");
        try {
            parse_scenario(in);
            FAIL("expected ParseError");
        } catch (const ParseError& err) {
            CHECK(err.line == 3);
            CHECK(err.column == 10);
            CHECK(std::string(err.what()).find("unknown node 'w'") != std::string::npos);
        }
    }
    {
        // comments and blank lines do not shift reported numbers
        std::istringstream in("# header\n\noutcomes 2\nnode v\nedge s1 v v\n");
        CHECK(parse_scenario(in) == rose_scenario(1, 2));
    }
    const Scenario r1 = rose_scenario(1, 2);
    {
        std::istringstream in("edge nope\n1/2 1/2\n0 0\n");
        try {
            parse_distribution(in, r1);
            FAIL("expected ParseError");
        } catch (const ParseError& err) {
            CHECK(err.line == 1);
            CHECK(err.column == 6);
            CHECK(std::string(err.what()).find("unknown edge 'nope'") != std::string::npos);
        }
    }
    {
        std::istringstream in("edge s1\n1/2 oops\n1/2 0\n");
        try {
            parse_distribution(in, r1);
            FAIL("expected ParseError");
        } catch (const ParseError& err) {
            CHECK(err.line == 2);
            CHECK(err.column == 5);
        }
    }
    {
        std::istringstream in("edge s1\n1/2 1/2\n");
        CHECK_THROWS_AS(parse_distribution(in, r1), ParseError);
    }
    {
        std::istringstream in("");
        CHECK_THROWS_AS(parse_distribution(in, r1), ParseError);
    }
}

TEST_CASE("contextuality witnesses verify exactly") {
    const Scenario r1 = rose_scenario(1, 3);

    const GraphDistribution cyc = cycle_distribution({1, 2, 0}, 3);
    const ContextualityWitness w = contextuality_witness(r1, cyc);
    REQUIRE(w.contextual);
    CHECK(w.decomposition.empty());
    for (const GraphDistribution& q : deterministic_distributions(r1)) {
        CHECK(w.functional.dot(embed_distribution(q)) <= w.threshold);
    }
    CHECK(w.functional.dot(embed_distribution(cyc)) == w.threshold + 1);

    RationalMatrix M = RationalMatrix::Zero(3, 3);
    M(0, 0) = Rational(1, 2);
    M(1, 1) = Rational(1, 3);
    M(2, 2) = Rational(1, 6);
    const GraphDistribution mix(r1, {M});
    const ContextualityWitness d = contextuality_witness(r1, mix);
    REQUIRE_FALSE(d.contextual);
    Rational total = 0;
    RationalVector rebuilt = RationalVector::Zero(9);
    for (const ContextualityWitness::Term& term : d.decomposition) {
        CHECK(term.weight > 0);
        total += term.weight;
        RationalMatrix D = RationalMatrix::Zero(3, 3);
        D(term.assignment.at("v"), term.assignment.at("v")) = 1;
        rebuilt += term.weight * flatten(GraphDistribution(r1, {D}));
    }
    CHECK(total == 1);
    CHECK(same_vector(rebuilt, flatten(mix)));

    const Scenario c4 = cycle_scenario(4, 2);
    const auto dets = deterministic_distributions(c4);
    for (const Point& x : enumerate_vertices(build_polytope(c4))) {
        const GraphDistribution p = unflatten(c4, x);
        const ContextualityWitness v = contextuality_witness(c4, p);
        CHECK(v.contextual == is_contextual(c4, p));
        if (v.contextual) {
            for (const GraphDistribution& q : dets) {
                CHECK(v.functional.dot(embed_distribution(q)) <= v.threshold);
            }
            CHECK(v.functional.dot(embed_distribution(p)) == v.threshold + 1);
        }
    }

    const Scenario big = complete_bipartite_scenario(2, 5, 4);
    std::vector<RationalMatrix> corner;
    for (std::size_t e = 0; e < big.edges().size(); ++e) {
        RationalMatrix E = RationalMatrix::Zero(4, 4);
        E(0, 0) = 1;
        corner.push_back(std::move(E));
    }
    CHECK_THROWS_AS(contextuality_witness(big, GraphDistribution(big, std::move(corner))),
                    BudgetExceeded);
}
