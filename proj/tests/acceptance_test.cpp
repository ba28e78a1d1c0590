// Acceptance gate for the library. Runs twelve end-to-end checks and prints
// one line per check; a release build is acceptable only when every line
// reads pass. Returns the number of failed checks.

#include "gdp/collapse.hpp"
#include "gdp/counting.hpp"
#include "gdp/criteria.hpp"
#include "gdp/linalg.hpp"
#include "gdp/polytope.hpp"
#include "gdp/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace gdp;

namespace {

int failures = 0;

void line(int number, const std::string& label, bool ok, const std::string& detail) {
    std::cout << (ok ? "pass" : "FAIL") << "  criterion " << number << ": " << label;
    if (!ok && !detail.empty()) std::cout << "  [" << detail << "]";
    std::cout << std::endl;
    if (!ok) ++failures;
}

template <typename Body>
void criterion(int number, const std::string& label, Body&& body) {
    bool ok = false;
    std::string detail;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    line(number, label, ok, detail);
}

std::string fixture(const std::string& name) {
    return std::string(GDP_FIXTURES_DIR) + "/" + name;
}

Scenario load_scen(const std::string& name) {
    std::ifstream in(fixture(name));
    if (!in.good()) throw std::runtime_error("cannot open fixture " + name);
    return parse_scenario(in);
}

GraphDistribution load_dist(const std::string& name, const Scenario& S) {
    std::ifstream in(fixture(name));
    if (!in.good()) throw std::runtime_error("cannot open fixture " + name);
    return parse_distribution(in, S);
}

GraphDistribution random_mixture(const Scenario& S, std::mt19937_64& rng, int terms) {
    const auto dets = deterministic_distributions(S);
    std::vector<Rational> w(dets.size(), 0);
    Rational total = 0;
    for (int k = 0; k < terms; ++k) {
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

std::vector<Scenario> loop_parts(const Scenario& rose) {
    std::vector<Scenario> parts;
    for (const auto& e : rose.edges()) {
        parts.push_back(Scenario({e.source}, {e}, rose.outcomes()));
    }
    return parts;
}

std::vector<Scenario> target_star_parts(const Scenario& S) {
    std::vector<std::string> sources;
    std::vector<std::string> targets;
    for (const auto& node : S.nodes()) {
        bool is_source = false;
        for (const auto& e : S.edges()) {
            if (e.source == node) is_source = true;
        }
        if (is_source) {
            sources.push_back(node);
        } else {
            targets.push_back(node);
        }
    }
    std::vector<Scenario> parts;
    for (const auto& t : targets) {
        std::vector<std::string> nodes = sources;
        nodes.push_back(t);
        std::vector<Edge> edges;
        for (const auto& e : S.edges()) {
            if (e.target == t) edges.push_back(e);
        }
        parts.push_back(Scenario(nodes, edges, S.outcomes()));
    }
    return parts;
}

RationalVector random_simplex_vector(std::mt19937_64& rng, int m) {
    RationalVector w(m);
    Rational total = 0;
    for (int a = 0; a < m; ++a) {
        w(a) = 1 + static_cast<int>(rng() % 9);
        total += w(a);
    }
    for (int a = 0; a < m; ++a) w(a) /= total;
    return w;
}

// A connected tree scenario on `nodes` nodes with random attachment points
// and random edge directions, together with a random distribution on it.
// The distribution is assembled marginal by marginal: the first node gets a
// random strictly positive vector and every edge extends it through a random
// transition kernel, so the result is a generic point of the polytope rather
// than a mixture built from deterministic points.
std::pair<Scenario, GraphDistribution> random_tree_instance(std::mt19937_64& rng, int nodes,
                                                            int m) {
    std::vector<std::string> names;
    for (int i = 1; i <= nodes; ++i) names.push_back("v" + std::to_string(i));

    struct Arc {
        int parent;
        int child;
        bool toward_child;
    };
    std::vector<Arc> arcs;
    std::vector<Edge> edges;
    for (int i = 1; i < nodes; ++i) {
        const int parent = static_cast<int>(rng() % i);
        const bool toward_child = (rng() % 2) == 0;
        const std::string id = "e" + std::to_string(i);
        if (toward_child) {
            edges.push_back({id, names[parent], names[i]});
        } else {
            edges.push_back({id, names[i], names[parent]});
        }
        arcs.push_back({parent, i, toward_child});
    }
    Scenario S(names, edges, m);

    std::vector<RationalVector> w(nodes);
    w[0] = random_simplex_vector(rng, m);
    std::vector<RationalMatrix> mats;
    for (const Arc& arc : arcs) {
        RationalMatrix M(m, m);
        if (arc.toward_child) {
            for (int a = 0; a < m; ++a) {
                const RationalVector row = random_simplex_vector(rng, m);
                for (int b = 0; b < m; ++b) M(a, b) = w[arc.parent](a) * row(b);
            }
            w[arc.child] = RationalVector::Zero(m);
            for (int b = 0; b < m; ++b) {
                for (int a = 0; a < m; ++a) w[arc.child](b) += M(a, b);
            }
        } else {
            for (int b = 0; b < m; ++b) {
                const RationalVector col = random_simplex_vector(rng, m);
                for (int a = 0; a < m; ++a) M(a, b) = w[arc.parent](b) * col(a);
            }
            w[arc.child] = RationalVector::Zero(m);
            for (int a = 0; a < m; ++a) {
                for (int b = 0; b < m; ++b) w[arc.child](a) += M(a, b);
            }
        }
        mats.push_back(std::move(M));
    }
    GraphDistribution p(S, std::move(mats));
    return {std::move(S), std::move(p)};
}

std::vector<Point> sorted_flattens(const std::vector<GraphDistribution>& ps) {
    std::vector<Point> out;
    out.reserve(ps.size());
    for (const auto& p : ps) out.push_back(flatten(p));
    std::sort(out.begin(), out.end(), lex_less);
    return out;
}

bool same_point_lists(const std::vector<Point>& a, const std::vector<Point>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != b[i].size()) return false;
        for (Index k = 0; k < a[i].size(); ++k) {
            if (a[i](k) != b[i](k)) return false;
        }
    }
    return true;
}

}  // namespace

int main() {
    const std::string store_dir =
        (std::filesystem::temp_directory_path() /
         ("gdp_acceptance_" + std::to_string(std::random_device{}())))
            .string();
    std::filesystem::create_directories(store_dir);
    CountStore store(store_dir);

    criterion(1, "single loop with three outcomes has 8 vertices in under a second",
              [](std::string& detail) {
                  const auto t0 = std::chrono::steady_clock::now();
                  const auto vs = enumerate_vertices(build_polytope(rose_scenario(1, 3)));
                  const double secs =
                      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                  if (vs.size() != 8 || secs >= 1.0) {
                      detail = "count " + std::to_string(vs.size()) + ", " +
                               std::to_string(secs) + "s";
                      return false;
                  }
                  return true;
              });

    criterion(2, "double description finds 56 and 488 vertices for two and three loops",
              [](std::string& detail) {
                  EnumOptions dd;
                  dd.engine = Engine::DoubleDescription;
                  const auto two = enumerate_vertices(build_polytope(rose_scenario(2, 3)), dd);
                  const auto three = enumerate_vertices(build_polytope(rose_scenario(3, 3)), dd);
                  if (two.size() != 56 || three.size() != 488) {
                      detail = "counts " + std::to_string(two.size()) + ", " +
                               std::to_string(three.size());
                      return false;
                  }
                  return true;
              });

    criterion(3, "four loops with three outcomes: 4088 vertices, 2443 with full support",
              [&store](std::string& detail) {
                  const CountReport r = kappa(Family::Rose, 4, 3, &store);
                  const long long direct =
                      r.by_collapsed[0] - r.by_collapsed_deterministic[0];
                  const long long tilde = kappa_tilde(Family::Rose, 4, 3, &store);
                  if (r.total != 4088 || direct != 2443 || tilde != 2443) {
                      detail = "total " + std::to_string(r.total) + ", direct " +
                               std::to_string(direct) + ", tilde " + std::to_string(tilde);
                      return false;
                  }
                  return true;
              });

    criterion(4, "three parallel edges with three outcomes: 561 vertices, 408 with full support",
              [&store](std::string& detail) {
                  EnumOptions dd;
                  dd.engine = Engine::DoubleDescription;
                  const auto direct = sorted_flattens(enumerate_dipole_vertices(3, 3));
                  std::vector<Point> by_dd =
                      enumerate_vertices(build_polytope(dipole_scenario(3, 3)), dd);
                  std::sort(by_dd.begin(), by_dd.end(), lex_less);
                  const CountReport r = kappa(Family::Dipole, 3, 3, &store);
                  const long long tilde = kappa_tilde(Family::Dipole, 3, 3, &store);
                  if (direct.size() != 561 || !same_point_lists(direct, by_dd) ||
                      r.total != 561 || tilde != 408) {
                      detail = "direct " + std::to_string(direct.size()) + ", engine " +
                               std::to_string(by_dd.size()) + ", report " +
                               std::to_string(r.total) + ", tilde " + std::to_string(tilde);
                      return false;
                  }
                  return true;
              });

    criterion(5, "lower bounds: 197883 for the 3x3 bipartite graph, 4896 for the split dipole",
              [&store](std::string& detail) {
                  const long long rose_bound = lower_bound_rose(3, 3, 3, &store);
                  const long long dipole_bound = lower_bound_dipole(3, 2, 3, &store);
                  if (rose_bound != 197883 || dipole_bound != 4896) {
                      detail = std::to_string(rose_bound) + ", " + std::to_string(dipole_bound);
                      return false;
                  }
                  return true;
              });

    criterion(6, "spanning tree counts match the bipartite product formula",
              [](std::string& detail) {
                  for (int n1 = 2; n1 <= 4; ++n1) {
                      for (int n2 = 2; n2 <= 4; ++n2) {
                          Int expected = 1;
                          for (int k = 1; k < n2; ++k) expected *= n1;
                          for (int k = 1; k < n1; ++k) expected *= n2;
                          const Int got =
                              spanning_tree_count(complete_bipartite_scenario(n1, n2, 2));
                          if (got != expected) {
                              detail = std::to_string(n1) + "x" + std::to_string(n2);
                              return false;
                          }
                      }
                  }
                  return true;
              });

    criterion(7, "balance matrix ranks and vertex verdicts on the shipped certificates",
              [](std::string& detail) {
                  const Scenario d4 = load_scen("d4_m3.scen");
                  const auto db = dipole_is_vertex(load_dist("d4_m3_vertex_b.dist", d4));
                  if (!db.vertex || db.rank != 5 || db.required_rank != 5) {
                      detail = "four-edge dipole certificate b";
                      return false;
                  }
                  if (!dipole_is_vertex(load_dist("d4_m3_vertex_a.dist", d4)).vertex) {
                      detail = "four-edge dipole certificate a";
                      return false;
                  }
                  const Scenario r2 = load_scen("r2_m3.scen");
                  if (!rose_is_vertex(load_dist("r2_m3_vertex.dist", r2)).vertex) {
                      detail = "two-loop certificate";
                      return false;
                  }
                  const Scenario r3 = load_scen("r3_m4.scen");
                  const auto ra = rose_is_vertex(load_dist("r3_m4_vertex_a.dist", r3));
                  const auto rb = rose_is_vertex(load_dist("r3_m4_vertex_b.dist", r3));
                  if (!ra.vertex || ra.rank != 7 || !rb.vertex || rb.rank != 7) {
                      detail = "three-loop four-outcome certificates";
                      return false;
                  }
                  return true;
              });

    criterion(8, "graph test matches the rank test on every vertex and on 1000 midpoints",
              [](std::string& detail) {
                  std::mt19937_64 rng(20260816);
                  int disagreements = 0;
                  int midpoints = 0;
                  for (int family = 0; family < 2; ++family) {
                      for (int n = 1; n <= 3; ++n) {
                          for (int m = 2; m <= 3; ++m) {
                              const Scenario S = family == 0 ? dipole_scenario(n, m)
                                                             : rose_scenario(n, m);
                              const StandardFormPolytope P = build_polytope(S);
                              const auto vs = enumerate_vertices(P);
                              const auto judge = [&](const Point& x) {
                                  const GraphDistribution p = unflatten(S, x);
                                  const bool by_graph = family == 0
                                                            ? dipole_is_vertex(p).vertex
                                                            : rose_is_vertex(p).vertex;
                                  if (by_graph != is_vertex(P, x)) ++disagreements;
                              };
                              for (const Point& v : vs) judge(v);
                              for (int trial = 0; trial < 84; ++trial) {
                                  const std::size_t i = rng() % vs.size();
                                  std::size_t j = rng() % vs.size();
                                  while (j == i) j = rng() % vs.size();
                                  const Point mid =
                                      ((vs[i] + vs[j]) * Rational(1, 2)).eval();
                                  judge(mid);
                                  ++midpoints;
                              }
                          }
                      }
                  }
                  if (disagreements != 0 || midpoints < 1000) {
                      detail = std::to_string(disagreements) + " disagreements over " +
                               std::to_string(midpoints) + " midpoints";
                      return false;
                  }
                  return true;
              });

    criterion(9, "fiber check never overclaims on 1000 glued instances, stays honest when stuck",
              [](std::string& detail) {
                  struct Glued {
                      Scenario S;
                      Scenario glue;
                      std::vector<Scenario> parts;
                      StandardFormPolytope P;
                      std::vector<Point> vertices;
                  };
                  std::vector<Glued> shapes;
                  const auto add_rose = [&shapes](int n, int m) {
                      Scenario S = rose_scenario(n, m);
                      Scenario glue({S.nodes()[0]}, {}, m);
                      auto parts = loop_parts(S);
                      StandardFormPolytope P = build_polytope(S);
                      auto vs = enumerate_vertices(P);
                      shapes.push_back({std::move(S), std::move(glue), std::move(parts),
                                        std::move(P), std::move(vs)});
                  };
                  add_rose(2, 2);
                  add_rose(2, 3);
                  add_rose(3, 2);
                  {
                      Scenario S = load_scen("looppendant_m2.scen");
                      Scenario glue({"v"}, {}, 2);
                      std::vector<Scenario> parts = {
                          Scenario({"v"}, {S.edges()[0]}, 2),
                          Scenario({"v", "w"}, {S.edges()[1]}, 2),
                      };
                      StandardFormPolytope P = build_polytope(S);
                      auto vs = enumerate_vertices(P);
                      shapes.push_back({std::move(S), std::move(glue), std::move(parts),
                                        std::move(P), std::move(vs)});
                  }
                  {
                      Scenario S = load_scen("k22_m2.scen");
                      Scenario glue({"x1", "x2"}, {}, 2);
                      auto parts = target_star_parts(S);
                      StandardFormPolytope P = build_polytope(S);
                      auto vs = enumerate_vertices(P);
                      shapes.push_back({std::move(S), std::move(glue), std::move(parts),
                                        std::move(P), std::move(vs)});
                  }

                  std::mt19937_64 rng(331991);
                  int positives = 0;
                  int violations = 0;
                  for (int iter = 0; iter < 1000; ++iter) {
                      const Glued& g = shapes[iter % shapes.size()];
                      GraphDistribution p =
                          iter % 4 == 0
                              ? unflatten(g.S, g.vertices[rng() % g.vertices.size()])
                              : random_mixture(g.S, rng, 1 + static_cast<int>(rng() % 4));
                      const FiberCheck fc = fiber_sufficient_vertex(p, g.glue, g.parts);
                      if (fc.vertex) {
                          ++positives;
                          if (!is_vertex(g.P, flatten(p))) ++violations;
                      }
                  }

                  const Scenario k25 = load_scen("k25_m4.scen");
                  const GraphDistribution hard = load_dist("k25_m4_vertex.dist", k25);
                  const FiberCheck fc =
                      fiber_sufficient_vertex(hard, Scenario({"x1", "x2"}, {}, 4),
                                              target_star_parts(k25));
                  const bool honest = !fc.vertex && is_vertex(build_polytope(k25), flatten(hard));

                  if (violations != 0 || positives == 0 || !honest) {
                      detail = std::to_string(violations) + " overclaims, " +
                               std::to_string(positives) + " positives, honest " +
                               (honest ? "yes" : "no");
                      return false;
                  }
                  return true;
              });

    criterion(10, "random tree scenarios carry no contextual distributions",
              [](std::string& detail) {
                  std::mt19937_64 rng(471137);
                  for (int iter = 0; iter < 50; ++iter) {
                      const int nodes = 2 + static_cast<int>(rng() % 5);
                      const int m = 2 + static_cast<int>(rng() % 2);
                      const auto [S, p] = random_tree_instance(rng, nodes, m);
                      if (is_contextual(S, p)) {
                          detail = "contextual point on a tree with " +
                                   std::to_string(nodes) + " nodes, " + std::to_string(m) +
                                   " outcomes";
                          return false;
                      }
                  }
                  return true;
              });

    criterion(11, "the binary four-cycle has 24 vertices and the box point is a contextual vertex",
              [](std::string& detail) {
                  const Scenario S = load_scen("c4_m2.scen");
                  const StandardFormPolytope P = build_polytope(S);
                  const auto vs = enumerate_vertices(P);
                  const GraphDistribution box = load_dist("c4_m2_pr.dist", S);
                  const bool vertex = is_vertex(P, flatten(box));
                  const bool contextual = is_contextual(S, box);
                  if (vs.size() != 24 || !vertex || !contextual) {
                      detail = std::to_string(vs.size()) + " vertices, vertex " +
                               (vertex ? "yes" : "no") + ", contextual " +
                               (contextual ? "yes" : "no");
                      return false;
                  }
                  return true;
              });

    criterion(12, "support search and double description agree on every small fixture polytope",
              [](std::string& detail) {
                  int compared = 0;
                  for (const auto& entry :
                       std::filesystem::directory_iterator(GDP_FIXTURES_DIR)) {
                      if (entry.path().extension() != ".scen") continue;
                      std::ifstream in(entry.path());
                      const Scenario S = parse_scenario(in);
                      const StandardFormPolytope P = build_polytope(S);
                      if (P.num_variables() > 30) continue;
                      EnumOptions naive;
                      naive.engine = Engine::Naive;
                      EnumOptions dd;
                      dd.engine = Engine::DoubleDescription;
                      if (!same_point_lists(enumerate_vertices(P, naive),
                                            enumerate_vertices(P, dd))) {
                          detail = entry.path().filename().string();
                          return false;
                      }
                      ++compared;
                  }
                  if (compared < 10) {
                      detail = "only " + std::to_string(compared) + " scenarios compared";
                      return false;
                  }
                  return true;
              });

    std::error_code ec;
    std::filesystem::remove_all(store_dir, ec);

    if (failures == 0) {
        std::cout << "all 12 criteria hold" << std::endl;
    } else {
        std::cout << failures << " of 12 criteria failed" << std::endl;
    }
    return failures;
}
