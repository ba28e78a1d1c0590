#include <CLI11.hpp>
#include <json.hpp>

#include "gdp/collapse.hpp"
#include "gdp/counting.hpp"
#include "gdp/criteria.hpp"
#include "gdp/polytope.hpp"
#include "gdp/scenario.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;
using namespace gdp;

namespace {

long long default_budget() {
    if (const char* env = std::getenv("GDP_BUDGET")) {
        char* end = nullptr;
        const long long value = std::strtoll(env, &end, 10);
        if (end == env || *end != '\0' || value <= 0) {
            throw std::runtime_error("GDP_BUDGET must be a positive integer");
        }
        return value;
    }
    return 50'000'000;
}

long long resolve_budget(long long flag) { return flag > 0 ? flag : default_budget(); }

std::string rational_text(const Rational& r) {
    std::ostringstream out;
    out << r;
    return out.str();
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw std::runtime_error("cannot open '" + path + "'");
    return parse_scenario(in);
}

GraphDistribution load_distribution(const std::string& path, const Scenario& S) {
    std::ifstream in(path);
    if (!in.good()) throw std::runtime_error("cannot open '" + path + "'");
    return parse_distribution(in, S);
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path);
    out << content;
    out.flush();
    if (!out.good()) throw std::runtime_error("cannot write '" + out_path + "'");
}

bool deterministic_point(const Point& x) {
    for (Index i = 0; i < x.size(); ++i) {
        if (x(i) != 0 && x(i) != 1) return false;
    }
    return true;
}

// One label per embedded coordinate: edge entries as id[a,b] in edge order,
// then isolated node entries as id[a].
std::vector<std::string> coordinate_labels(const Scenario& S) {
    std::vector<std::string> labels;
    const int m = S.outcomes();
    for (const Edge& e : S.edges()) {
        for (int a = 0; a < m; ++a) {
            for (int b = 0; b < m; ++b) {
                labels.push_back(e.id + "[" + std::to_string(a) + "," + std::to_string(b) + "]");
            }
        }
    }
    for (const std::string& v : S.nodes()) {
        if (!S.node_is_isolated(v)) continue;
        for (int a = 0; a < m; ++a) labels.push_back(v + "[" + std::to_string(a) + "]");
    }
    return labels;
}

json scenario_json(const Scenario& S) {
    json nodes = json::array();
    for (const std::string& v : S.nodes()) nodes.push_back(v);
    json edges = json::array();
    for (const Edge& e : S.edges()) {
        edges.push_back({{"id", e.id}, {"source", e.source}, {"target", e.target}});
    }
    return {{"outcomes", S.outcomes()}, {"nodes", nodes}, {"edges", edges}};
}

json point_json(const Point& x) {
    json coords = json::array();
    for (Index i = 0; i < x.size(); ++i) coords.push_back(rational_text(x(i)));
    return coords;
}

json distribution_json(const GraphDistribution& p) {
    const Scenario& S = p.scenario();
    json edges = json::object();
    for (const Edge& e : S.edges()) {
        const RationalMatrix& M = p.edge_matrix(e.id);
        json rows = json::array();
        for (Index a = 0; a < M.rows(); ++a) {
            json row = json::array();
            for (Index b = 0; b < M.cols(); ++b) row.push_back(rational_text(M(a, b)));
            rows.push_back(row);
        }
        edges[e.id] = rows;
    }
    json nodes = json::object();
    for (const std::string& v : S.nodes()) {
        if (S.node_is_isolated(v)) nodes[v] = point_json(p.node_vector(v));
    }
    return {{"edges", edges}, {"isolated_nodes", nodes}};
}

void run_vertices(const std::string& scenario_path, const std::string& engine_name,
                  long long budget_flag, bool as_json, const std::string& out_path) {
    const Scenario S = load_scenario(scenario_path);
    EnumOptions opts;
    opts.naive_budget = resolve_budget(budget_flag);
    if (engine_name == "naive") opts.engine = Engine::Naive;
    if (engine_name == "dd") opts.engine = Engine::DoubleDescription;
    const StandardFormPolytope P = build_polytope(S);
    const std::vector<Point> vertices = enumerate_vertices(P, opts);

    if (as_json) {
        json list = json::array();
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            list.push_back({{"index", i},
                            {"deterministic", deterministic_point(vertices[i])},
                            {"coordinates", point_json(vertices[i])}});
        }
        const json report = {{"command", "vertices"},
                             {"scenario", scenario_path},
                             {"variables", P.num_variables()},
                             {"count", vertices.size()},
                             {"vertices", list}};
        emit(out_path, report.dump(2) + "\n");
        return;
    }

    std::ostringstream out;
    out << "scenario " << scenario_path << "\n";
    out << "variables " << P.num_variables() << "\n";
    out << "count " << vertices.size() << "\n";
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        out << "vertex " << i << " "
            << (deterministic_point(vertices[i]) ? "deterministic" : "contextual") << "\n";
        for (Index j = 0; j < vertices[i].size(); ++j) {
            if (j > 0) out << " ";
            out << vertices[i](j);
        }
        out << "\n";
    }
    emit(out_path, out.str());
}

void run_check(const std::string& scenario_path, const std::string& dist_path, bool as_json,
               const std::string& out_path) {
    const Scenario S = load_scenario(scenario_path);
    const GraphDistribution p = load_distribution(dist_path, S);

    bool vertex = false;
    std::string method;
    std::string certificate;
    json details = json::object();

    if (is_dipole(S) || is_rose(S)) {
        const VertexCriterionReport report =
            is_dipole(S) ? dipole_is_vertex(p) : rose_is_vertex(p);
        vertex = report.vertex;
        method = is_dipole(S) ? "dipole criterion" : "rose criterion";
        certificate = report.text;
        json acyclic = json::array();
        for (const bool a : report.acyclic) acyclic.push_back(a);
        details["rank"] = report.rank;
        details["required_rank"] = report.required_rank;
        details["acyclic"] = acyclic;
    } else {
        const StandardFormPolytope P = build_polytope(S);
        const Point x = embed_distribution(p);
        vertex = is_vertex(P, x);
        method = "support rank";
        const Support s = support(x);
        RationalMatrix cols(P.equalities().rows(), static_cast<Index>(s.size()));
        for (std::size_t k = 0; k < s.size(); ++k) {
            cols.col(static_cast<Index>(k)) = P.equalities().col(s[k]);
        }
        const Index rank = matrix_rank(cols);
        std::ostringstream text;
        text << "support " << s.size() << "\n";
        text << "rank " << rank << "\n";
        text << "required " << s.size() << "\n";
        certificate = text.str();
        details["support"] = s.size();
        details["rank"] = rank;
        details["required_rank"] = s.size();
    }

    std::string classification = "unknown";
    try {
        classification = is_contextual(S, p) ? "contextual" : "noncontextual";
    } catch (const BudgetExceeded&) {
        classification = "skipped";
    }

    if (as_json) {
        json report = {{"command", "check"},
                       {"scenario", scenario_path},
                       {"distribution", dist_path},
                       {"verdict", vertex ? "vertex" : "not a vertex"},
                       {"method", method},
                       {"classification", classification},
                       {"certificate", certificate}};
        report.update(details);
        emit(out_path, report.dump(2) + "\n");
        return;
    }

    std::ostringstream out;
    out << "verdict " << (vertex ? "vertex" : "not a vertex") << "\n";
    out << "method " << method << "\n";
    out << "classification " << classification << "\n";
    out << certificate;
    if (!certificate.empty() && certificate.back() != '\n') out << "\n";
    emit(out_path, out.str());
}

void run_classify(const std::string& scenario_path, const std::string& dist_path, bool as_json,
                  const std::string& out_path) {
    const Scenario S = load_scenario(scenario_path);
    const GraphDistribution p = load_distribution(dist_path, S);
    const ContextualityWitness w = contextuality_witness(S, p);
    const std::vector<std::string> labels = coordinate_labels(S);

    if (as_json) {
        json report = {{"command", "classify"},
                       {"scenario", scenario_path},
                       {"distribution", dist_path},
                       {"classification", w.contextual ? "contextual" : "noncontextual"}};
        if (w.contextual) {
            json functional = json::object();
            for (Index i = 0; i < w.functional.size(); ++i) {
                if (w.functional(i) != 0) {
                    functional[labels[static_cast<std::size_t>(i)]] =
                        rational_text(w.functional(i));
                }
            }
            report["functional"] = functional;
            report["threshold"] = rational_text(w.threshold);
            report["value"] = rational_text(w.threshold + 1);
        } else {
            json terms = json::array();
            for (const ContextualityWitness::Term& term : w.decomposition) {
                json assignment = json::object();
                for (const auto& [node, outcome] : term.assignment) assignment[node] = outcome;
                terms.push_back(
                    {{"weight", rational_text(term.weight)}, {"assignment", assignment}});
            }
            report["terms"] = terms;
        }
        emit(out_path, report.dump(2) + "\n");
        return;
    }

    std::ostringstream out;
    out << "classification " << (w.contextual ? "contextual" : "noncontextual") << "\n";
    if (w.contextual) {
        out << "threshold " << w.threshold << "\n";
        out << "value " << w.threshold + 1 << "\n";
        for (Index i = 0; i < w.functional.size(); ++i) {
            if (w.functional(i) != 0) {
                out << "functional " << labels[static_cast<std::size_t>(i)] << " "
                    << w.functional(i) << "\n";
            }
        }
    } else {
        out << "terms " << w.decomposition.size() << "\n";
        for (const ContextualityWitness::Term& term : w.decomposition) {
            out << "term " << term.weight;
            for (const auto& [node, outcome] : term.assignment) {
                out << " " << node << "=" << outcome;
            }
            out << "\n";
        }
    }
    emit(out_path, out.str());
}

void run_count(const std::string& family_name_arg, int n, int m, bool tilde,
               const std::string& memo_dir, long long budget_flag, bool as_json,
               const std::string& out_path) {
    const Family family = family_name_arg == "rose" ? Family::Rose : Family::Dipole;
    const long long budget = resolve_budget(budget_flag);
    std::unique_ptr<CountStore> store;
    if (!memo_dir.empty()) store = std::make_unique<CountStore>(memo_dir);

    const CountReport report = kappa(family, n, m, store.get(), budget);
    std::optional<long long> tilde_value;
    if (tilde) tilde_value = kappa_tilde(family, n, m, store.get(), budget);

    if (as_json) {
        json j = {{"command", "count"},
                  {"family", family_name(family)},
                  {"n", n},
                  {"m", m},
                  {"total", report.total},
                  {"deterministic", report.deterministic},
                  {"contextual", report.contextual},
                  {"by_collapsed", report.by_collapsed},
                  {"by_collapsed_deterministic", report.by_collapsed_deterministic}};
        if (tilde_value) j["tilde"] = *tilde_value;
        emit(out_path, j.dump(2) + "\n");
        return;
    }

    std::ostringstream out;
    out << report.text;
    if (tilde_value) out << "tilde " << *tilde_value << "\n";
    emit(out_path, out.str());
}

long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long value = 1;
    for (int i = 1; i <= k; ++i) value = value * (n - k + i) / i;
    return value;
}

void run_bound(const std::vector<int>& bipartite, const std::string& scenario_path, int m_flag,
               const std::string& via, const std::string& memo_dir, bool as_json,
               const std::string& out_path) {
    if (bipartite.empty() == scenario_path.empty()) {
        throw std::runtime_error("bound: give either --bipartite N1 N2 or a scenario file");
    }
    std::unique_ptr<CountStore> store;
    if (!memo_dir.empty()) store = std::make_unique<CountStore>(memo_dir);

    std::ostringstream out;
    json j = {{"command", "bound"}, {"via", via}};

    if (!bipartite.empty()) {
        const int n1 = bipartite[0];
        const int n2 = bipartite[1];
        if (m_flag < 2) throw std::runtime_error("bound: --bipartite requires -m at least 2");
        j["graph"] = {{"complete_bipartite", {n1, n2}}};
        j["m"] = m_flag;
        if (via == "rose") {
            const long long bound = lower_bound_rose(n1, n2, m_flag, store.get());
            const int rank = (n1 - 1) * (n2 - 1);
            const Int trees = spanning_tree_count(complete_bipartite_scenario(n1, n2, m_flag));
            const long long tilde = kappa_tilde(Family::Rose, rank, m_flag, store.get());
            out << "bound " << bound << "\n";
            out << "via rose\n";
            out << "graph complete bipartite " << n1 << " " << n2 << "\n";
            out << "m " << m_flag << "\n";
            out << "cycle_rank " << rank << "\n";
            out << "spanning_trees " << trees << "\n";
            out << "tilde " << tilde << "\n";
            j["bound"] = bound;
            j["cycle_rank"] = rank;
            std::ostringstream trees_text;
            trees_text << trees;
            j["spanning_trees"] = trees_text.str();
            j["tilde"] = tilde;
        } else {
            const long long bound = lower_bound_dipole(n1, n2, m_flag, store.get());
            out << "bound " << bound << "\n";
            out << "via dipole\n";
            out << "graph complete bipartite " << n1 << " " << n2 << "\n";
            out << "m " << m_flag << "\n";
            json terms = json::array();
            for (int k = 1; k < n1; ++k) {
                for (int r = 1; r < n2; ++r) {
                    const int crossing = k * (n2 - r) + (n1 - k) * r;
                    const long long ways = binomial(n1, k) * binomial(n2, r);
                    const long long tilde =
                        kappa_tilde(Family::Dipole, crossing, m_flag, store.get());
                    out << "term split " << k << " " << r << " ways " << ways << " crossing "
                        << crossing << " tilde " << tilde << " contribution " << ways * tilde
                        << "\n";
                    terms.push_back({{"split", {k, r}},
                                     {"ways", ways},
                                     {"crossing", crossing},
                                     {"tilde", tilde},
                                     {"contribution", ways * tilde}});
                }
            }
            j["bound"] = bound;
            j["terms"] = terms;
        }
    } else {
        if (via == "dipole") {
            throw std::runtime_error("bound: the dipole route needs --bipartite");
        }
        const Scenario S = load_scenario(scenario_path);
        const int m = m_flag >= 2 ? m_flag : S.outcomes();
        const long long bound = general_lower_bound(S, m, store.get());
        const Int trees = spanning_tree_count(S);
        const long long rank = static_cast<long long>(S.edges().size()) -
                               static_cast<long long>(S.nodes().size()) + 1;
        out << "bound " << bound << "\n";
        out << "via rose\n";
        out << "scenario " << scenario_path << "\n";
        out << "m " << m << "\n";
        out << "cycle_rank " << rank << "\n";
        out << "spanning_trees " << trees << "\n";
        if (rank > 0) {
            out << "tilde " << kappa_tilde(Family::Rose, static_cast<int>(rank), m, store.get())
                << "\n";
        }
        j["scenario"] = scenario_path;
        j["m"] = m;
        j["bound"] = bound;
        j["cycle_rank"] = rank;
        std::ostringstream trees_text;
        trees_text << trees;
        j["spanning_trees"] = trees_text.str();
    }

    emit(out_path, as_json ? j.dump(2) + "\n" : out.str());
}

void run_collapse(const std::string& scenario_path, const std::vector<std::string>& edges,
                  bool as_json, const std::string& out_path) {
    const Scenario S = load_scenario(scenario_path);
    const CollapseMap cm = collapse(S, edges);

    if (as_json) {
        json node_projection = json::object();
        for (const auto& [from, to] : cm.node_projection) node_projection[from] = to;
        json edge_projection = json::object();
        for (const auto& [from, to] : cm.edge_projection) edge_projection[from] = to;
        const json report = {{"command", "collapse"},
                             {"collapsed", cm.collapsed_edges},
                             {"quotient", scenario_json(cm.quotient)},
                             {"node_projection", node_projection},
                             {"edge_projection", edge_projection}};
        emit(out_path, report.dump(2) + "\n");
        return;
    }

    emit(out_path, format_scenario(cm.quotient));
}

void run_construct(const std::string& scenario_path, const std::string& input_path, bool as_json,
                   const std::string& out_path) {
    const Scenario S = load_scenario(scenario_path);
    std::ifstream in(input_path);
    if (!in.good()) throw std::runtime_error("cannot open '" + input_path + "'");
    const ConstructionInput input = parse_construction(in, S);
    const GraphDistribution p = construct_vertex_from_a_sets(S, input);

    if (as_json) {
        const json report = {{"command", "construct"},
                             {"scenario", scenario_path},
                             {"vertex", true},
                             {"distribution", distribution_json(p)}};
        emit(out_path, report.dump(2) + "\n");
        return;
    }

    emit(out_path, format_distribution(p));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact vertex analysis of graph distribution polytopes"};
    app.require_subcommand(1);

    bool as_json = false;
    std::string out_path;
    long long budget_flag = -1;

    std::string vertices_scenario;
    std::string engine = "auto";
    CLI::App* vertices_cmd =
        app.add_subcommand("vertices", "enumerate the vertices of a scenario's polytope");
    vertices_cmd->add_option("scenario", vertices_scenario, "scenario file")
        ->required()
        ->check(CLI::ExistingFile);
    vertices_cmd->add_option("--engine", engine, "enumeration engine")
        ->check(CLI::IsMember({"auto", "naive", "dd"}));
    vertices_cmd->add_option("--budget", budget_flag, "naive engine work budget");
    vertices_cmd->add_flag("--json", as_json, "emit JSON");
    vertices_cmd->add_option("-o,--output", out_path, "write the report here");

    std::string check_scenario;
    std::string check_dist;
    CLI::App* check_cmd =
        app.add_subcommand("check", "certify whether a distribution is a vertex");
    check_cmd->add_option("scenario", check_scenario, "scenario file")
        ->required()
        ->check(CLI::ExistingFile);
    check_cmd->add_option("distribution", check_dist, "distribution file")
        ->required()
        ->check(CLI::ExistingFile);
    check_cmd->add_flag("--json", as_json, "emit JSON");
    check_cmd->add_option("-o,--output", out_path, "write the report here");

    std::string classify_scenario;
    std::string classify_dist;
    CLI::App* classify_cmd =
        app.add_subcommand("classify", "decide contextuality with a checkable witness");
    classify_cmd->add_option("scenario", classify_scenario, "scenario file")
        ->required()
        ->check(CLI::ExistingFile);
    classify_cmd->add_option("distribution", classify_dist, "distribution file")
        ->required()
        ->check(CLI::ExistingFile);
    classify_cmd->add_flag("--json", as_json, "emit JSON");
    classify_cmd->add_option("-o,--output", out_path, "write the report here");

    std::string count_family;
    int count_n = 0;
    int count_m = 0;
    bool count_tilde = false;
    std::string memo_dir;
    CLI::App* count_cmd = app.add_subcommand("count", "census of a family polytope's vertices");
    count_cmd->add_option("--family", count_family, "rose or dipole")
        ->required()
        ->check(CLI::IsMember({"rose", "dipole"}));
    count_cmd->add_option("-n", count_n, "number of edges")->required();
    count_cmd->add_option("-m", count_m, "number of outcomes")->required();
    count_cmd->add_flag("--tilde", count_tilde, "also report the no-collapsed contextual count");
    count_cmd->add_option("--memo", memo_dir, "directory for memoized censuses");
    count_cmd->add_option("--budget", budget_flag, "support search work budget");
    count_cmd->add_flag("--json", as_json, "emit JSON");
    count_cmd->add_option("-o,--output", out_path, "write the report here");

    std::vector<int> bound_bipartite;
    std::string bound_scenario;
    int bound_m = 0;
    std::string bound_via = "rose";
    CLI::App* bound_cmd =
        app.add_subcommand("bound", "contextual-vertex lower bound for a graph");
    bound_cmd->add_option("scenario", bound_scenario, "scenario file")
        ->check(CLI::ExistingFile);
    bound_cmd->add_option("--bipartite", bound_bipartite, "complete bipartite sides")
        ->expected(2);
    bound_cmd->add_option("-m", bound_m, "number of outcomes");
    bound_cmd->add_option("--via", bound_via, "quotient family")
        ->check(CLI::IsMember({"rose", "dipole"}));
    bound_cmd->add_option("--memo", memo_dir, "directory for memoized censuses");
    bound_cmd->add_flag("--json", as_json, "emit JSON");
    bound_cmd->add_option("-o,--output", out_path, "write the report here");

    std::string collapse_scenario;
    std::vector<std::string> collapse_edges;
    CLI::App* collapse_cmd =
        app.add_subcommand("collapse", "contract a forest of edges to a quotient scenario");
    collapse_cmd->add_option("scenario", collapse_scenario, "scenario file")
        ->required()
        ->check(CLI::ExistingFile);
    collapse_cmd->add_option("--edges", collapse_edges, "edge ids to contract")
        ->required()
        ->delimiter(',');
    collapse_cmd->add_flag("--json", as_json, "emit JSON");
    collapse_cmd->add_option("-o,--output", out_path, "write the quotient here");

    std::string construct_scenario;
    std::string construct_input;
    CLI::App* construct_cmd =
        app.add_subcommand("construct", "build a vertex from a support description");
    construct_cmd->add_option("scenario", construct_scenario, "scenario file")
        ->required()
        ->check(CLI::ExistingFile);
    construct_cmd->add_option("input", construct_input, "support description file")
        ->required()
        ->check(CLI::ExistingFile);
    construct_cmd->add_flag("--json", as_json, "emit JSON");
    construct_cmd->add_option("-o,--output", out_path, "write the distribution here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (vertices_cmd->parsed()) {
            run_vertices(vertices_scenario, engine, budget_flag, as_json, out_path);
        } else if (check_cmd->parsed()) {
            run_check(check_scenario, check_dist, as_json, out_path);
        } else if (classify_cmd->parsed()) {
            run_classify(classify_scenario, classify_dist, as_json, out_path);
        } else if (count_cmd->parsed()) {
            run_count(count_family, count_n, count_m, count_tilde, memo_dir, budget_flag,
                      as_json, out_path);
        } else if (bound_cmd->parsed()) {
            run_bound(bound_bipartite, bound_scenario, bound_m, bound_via, memo_dir, as_json,
                      out_path);
        } else if (collapse_cmd->parsed()) {
            run_collapse(collapse_scenario, collapse_edges, as_json, out_path);
        } else if (construct_cmd->parsed()) {
            run_construct(construct_scenario, construct_input, as_json, out_path);
        }
        return 0;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
