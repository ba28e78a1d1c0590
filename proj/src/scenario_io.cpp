#include "gdp/scenario.hpp"

#include <cctype>
#include <istream>
#include <map>
#include <set>
#include <sstream>

namespace gdp {

ParseError::ParseError(const std::string& message, int line_, int column_)
    : std::runtime_error("line " + std::to_string(line_) + ", column " + std::to_string(column_) +
                         ": " + message),
      line(line_),
      column(column_) {}

namespace {

struct Token {
    std::string text;
    int column;  // 1-based
};

struct Row {
    std::vector<Token> tokens;
    int line;  // 1-based
};

std::vector<Row> tokenize(std::istream& in) {
    std::vector<Row> rows;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        Row row;
        row.line = line;
        std::size_t i = 0;
        while (i < raw.size()) {
            if (std::isspace(static_cast<unsigned char>(raw[i]))) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < raw.size() && !std::isspace(static_cast<unsigned char>(raw[j]))) ++j;
            row.tokens.push_back({raw.substr(i, j - i), static_cast<int>(i) + 1});
            i = j;
        }
        if (!row.tokens.empty()) rows.push_back(std::move(row));
    }
    return rows;
}

int parse_outcomes(const Row& row) {
    if (row.tokens.size() != 2 || row.tokens[0].text != "outcomes") {
        throw ParseError("expected header 'outcomes <m>'", row.line,
                         row.tokens.empty() ? 1 : row.tokens[0].column);
    }
    const std::string& text = row.tokens[1].text;
    for (char c : text) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            throw ParseError("outcome count must be a positive integer", row.line,
                             row.tokens[1].column);
        }
    }
    const long m = std::stol(text);
    if (m < 2) {
        throw ParseError("outcome count must be at least 2", row.line, row.tokens[1].column);
    }
    return static_cast<int>(m);
}

Rational parse_rational_token(const Token& tok, int line) {
    try {
        return parse_rational(tok.text);
    } catch (const std::invalid_argument& err) {
        throw ParseError(err.what(), line, tok.column);
    }
}

}  // namespace

Scenario parse_scenario(std::istream& in) {
    const std::vector<Row> rows = tokenize(in);
    if (rows.empty()) throw ParseError("empty scenario file", 1, 1);
    const int m = parse_outcomes(rows[0]);

    std::vector<std::string> nodes;
    std::set<std::string> node_set;
    std::vector<Edge> edges;
    std::set<std::string> edge_set;
    std::vector<Row> edge_rows;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const Row& row = rows[r];
        const std::string& kw = row.tokens[0].text;
        if (kw == "node") {
            if (row.tokens.size() != 2) {
                throw ParseError("expected 'node <id>'", row.line, row.tokens[0].column);
            }
            if (!node_set.insert(row.tokens[1].text).second) {
                throw ParseError("duplicate node id '" + row.tokens[1].text + "'", row.line,
                                 row.tokens[1].column);
            }
            nodes.push_back(row.tokens[1].text);
        } else if (kw == "edge") {
            if (row.tokens.size() != 4) {
                throw ParseError("expected 'edge <id> <source> <target>'", row.line,
                                 row.tokens[0].column);
            }
            if (!edge_set.insert(row.tokens[1].text).second) {
                throw ParseError("duplicate edge id '" + row.tokens[1].text + "'", row.line,
                                 row.tokens[1].column);
            }
            edges.push_back({row.tokens[1].text, row.tokens[2].text, row.tokens[3].text});
            edge_rows.push_back(row);
        } else {
            throw ParseError("unknown directive '" + kw + "'", row.line, row.tokens[0].column);
        }
    }
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (!node_set.count(edges[e].source)) {
            throw ParseError("edge '" + edges[e].id + "' references unknown node '" +
                                 edges[e].source + "'",
                             edge_rows[e].line, edge_rows[e].tokens[2].column);
        }
        if (!node_set.count(edges[e].target)) {
            throw ParseError("edge '" + edges[e].id + "' references unknown node '" +
                                 edges[e].target + "'",
                             edge_rows[e].line, edge_rows[e].tokens[3].column);
        }
    }
    return {std::move(nodes), std::move(edges), m};
}

GraphDistribution parse_distribution(std::istream& in, const Scenario& S) {
    const std::vector<Row> rows = tokenize(in);
    const Index m = S.outcomes();

    std::map<std::string, RationalMatrix> matrices;
    std::map<std::string, RationalVector> node_vectors;
    std::size_t r = 0;
    while (r < rows.size()) {
        const Row& head = rows[r];
        const std::string& kw = head.tokens[0].text;
        if (kw == "edge") {
            if (head.tokens.size() != 2) {
                throw ParseError("expected 'edge <id>'", head.line, head.tokens[0].column);
            }
            const std::string& id = head.tokens[1].text;
            bool known = false;
            for (const Edge& e : S.edges()) {
                if (e.id == id) known = true;
            }
            if (!known) {
                throw ParseError("unknown edge '" + id + "'", head.line, head.tokens[1].column);
            }
            if (matrices.count(id)) {
                throw ParseError("duplicate block for edge '" + id + "'", head.line,
                                 head.tokens[1].column);
            }
            RationalMatrix mat(m, m);
            for (Index a = 0; a < m; ++a) {
                if (r + 1 >= rows.size()) {
                    throw ParseError("edge '" + id + "': expected " + std::to_string(m) +
                                         " matrix rows",
                                     head.line, head.tokens[0].column);
                }
                const Row& mrow = rows[++r];
                if (static_cast<Index>(mrow.tokens.size()) != m) {
                    throw ParseError("edge '" + id + "': expected " + std::to_string(m) +
                                         " entries in matrix row",
                                     mrow.line, mrow.tokens[0].column);
                }
                for (Index bcol = 0; bcol < m; ++bcol) {
                    mat(a, bcol) =
                        parse_rational_token(mrow.tokens[static_cast<std::size_t>(bcol)], mrow.line);
                }
            }
            matrices[id] = std::move(mat);
            ++r;
        } else if (kw == "node") {
            if (head.tokens.size() != 2) {
                throw ParseError("expected 'node <id>'", head.line, head.tokens[0].column);
            }
            const std::string& id = head.tokens[1].text;
            bool known = false;
            for (const std::string& v : S.nodes()) {
                if (v == id) known = true;
            }
            if (!known) {
                throw ParseError("unknown node '" + id + "'", head.line, head.tokens[1].column);
            }
            if (node_vectors.count(id)) {
                throw ParseError("duplicate block for node '" + id + "'", head.line,
                                 head.tokens[1].column);
            }
            if (r + 1 >= rows.size()) {
                throw ParseError("node '" + id + "': expected a row of " + std::to_string(m) +
                                     " entries",
                                 head.line, head.tokens[0].column);
            }
            const Row& vrow = rows[++r];
            if (static_cast<Index>(vrow.tokens.size()) != m) {
                throw ParseError("node '" + id + "': expected " + std::to_string(m) + " entries",
                                 vrow.line, vrow.tokens[0].column);
            }
            RationalVector q(m);
            for (Index a = 0; a < m; ++a) {
                q(a) = parse_rational_token(vrow.tokens[static_cast<std::size_t>(a)], vrow.line);
            }
            node_vectors[id] = std::move(q);
            ++r;
        } else {
            throw ParseError("unknown directive '" + kw + "'", head.line, head.tokens[0].column);
        }
    }

    const int last_line = rows.empty() ? 1 : rows.back().line;
    std::vector<RationalMatrix> mats;
    for (const Edge& e : S.edges()) {
        const auto it = matrices.find(e.id);
        if (it == matrices.end()) {
            throw ParseError("missing matrix for edge '" + e.id + "'", last_line, 1);
        }
        mats.push_back(it->second);
    }
    return {S, std::move(mats), std::move(node_vectors)};
}

std::string format_scenario(const Scenario& S) {
    std::ostringstream out;
    out << "outcomes " << S.outcomes() << "\n";
    for (const std::string& v : S.nodes()) out << "node " << v << "\n";
    for (const Edge& e : S.edges()) {
        out << "edge " << e.id << " " << e.source << " " << e.target << "\n";
    }
    return out.str();
}

std::string format_distribution(const GraphDistribution& p) {
    const Scenario& S = p.scenario();
    const Index m = S.outcomes();
    std::ostringstream out;
    for (const Edge& e : S.edges()) {
        out << "edge " << e.id << "\n";
        const RationalMatrix& mat = p.edge_matrix(e.id);
        for (Index a = 0; a < m; ++a) {
            for (Index b = 0; b < m; ++b) {
                if (b) out << " ";
                out << to_string(mat(a, b));
            }
            out << "\n";
        }
    }
    for (const std::string& v : S.nodes()) {
        if (!S.node_is_isolated(v)) continue;
        out << "node " << v << "\n";
        const RationalVector& q = p.node_vector(v);
        for (Index a = 0; a < m; ++a) {
            if (a) out << " ";
            out << to_string(q(a));
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace gdp
