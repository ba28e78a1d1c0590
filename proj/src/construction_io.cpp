#include "gdp/criteria.hpp"

#include <cctype>
#include <istream>
#include <string>
#include <vector>

namespace gdp {

namespace {

struct Token {
    std::string text;
    int line = 0;
    int column = 0;  // 1-based
};

std::vector<Token> tokenize(std::istream& in) {
    std::vector<Token> out;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::size_t i = 0;
        while (i < raw.size()) {
            if (std::isspace(static_cast<unsigned char>(raw[i]))) {
                ++i;
                continue;
            }
            const std::size_t start = i;
            while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
            out.push_back({raw.substr(start, i - start), line, static_cast<int>(start) + 1});
        }
    }
    return out;
}

int parse_int(const Token& tok, const std::string& text, std::size_t& at) {
    const std::size_t start = at;
    while (at < text.size() && std::isdigit(static_cast<unsigned char>(text[at]))) ++at;
    if (at == start) {
        throw ParseError("expected an outcome number", tok.line,
                         tok.column + static_cast<int>(start));
    }
    return std::stoi(text.substr(start, at - start));
}

}  // namespace

ConstructionInput parse_construction(std::istream& in, const Scenario& S) {
    const int m = S.outcomes();
    ConstructionInput input;
    enum class Kind { Unknown, Tuple, MappedTuple, Cycle };
    Kind kind = Kind::Unknown;

    const std::vector<Token> tokens = tokenize(in);
    std::size_t t = 0;
    while (t < tokens.size()) {
        const Token& key = tokens[t];
        if (key.text != "set") {
            throw ParseError("expected 'set'", key.line, key.column);
        }
        ++t;
        std::vector<ProductSimplexVertex> set;
        std::vector<CyclePerm> lift;
        std::vector<int> map;
        bool any = false;
        while (t < tokens.size() && tokens[t].text != "set") {
            const Token& tok = tokens[t];
            const std::string& text = tok.text;
            any = true;
            if (text.front() == '(') {
                if (kind == Kind::Cycle) {
                    throw ParseError("cycle and tuple elements cannot be mixed", tok.line,
                                     tok.column);
                }
                std::size_t at = 1;
                std::vector<int> entries;
                while (true) {
                    entries.push_back(parse_int(tok, text, at));
                    if (at < text.size() && text[at] == ',') {
                        ++at;
                        continue;
                    }
                    break;
                }
                if (at >= text.size() || text[at] != ')') {
                    throw ParseError("expected ')'", tok.line, tok.column + static_cast<int>(at));
                }
                ++at;
                if (at < text.size() && text[at] == '>') {
                    ++at;
                    const int target = parse_int(tok, text, at);
                    if (kind == Kind::Tuple) {
                        throw ParseError("either every element or none carries '>'", tok.line,
                                         tok.column);
                    }
                    kind = Kind::MappedTuple;
                    map.push_back(target);
                } else if (kind == Kind::MappedTuple) {
                    throw ParseError("either every element or none carries '>'", tok.line,
                                     tok.column);
                } else {
                    kind = Kind::Tuple;
                }
                if (at != text.size()) {
                    throw ParseError("trailing characters after element", tok.line,
                                     tok.column + static_cast<int>(at));
                }
                set.push_back({std::move(entries), m});
            } else if (text.front() == '[') {
                if (kind == Kind::Tuple || kind == Kind::MappedTuple) {
                    throw ParseError("cycle and tuple elements cannot be mixed", tok.line,
                                     tok.column);
                }
                kind = Kind::Cycle;
                std::size_t at = 1;
                CyclePerm mu;
                while (true) {
                    mu.push_back(parse_int(tok, text, at));
                    if (at < text.size() && text[at] == ',') {
                        ++at;
                        continue;
                    }
                    break;
                }
                if (at >= text.size() || text[at] != ']') {
                    throw ParseError("expected ']'", tok.line, tok.column + static_cast<int>(at));
                }
                ++at;
                if (at != text.size()) {
                    throw ParseError("trailing characters after element", tok.line,
                                     tok.column + static_cast<int>(at));
                }
                lift.push_back(std::move(mu));
            } else {
                throw ParseError("expected '(' or '['", tok.line, tok.column);
            }
            ++t;
        }
        if (!any) {
            throw ParseError("'set' line without elements", key.line, key.column);
        }
        if (kind == Kind::Cycle) {
            input.lifts.push_back(std::move(lift));
        } else {
            input.sets.push_back(std::move(set));
            if (kind == Kind::MappedTuple) input.outcome_maps.push_back(std::move(map));
        }
    }
    if (tokens.empty()) {
        throw ParseError("construction input is empty", 1, 1);
    }
    return input;
}

}  // namespace gdp
