#include "gdp/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace gdp {

namespace {

Int parse_integer(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty integer in rational literal");
    std::size_t start = (text[0] == '-' || text[0] == '+') ? 1 : 0;
    if (start == text.size()) throw std::invalid_argument("sign without digits in rational literal");
    for (std::size_t i = start; i < text.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
            throw std::invalid_argument("invalid character in rational literal: '" + text + "'");
        }
    }
    return Int(text);
}

}  // namespace

Rational parse_rational(const std::string& token) {
    const std::size_t slash = token.find('/');
    if (slash == std::string::npos) {
        return Rational(parse_integer(token));
    }
    if (token.find('/', slash + 1) != std::string::npos) {
        throw std::invalid_argument("multiple '/' in rational literal: '" + token + "'");
    }
    const Int num = parse_integer(token.substr(0, slash));
    const Int den = parse_integer(token.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in rational literal: '" + token + "'");
    return Rational(num) / Rational(den);
}

std::string to_string(const Rational& value) {
    const Int num = numerator(value);
    const Int den = denominator(value);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

}  // namespace gdp
