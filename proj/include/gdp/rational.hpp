#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>

namespace gdp {

using Int = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

// Parses "5", "-5", "3/4", "-3/4". Throws std::invalid_argument on malformed
// input, including zero denominators. Values always come out in lowest terms
// with a positive denominator (mpq canonical form).
Rational parse_rational(const std::string& token);

// Inverse of parse_rational: "num/den", or plain "num" when den == 1.
std::string to_string(const Rational& value);

}  // namespace gdp
