#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace dstab {

// Exact stoichiometric coefficients. Cycle labels are compared for exact
// equality, so nothing on the structural side ever goes through floating point.
using Rational = boost::multiprecision::cpp_rational;

// Accepts "3", "1/2" and finite decimals such as "0.5" or "2.25" (converted
// exactly). Throws std::invalid_argument on anything else.
Rational parse_rational(std::string_view text);

// "3" or "1/2"; parse_rational(to_string(q)) == q.
std::string to_string(const Rational& q);

double to_double(const Rational& q);

}  // namespace dstab
