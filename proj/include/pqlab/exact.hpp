#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace pqlab {

using Rational = boost::multiprecision::cpp_rational;

// Exact value of the binary double.
Rational exact(double v);

// a < b with a guard band of 1e-12*max(1,|b|), decided in rational arithmetic.
bool strictly_less(const Rational& a, const Rational& b);
inline bool strictly_less(double a, double b) { return strictly_less(exact(a), exact(b)); }

double to_double(const Rational& r);

}  // namespace pqlab
