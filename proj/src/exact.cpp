#include "pqlab/exact.hpp"

#include <cmath>
#include <stdexcept>

namespace pqlab {

using boost::multiprecision::cpp_int;

Rational exact(double v) {
  if (!std::isfinite(v)) throw std::domain_error("exact(): non-finite value");
  if (v == 0.0) return Rational(0);
  int e = 0;
  double m = std::frexp(v, &e);
  // m in [0.5,1): scale to a 53-bit integer
  double mi = std::ldexp(m, 53);
  cpp_int num(static_cast<long long>(mi));
  e -= 53;
  if (e >= 0) return Rational(num << e);
  cpp_int den = cpp_int(1) << (-e);
  return Rational(num, den);
}

bool strictly_less(const Rational& a, const Rational& b) {
  Rational mag = abs(b);
  if (mag < 1) mag = 1;
  return a < b - exact(1e-12) * mag;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace pqlab
