#include "pqlab/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <vector>

namespace pqlab {

double log_integral_monotone(const std::function<double(double)>& log_f, double t, double rel_tol) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (!(t > 0.0)) return kNegInf;
  double top = log_f(t);
  if (!std::isfinite(top)) return top;
  auto scaled = [&](double s) {
    double l = log_f(s) - top;
    return l < -745.0 ? 0.0 : std::exp(l);
  };

  // pieces are short and smooth, so a shallow recursion suffices
  // dyadic cuts toward 0 plus the points where the integrand drops by e^{1/2}, e, e^2, ..., e^1024
  std::vector<double> cuts;
  for (int j = 40; j >= 1; --j) cuts.push_back(t * std::ldexp(0.5, -j));
  for (int k = -1; k <= 10; ++k) {
    double level = top - std::ldexp(1.0, k);
    if (!(log_f(0.0) < level)) continue;
    double lo = 0.0, hi = t;
    for (int it = 0; it < 100 && hi - lo > t * 1e-16; ++it) {
      double mid = 0.5 * (lo + hi);
      (log_f(mid) < level ? lo : hi) = mid;
    }
    cuts.push_back(lo);
    cuts.push_back(hi);
  }
  if (t > 1.0) cuts.push_back(1.0);
  cuts.push_back(t);
  std::sort(cuts.begin(), cuts.end());

  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  double sum = 0.0;
  double lo = 0.0;
  for (double hi : cuts) {
    if (!(hi > lo)) continue;
    double err = 0.0;
    sum += GK::integrate(scaled, lo, hi, 4, rel_tol, &err);
    lo = hi;
  }
  if (!(sum > 0.0)) return kNegInf;
  return std::log(sum) + top;
}

}  // namespace pqlab
