#pragma once

#include <functional>

namespace pqlab {

// log of the integral over [0, t] of exp(log_f(s)); log_f must be nondecreasing in s.
double log_integral_monotone(const std::function<double(double)>& log_f, double t, double rel_tol = 1e-11);

}  // namespace pqlab
