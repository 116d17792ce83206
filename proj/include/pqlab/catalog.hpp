#pragma once

#include "pqlab/exponents.hpp"
#include "pqlab/growth.hpp"
#include "pqlab/integrand.hpp"

namespace pqlab {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

// Range of a coefficient over the closed disk, padded by L times the sampling step.
Range coefficient_range(const Coefficient& c, Point center, double R, int samples = 41);

// Growth functions for each family, valid on the given ball.
GrowthTriple catalog_triple(const Family& f, Point center, double R, double omega = 0.01);

// max/min ratio of the coefficient that sets the growth exponent, if the family has one.
std::optional<double> coefficient_theta(const Family& f, Point center, double R);

ParamsResult auto_params(const Family& f, Point center, double R, int n, double omega = 0.01);

}  // namespace pqlab
