#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pqlab/integrand.hpp"

namespace pqlab {

struct ExponentParams;

// Monotone function on [0, inf), stored through its logarithm (-inf encodes 0).
struct GrowthFunction {
  std::function<double(double)> log_eval;
  std::string label;

  double operator()(double t) const;
  static GrowthFunction from_linear(std::function<double(double)> g, std::string label = "");
};

GrowthFunction gf_power(double c, double e);           // c t^e
GrowthFunction gf_one_plus_power(double c, double e);  // c (1 + t^e)
GrowthFunction gf_shifted_power(double c, double e);   // c (1 + t)^e

struct GrowthTriple {
  GrowthFunction g1, g2, g3;
  std::optional<double> M;
  // log of the closed-form antiderivative of sqrt(g1) from 0
  std::function<double(double)> log_sqrt_g1_integral;
};

std::vector<std::string> validate_triple(const GrowthTriple& tr, const std::vector<double>& ts);

// log of 1 + integral_0^t sqrt(g1)
double log_one_plus_sqrt_g1_integral(const GrowthTriple& tr, double t);
double log_sqrt_g1_integral_quadrature(const GrowthFunction& g1, double t);

enum class Verdict { pass, fail, inconclusive };
const char* verdict_name(Verdict v);

struct ConditionReport {
  std::string id;
  Verdict verdict = Verdict::inconclusive;
  double worst_ratio = 0.0;
  double worst_t = 0.0;
  std::optional<double> tail_limit_estimate;
  bool tail_diverging = false;
  double fitted_M = 0.0;
  std::string note;
};

struct SampleSpec {
  std::vector<Point> xs{{0.0, 0.0}};
  std::vector<double> ts;
  int directions = 6;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  double fd_tol = 1e-6;
};

std::vector<double> default_t_grid();
SampleSpec ball_sample_spec(Point center, double R, std::uint64_t seed = 1);

struct ProbeSpec {
  std::vector<double> ts{1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
  bool escalate = false;
};

struct TailResult {
  double estimate = 0.0;
  bool stabilized = false;
  bool diverging = false;
};

TailResult tail_limit(const std::function<double(double)>& h, double t0, const ProbeSpec& spec = {});
TailResult tail_limit_log(const std::function<double(double)>& log_h, double t0, const ProbeSpec& spec = {});

ConditionReport check_ellipticity_sandwich(const Family& f, const GrowthTriple& tr, const SampleSpec& spec);
ConditionReport check_growth_A(const Family& f, const GrowthTriple& tr, const SampleSpec& spec);
ConditionReport check_11M(const GrowthTriple& tr, const ExponentParams& params, const std::vector<double>& ts);
ConditionReport check_12M(const Family& f, const GrowthTriple& tr, const ExponentParams& params,
                          const SampleSpec& spec);
ConditionReport check_A3(const GrowthTriple& tr, const ExponentParams& params, const std::vector<double>& ts);

struct ExponentBoundsReport {
  ConditionReport alpha;
  ConditionReport beta;
  Verdict verdict = Verdict::fail;
  double beta_upper = 0.0;  // +inf when vacuous
};

ExponentBoundsReport check_exponent_bounds(const ExponentParams& params);

std::string format_report_row(const ConditionReport& r);

}  // namespace pqlab
