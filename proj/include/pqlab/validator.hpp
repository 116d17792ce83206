#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pqlab/exponents.hpp"
#include "pqlab/solver.hpp"

namespace pqlab {

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Problem {
  Grid grid;
  Family family;
  SolveOptions opts;
};

struct MeasureRecord {
  double amplitude = 1.0;
  double sup_grad2 = 0.0;
  double energy_R = 0.0;
  double w22 = 0.0;
  double v_integral = 0.0;
  double rho = 0.0;
  double R = 0.0;
  double c_hat = 0.0;
  double c_hat_V = 0.0;
  double c_hat_w22 = 0.0;
};

MeasureRecord measure(const Grid& g, const Family& f, const DiscreteField& u, const MoserSchedule& s, const Ball& b);

// Errors if the coefficient ratio on B_R exceeds the one the schedule was built for.
void enforce_radius(const Family& f, const MoserSchedule& s, const Ball& b);

struct SweepFailure {
  double amplitude = 0.0;
  std::string message;
};

struct EstimateReport {
  std::vector<MeasureRecord> records;
  std::vector<SweepFailure> failures;
  std::vector<std::string> warnings;
  double theta1 = 0.0, theta2 = 0.0, theta3 = 0.0, theta4 = 0.0;
  bool fitted = false;
  double s1 = 0.0;
  std::optional<double> s3;
  bool s1_pass = false;
  bool s3_pass = false;
  double spread = 0.0;
  bool spread_pass = false;
  double spread_V = 0.0;
  bool all_energy_descent = true;
  bool nested_monotone = true;

  bool pass() const { return fitted && failures.empty() && s1_pass && s3_pass && spread_pass; }
};

// Least squares slope of y on x, skipping pairs with a nonpositive value.
std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// max/min over nonzero entries; 1 when fewer than one nonzero
double ratio_spread(const std::vector<double>& v);

EstimateReport sweep_amplitudes(const Problem& tmpl, const std::vector<double>& amplitudes, const MoserSchedule& s,
                                const Ball& b);

struct RadiusRow {
  double rho = 0.0;
  double sup_grad2 = 0.0;
  double normalized = 0.0;
};

struct RadiusReport {
  std::vector<RadiusRow> rows;
  bool monotone = true;
  double spread = 0.0;
  bool bounded = false;
  bool pass() const { return monotone && bounded; }
};

RadiusReport radius_sweep(const Grid& g, const DiscreteField& u, const MoserSchedule& s,
                          const std::vector<std::pair<double, double>>& pairs, std::optional<Point> center = {});

struct SecondDerivativeRecord {
  double w22 = 0.0;
  double c_hat = 0.0;
  int contributing_nodes = 0;
  std::optional<double> g1_at_zero;
  double d2_integral = 0.0;
  double c_hat_unweighted = 0.0;
};

SecondDerivativeRecord second_derivative_check(const Grid& g, const Family& f, const DiscreteField& u,
                                               const MoserSchedule& s, const Ball& b);

// sup |Du| over B_r for each r, ascending
std::vector<double> nested_sups(const Grid& g, const DiscreteField& u, Point center, const std::vector<double>& radii);

std::string format_report(const EstimateReport& r);
std::string format_radius_report(const RadiusReport& r);

}  // namespace pqlab
