#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pqlab/expr.hpp"
#include "pqlab/grid.hpp"
#include "pqlab/integrand.hpp"
#include "pqlab/solver.hpp"

namespace pqlab {

struct ScheduleSpec {
  bool automatic = true;
  int n = 2;
  double omega = 0.01;
  std::optional<double> two_star;
  std::optional<double> alpha, beta, gamma, delta;
  std::optional<double> nu;
  std::optional<double> mu;  // empty with mu_unbounded set: explicit infinity
  bool mu_unbounded = false;
  std::optional<double> theta;
};

struct SweepSpec {
  std::vector<double> amplitudes;
  std::vector<std::pair<double, double>> pairs;
};

struct CheckSpec {
  int directions = 6;
  double tol = 1e-9;
  double fd_tol = 1e-6;
};

struct ProblemConfig {
  Family family;
  int N = 33;
  double side = 1.0;
  double x0 = 0.0, y0 = 0.0;
  Expr boundary;
  std::optional<Point> center;
  double rho = 0.2;
  double R = 0.4;
  ScheduleSpec schedule;
  SweepSpec sweep;
  SolveOptions solver;
  CheckSpec check;
  std::uint64_t seed = 1;

  Grid grid() const;
  Point ball_center() const;
};

// Sectioned key = value text; throws ParseError with line and column.
ProblemConfig parse_config(const std::string& text);
ProblemConfig load_config(const std::string& path);

}  // namespace pqlab
