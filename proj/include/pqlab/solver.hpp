#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pqlab/grid.hpp"
#include "pqlab/integrand.hpp"

namespace pqlab {

// Per-cell densities and deterministic energy/gradient kernels for one grid and family.
class Assembler {
 public:
  Assembler(const Grid& g, const Family& f);

  double energy(const DiscreteField& u, double eps = 0.0) const;
  std::vector<double> gradient(const DiscreteField& u, double eps = 0.0) const;
  // E(u + a d) - E(u), computed without cancellation
  double energy_delta(const DiscreteField& u, const std::vector<double>& d, double a, double eps = 0.0) const;
  // largest a(x)|Du|^tau over cells; zero for non-exponential families
  double max_exponent(const DiscreteField& u) const;

  double energy_serial(const DiscreteField& u, double eps = 0.0) const;
  std::vector<double> gradient_serial(const DiscreteField& u, double eps = 0.0) const;

  const Grid& grid() const { return grid_; }
  const Family& family() const { return family_; }

 private:
  Vec2 cell_grad(const std::vector<double>& u, int i, int j) const;

  Grid grid_;
  Family family_;
  std::vector<LocalDensity> cells_;
};

double pairwise_sum(const double* v, size_t n);

double discrete_energy(const Grid& g, const Family& f, const DiscreteField& u);
std::vector<double> discrete_energy_gradient(const Grid& g, const Family& f, const DiscreteField& u);

struct SolveOptions {
  int max_iter = 20000;
  double tolerance = 1e-8;
  double armijo = 1e-4;
  double backtrack = 0.5;
  double epsilon = 1e-8;
};

struct SolveResult {
  DiscreteField u;
  std::vector<double> trace;
  int iterations = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
  bool converged = false;
  double amplitude_scale = 1.0;
  std::vector<std::string> warnings;
};

bool is_degenerate(const Family& f);

SolveResult minimize(const Grid& g, const Family& f, const DiscreteField& u0, const SolveOptions& opts = {});
SolveResult minimize(const Grid& g, const Family& f, const SolveOptions& opts = {});

struct Ball {
  Point center;
  double rho = 0.0;
  double R = 0.0;
};

struct FieldStats {
  double sup_grad = 0.0;
  double w22 = 0.0;
  double d2_integral = 0.0;
  int w22_nodes = 0;
  double energy_R = 0.0;
};

// Ball center defaults to the grid center.
Ball make_ball(const Grid& g, double rho, double R, std::optional<Point> center = {});
FieldStats field_stats(const Grid& g, const Family& f, const DiscreteField& u, const Ball& b);
FieldStats field_stats(const Grid& g, const Family& f, const DiscreteField& u, double rho, double R);

// sum over interior nodes in B_rho of w(|Du|) h^2, with |Du| by central differences
double ball_node_integral(const Grid& g, const DiscreteField& u, const Ball& b,
                          const std::function<double(double)>& w);

}  // namespace pqlab
