#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pqlab/geometry.hpp"

namespace pqlab {

struct GeometryError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// N x N nodes on [x0, x0 + side] x [y0, y0 + side]; node (i, j) sits at x = x0 + i h, y = y0 + j h.
struct Grid {
  int N = 33;
  double side = 1.0;
  double x0 = 0.0;
  double y0 = 0.0;
  std::function<double(double, double)> boundary = [](double, double) { return 0.0; };

  static Grid make(int N, double side, std::function<double(double, double)> boundary, double x0 = 0.0,
                   double y0 = 0.0);

  double h() const { return side / (N - 1); }
  int index(int i, int j) const { return j * N + i; }
  Point node(int i, int j) const { return {x0 + i * h(), y0 + j * h()}; }
  Point cell_center(int i, int j) const { return {x0 + (i + 0.5) * h(), y0 + (j + 0.5) * h()}; }
  Point center() const { return {x0 + 0.5 * side, y0 + 0.5 * side}; }
  bool on_boundary(int i, int j) const { return i == 0 || j == 0 || i == N - 1 || j == N - 1; }
  int cells() const { return (N - 1) * (N - 1); }
};

struct DiscreteField {
  int N = 0;
  double side = 1.0;
  std::vector<double> u;

  double& at(int i, int j) { return u[static_cast<size_t>(j) * N + i]; }
  double at(int i, int j) const { return u[static_cast<size_t>(j) * N + i]; }
};

DiscreteField sample_field(const Grid& g, const std::function<double(double, double)>& f);
// Transfinite (Coons) interpolation of the boundary data.
DiscreteField bilinear_guess(const Grid& g);
void apply_boundary(const Grid& g, DiscreteField& u);

}  // namespace pqlab
