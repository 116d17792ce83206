#include <algorithm>
#include <cmath>

#include "pqlab/solver.hpp"

namespace pqlab {

Grid Grid::make(int N, double side, std::function<double(double, double)> boundary, double x0, double y0) {
  if (N < 8) throw GeometryError("grid needs N >= 8");
  if (!(side > 0.0)) throw GeometryError("grid side must be positive");
  Grid g;
  g.N = N;
  g.side = side;
  g.x0 = x0;
  g.y0 = y0;
  g.boundary = std::move(boundary);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i)
      if (g.on_boundary(i, j)) {
        Point p = g.node(i, j);
        if (!std::isfinite(g.boundary(p.x, p.y))) throw GeometryError("boundary data not finite");
      }
  return g;
}

DiscreteField sample_field(const Grid& g, const std::function<double(double, double)>& f) {
  DiscreteField u{g.N, g.side, std::vector<double>(static_cast<size_t>(g.N) * g.N)};
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      Point p = g.node(i, j);
      u.at(i, j) = f(p.x, p.y);
    }
  return u;
}

void apply_boundary(const Grid& g, DiscreteField& u) {
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i)
      if (g.on_boundary(i, j)) {
        Point p = g.node(i, j);
        u.at(i, j) = g.boundary(p.x, p.y);
      }
}

DiscreteField bilinear_guess(const Grid& g) {
  int n = g.N - 1;
  auto b = [&](int i, int j) {
    Point p = g.node(i, j);
    return g.boundary(p.x, p.y);
  };
  DiscreteField u{g.N, g.side, std::vector<double>(static_cast<size_t>(g.N) * g.N)};
  double c00 = b(0, 0), c10 = b(n, 0), c01 = b(0, n), c11 = b(n, n);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      double s = double(i) / n, t = double(j) / n;
      double v = (1 - s) * b(0, j) + s * b(n, j) + (1 - t) * b(i, 0) + t * b(i, n) -
                 ((1 - s) * (1 - t) * c00 + s * (1 - t) * c10 + (1 - s) * t * c01 + s * t * c11);
      u.at(i, j) = v;
    }
  apply_boundary(g, u);
  return u;
}

double pairwise_sum(const double* v, size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  size_t m = n / 2;
  return pairwise_sum(v, m) + pairwise_sum(v + m, n - m);
}

Assembler::Assembler(const Grid& g, const Family& f) : grid_(g), family_(f) {
  int n = g.N - 1;
  cells_.resize(static_cast<size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) cells_[static_cast<size_t>(j) * n + i] = local(f, g.cell_center(i, j));
}

Vec2 Assembler::cell_grad(const std::vector<double>& u, int i, int j) const {
  int N = grid_.N;
  double h = grid_.h();
  double u00 = u[j * N + i], u10 = u[j * N + i + 1], u01 = u[(j + 1) * N + i], u11 = u[(j + 1) * N + i + 1];
  return {(u10 + u11 - u00 - u01) / (2.0 * h), (u01 + u11 - u00 - u10) / (2.0 * h)};
}

double Assembler::energy(const DiscreteField& u, double eps) const {
  int n = grid_.N - 1;
  double h2 = grid_.h() * grid_.h();
  std::vector<double> vals(cells_.size());
#pragma omp parallel for schedule(static)
  for (int c = 0; c < n * n; ++c) {
    int i = c % n, j = c / n;
    vals[c] = cells_[c].value(cell_grad(u.u, i, j), eps);
  }
  return pairwise_sum(vals.data(), vals.size()) * h2;
}

double Assembler::energy_serial(const DiscreteField& u, double eps) const {
  int n = grid_.N - 1;
  double h2 = grid_.h() * grid_.h();
  double s = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) s += cells_[j * n + i].value(cell_grad(u.u, i, j), eps);
  return s * h2;
}

std::vector<double> Assembler::gradient(const DiscreteField& u, double eps) const {
  int N = grid_.N, n = N - 1;
  double k = grid_.h() / 2.0;  // h^2 / (2h)
  std::vector<Vec2> cg(cells_.size());
#pragma omp parallel for schedule(static)
  for (int c = 0; c < n * n; ++c) cg[c] = cells_[c].grad(cell_grad(u.u, c % n, c / n), eps);
  std::vector<double> out(static_cast<size_t>(N) * N, 0.0);
#pragma omp parallel for schedule(static)
  for (int j = 1; j < N - 1; ++j)
    for (int i = 1; i < N - 1; ++i) {
      // node (i,j) is corner 11 of cell (i-1,j-1), 01 of (i,j-1), 10 of (i-1,j), 00 of (i,j)
      const Vec2& a = cg[(j - 1) * n + i - 1];
      const Vec2& b = cg[(j - 1) * n + i];
      const Vec2& c = cg[j * n + i - 1];
      const Vec2& d = cg[j * n + i];
      double s = (a.x + a.y) + (-b.x + b.y) + (c.x - c.y) + (-d.x - d.y);
      out[j * N + i] = k * s;
    }
  return out;
}

std::vector<double> Assembler::gradient_serial(const DiscreteField& u, double eps) const {
  int N = grid_.N, n = N - 1;
  double k = grid_.h() / 2.0;
  std::vector<double> out(static_cast<size_t>(N) * N, 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      Vec2 g = cells_[j * n + i].grad(cell_grad(u.u, i, j), eps);
      out[j * N + i] += k * (-g.x - g.y);
      out[j * N + i + 1] += k * (g.x - g.y);
      out[(j + 1) * N + i] += k * (-g.x + g.y);
      out[(j + 1) * N + i + 1] += k * (g.x + g.y);
    }
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i)
      if (grid_.on_boundary(i, j)) out[j * N + i] = 0.0;
  return out;
}

double Assembler::energy_delta(const DiscreteField& u, const std::vector<double>& d, double a, double eps) const {
  int n = grid_.N - 1;
  double h2 = grid_.h() * grid_.h();
  std::vector<double> vals(cells_.size());
  bool saturated = false;
#pragma omp parallel for schedule(static) reduction(|| : saturated)
  for (int c = 0; c < n * n; ++c) {
    int i = c % n, j = c / n;
    try {
      vals[c] = cells_[c].delta(cell_grad(u.u, i, j), cell_grad(d, i, j) * a, eps);
    } catch (const SaturationError&) {
      saturated = true;
    }
  }
  if (saturated) throw SaturationError("exponential density saturates along the search direction");
  return pairwise_sum(vals.data(), vals.size()) * h2;
}

double Assembler::max_exponent(const DiscreteField& u) const {
  if (family_.kind != FamilyKind::Exponential) return 0.0;
  int n = grid_.N - 1;
  double m = 0.0;
  for (int c = 0; c < n * n; ++c) {
    Vec2 g = cell_grad(u.u, c % n, c / n);
    m = std::max(m, cells_[c].a * std::pow(norm(g), cells_[c].tau));
  }
  return m;
}

double discrete_energy(const Grid& g, const Family& f, const DiscreteField& u) { return Assembler(g, f).energy(u); }

std::vector<double> discrete_energy_gradient(const Grid& g, const Family& f, const DiscreteField& u) {
  return Assembler(g, f).gradient(u);
}

}  // namespace pqlab
