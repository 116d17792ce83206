#include "pqlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pqlab/catalog.hpp"
#include "pqlab/format.hpp"

namespace pqlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSaturate = 600.0;
constexpr double kRescaleTarget = 8.0;

double dot_interior(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> p(a.size());
  for (size_t i = 0; i < a.size(); ++i) p[i] = a[i] * b[i];
  return pairwise_sum(p.data(), p.size());
}

double inf_norm(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::fabs(v));
  return m;
}

struct Stage {
  int iterations = 0;
  bool converged = false;
  double grad_norm = 0.0;
};

// Nonlinear CG (PR+) with an Armijo line search on E_eps; E is tracked by exact increments.
Stage run_cg(const Assembler& as, DiscreteField& u, double eps, double tol, int max_iter, const SolveOptions& opts,
             double& energy, std::vector<double>& trace) {
  Stage st;
  std::vector<double> g = as.gradient(u, eps);
  st.grad_norm = inf_norm(g);
  if (st.grad_norm <= tol) {
    st.converged = true;
    return st;
  }
  std::vector<double> d(g.size());
  for (size_t k = 0; k < g.size(); ++k) d[k] = -g[k];
  double alpha_prev = 0.0, slope_prev = 0.0;
  bool steepest = true;
  while (st.iterations < max_iter) {
    double slope = dot_interior(g, d);
    if (!(slope < 0.0)) {
      for (size_t k = 0; k < g.size(); ++k) d[k] = -g[k];
      slope = dot_interior(g, d);
      steepest = true;
    }
    auto phi = [&](double a) {
      try {
        return as.energy_delta(u, d, a, eps);
      } catch (const SaturationError&) {
        return kInf;
      }
    };
    double a1 = alpha_prev > 0.0 ? alpha_prev * slope_prev / slope : 1.0 / std::max(1.0, inf_norm(d));
    if (!(a1 > 0.0) || !std::isfinite(a1)) a1 = 1.0 / std::max(1.0, inf_norm(d));
    double best_a = 0.0, best_v = 0.0;
    auto consider = [&](double a, double v) {
      if (std::isfinite(v) && v <= opts.armijo * a * slope && v < best_v) {
        best_a = a;
        best_v = v;
      }
    };
    double v1 = phi(a1);
    consider(a1, v1);
    if (std::isfinite(v1)) {
      double curv = v1 - slope * a1;
      double aq = curv > 0.0 ? -slope * a1 * a1 / (2.0 * curv) : 2.0 * a1;
      if (aq > 0.0 && std::isfinite(aq) && aq != a1) consider(aq, phi(aq));
    }
    double a = a1;
    for (int k = 0; k < 60 && best_a == 0.0; ++k) {
      a *= opts.backtrack;
      consider(a, phi(a));
    }
    if (best_a == 0.0) {
      if (steepest) break;
      steepest = true;
      for (size_t k = 0; k < g.size(); ++k) d[k] = -g[k];
      alpha_prev = 0.0;
      continue;
    }
    for (size_t k = 0; k < u.u.size(); ++k) u.u[k] += best_a * d[k];
    energy += best_v;
    trace.push_back(energy);
    ++st.iterations;
    std::vector<double> gn = as.gradient(u, eps);
    st.grad_norm = inf_norm(gn);
    if (st.grad_norm <= tol) {
      st.converged = true;
      return st;
    }
    double gg = dot_interior(g, g);
    std::vector<double> y(g.size());
    for (size_t k = 0; k < g.size(); ++k) y[k] = gn[k] - g[k];
    double b = std::max(0.0, dot_interior(gn, y) / gg);
    for (size_t k = 0; k < g.size(); ++k) d[k] = -gn[k] + b * d[k];
    steepest = b == 0.0;
    alpha_prev = best_a;
    slope_prev = slope;
    g.swap(gn);
  }
  return st;
}

}  // namespace

bool is_degenerate(const Family& f) {
  switch (f.kind) {
    case FamilyKind::PLaplacian:
      return f.p != 2.0;
    case FamilyKind::Anisotropic:
      return f.power_base ? f.p != 2.0 : false;
    case FamilyKind::Exponential:
    case FamilyKind::DoublePhase:
    case FamilyKind::MultiPhase:
      return false;
    case FamilyKind::PxLaplacian:
    case FamilyKind::LogPxLaplacian:
    case FamilyKind::VeryDegenerate:
      return true;
  }
  return true;
}

SolveResult minimize(const Grid& g, const Family& f, const SolveOptions& opts) {
  return minimize(g, f, bilinear_guess(g), opts);
}

SolveResult minimize(const Grid& g0, const Family& f, const DiscreteField& u0, const SolveOptions& opts) {
  if (!(opts.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (!(opts.backtrack > 0.0 && opts.backtrack < 1.0)) throw std::invalid_argument("backtracking factor must be in (0,1)");
  if (u0.N != g0.N) throw std::invalid_argument("initial field does not match the grid");

  SolveResult r;
  Grid g = g0;
  r.u = u0;
  Assembler as(g, f);
  double m = as.max_exponent(r.u);
  if (m > kSaturate) {
    double s = std::pow(kRescaleTarget / m, 1.0 / f.tau);
    r.amplitude_scale = s;
    auto base = g0.boundary;
    g.boundary = [base, s](double x, double y) { return s * base(x, y); };
    for (double& v : r.u.u) v *= s;
    as = Assembler(g, f);
    r.warnings.push_back("boundary data rescaled by " + num(s) + " to avoid exponential saturation");
  }

  std::vector<double> eps_stages;
  if (is_degenerate(f))
    for (double e = 1e-2; e > opts.epsilon * 1.000001; e *= 1e-2) eps_stages.push_back(e);
  eps_stages.push_back(opts.epsilon);

  int used = 0;
  Stage st;
  for (size_t s = 0; s < eps_stages.size(); ++s) {
    double eps = eps_stages[s];
    bool last = s + 1 == eps_stages.size();
    double tol = last ? opts.tolerance : std::max(opts.tolerance, 1e-6);
    double energy = as.energy(r.u, eps);
    if (r.trace.empty()) r.trace.push_back(energy);
    // restart the running total at each stage so the trace stays on one energy
    double shift = r.trace.back() - energy;
    double running = energy;
    std::vector<double> stage_trace;
    st = run_cg(as, r.u, eps, tol, opts.max_iter - used, opts, running, stage_trace);
    for (double e : stage_trace) r.trace.push_back(std::min(e + shift, r.trace.back()));
    used += st.iterations;
  }
  r.iterations = used;
  r.converged = st.converged;
  r.grad_norm = st.grad_norm;
  r.energy = as.energy(r.u);
  return r;
}

Ball make_ball(const Grid& g, double rho, double R, std::optional<Point> center) {
  if (!(rho > 0.0 && rho < R)) throw GeometryError("need 0 < rho < R");
  Ball b{center.value_or(g.center()), rho, R};
  double eps = 1e-12 * g.side;
  if (b.center.x - R < g.x0 - eps || b.center.x + R > g.x0 + g.side + eps || b.center.y - R < g.y0 - eps ||
      b.center.y + R > g.y0 + g.side + eps)
    throw GeometryError("ball of radius " + num(R) + " exits the grid");
  return b;
}

namespace {

bool inside(Point p, Point c, double r) { return std::hypot(p.x - c.x, p.y - c.y) <= r * (1.0 + 1e-12); }

struct NodeDerivs {
  double grad = 0.0;
  double d2sq = 0.0;
};

NodeDerivs node_derivs(const Grid& g, const DiscreteField& u, int i, int j) {
  double h = g.h();
  double ux = (u.at(i + 1, j) - u.at(i - 1, j)) / (2.0 * h);
  double uy = (u.at(i, j + 1) - u.at(i, j - 1)) / (2.0 * h);
  double uxx = (u.at(i + 1, j) - 2.0 * u.at(i, j) + u.at(i - 1, j)) / (h * h);
  double uyy = (u.at(i, j + 1) - 2.0 * u.at(i, j) + u.at(i, j - 1)) / (h * h);
  double uxy = (u.at(i + 1, j + 1) - u.at(i + 1, j - 1) - u.at(i - 1, j + 1) + u.at(i - 1, j - 1)) / (4.0 * h * h);
  return {std::hypot(ux, uy), uxx * uxx + uyy * uyy + 2.0 * uxy * uxy};
}

}  // namespace

double ball_node_integral(const Grid& g, const DiscreteField& u, const Ball& b,
                          const std::function<double(double)>& w) {
  std::vector<double> vals;
  double h2 = g.h() * g.h();
  for (int j = 1; j < g.N - 1; ++j)
    for (int i = 1; i < g.N - 1; ++i)
      if (inside(g.node(i, j), b.center, b.rho)) vals.push_back(w(node_derivs(g, u, i, j).grad));
  return pairwise_sum(vals.data(), vals.size()) * h2;
}

FieldStats field_stats(const Grid& g, const Family& f, const DiscreteField& u, double rho, double R) {
  return field_stats(g, f, u, make_ball(g, rho, R));
}

FieldStats field_stats(const Grid& g, const Family& f, const DiscreteField& u, const Ball& b) {
  make_ball(g, b.rho, b.R, b.center);
  FieldStats s;
  int n = g.N - 1;
  double h = g.h(), h2 = h * h;
  std::vector<double> outer;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      Point c = g.cell_center(i, j);
      bool in_r = inside(c, b.center, b.R);
      if (!in_r) continue;
      double u00 = u.at(i, j), u10 = u.at(i + 1, j), u01 = u.at(i, j + 1), u11 = u.at(i + 1, j + 1);
      Vec2 du{(u10 + u11 - u00 - u01) / (2.0 * h), (u01 + u11 - u00 - u10) / (2.0 * h)};
      outer.push_back(1.0 + eval_f(f, c, du));
      if (inside(c, b.center, b.rho)) s.sup_grad = std::max(s.sup_grad, norm(du));
    }
  s.energy_R = pairwise_sum(outer.data(), outer.size()) * h2;

  GrowthTriple tr = catalog_triple(f, b.center, b.R);
  std::vector<double> w, d2;
  for (int j = 1; j < g.N - 1; ++j)
    for (int i = 1; i < g.N - 1; ++i) {
      if (!inside(g.node(i, j), b.center, b.rho)) continue;
      NodeDerivs nd = node_derivs(g, u, i, j);
      double g1 = tr.g1(nd.grad);
      d2.push_back(nd.d2sq);
      if (g1 > 0.0 && nd.d2sq > 0.0) {
        w.push_back(g1 * nd.d2sq);
        ++s.w22_nodes;
      }
    }
  s.w22 = pairwise_sum(w.data(), w.size()) * h2;
  s.d2_integral = pairwise_sum(d2.data(), d2.size()) * h2;
  return s;
}

}  // namespace pqlab
