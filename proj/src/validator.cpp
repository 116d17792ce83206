#include "pqlab/validator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pqlab/catalog.hpp"
#include "pqlab/format.hpp"

namespace pqlab {

MeasureRecord measure(const Grid& g, const Family& f, const DiscreteField& u, const MoserSchedule& s, const Ball& b) {
  FieldStats st = field_stats(g, f, u, b);
  GrowthTriple tr = catalog_triple(f, b.center, b.R);
  double gam = s.params.gamma;
  MeasureRecord m;
  m.rho = b.rho;
  m.R = b.R;
  m.sup_grad2 = st.sup_grad * st.sup_grad;
  m.energy_R = st.energy_R;
  m.w22 = st.w22;
  m.v_integral = ball_node_integral(g, u, b, [&](double t) {
    if (t == 0.0) return 1.0;
    double lg2 = tr.g2.log_eval(t);
    if (lg2 == -INFINITY) return 1.0;
    return 1.0 + std::exp(2.0 * gam * std::log(t) + (2.0 * gam - 1.0) * lg2);
  });
  double d = b.R - b.rho;
  m.c_hat = m.sup_grad2 * std::pow(d, s.theta2) / std::pow(m.energy_R, s.theta1);
  m.c_hat_V = m.v_integral / std::pow(m.energy_R, s.theta3);
  m.c_hat_w22 = m.w22 * std::pow(d, s.theta4) / std::pow(m.energy_R, s.theta3);
  return m;
}

void enforce_radius(const Family& f, const MoserSchedule& s, const Ball& b) {
  if (f.kind != FamilyKind::Exponential && f.kind != FamilyKind::PxLaplacian &&
      f.kind != FamilyKind::LogPxLaplacian)
    return;
  std::optional<double> th = coefficient_theta(f, b.center, b.R);
  if (!s.coeff_theta)
    throw ValidationError("schedule carries no coefficient ratio; cannot check R against R0");
  if (*th > *s.coeff_theta * (1.0 + 1e-12))
    throw ValidationError("R = " + num(b.R) + " exceeds R0: coefficient ratio " + num(*th) + " on B_R is above " +
                          num(*s.coeff_theta));
}

std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  if (lx.size() < 2) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= lx.size();
  my /= ly.size();
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 1e-300)) return std::nullopt;
  return sxy / sxx;
}

double ratio_spread(const std::vector<double>& v) {
  double lo = INFINITY, hi = 0.0;
  for (double x : v)
    if (x > 0.0) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  return hi > 0.0 ? hi / lo : 1.0;
}

std::vector<double> nested_sups(const Grid& g, const DiscreteField& u, Point center, const std::vector<double>& radii) {
  std::vector<double> out;
  int n = g.N - 1;
  double h = g.h();
  for (double r : radii) {
    double m = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        Point c = g.cell_center(i, j);
        if (std::hypot(c.x - center.x, c.y - center.y) > r * (1.0 + 1e-12)) continue;
        double u00 = u.at(i, j), u10 = u.at(i + 1, j), u01 = u.at(i, j + 1), u11 = u.at(i + 1, j + 1);
        m = std::max(m, std::hypot((u10 + u11 - u00 - u01) / (2.0 * h), (u01 + u11 - u00 - u10) / (2.0 * h)));
      }
    out.push_back(m);
  }
  return out;
}

EstimateReport sweep_amplitudes(const Problem& tmpl, const std::vector<double>& amplitudes, const MoserSchedule& s,
                                const Ball& b) {
  double lo = INFINITY, hi = 0.0;
  for (double a : amplitudes) {
    lo = std::min(lo, std::fabs(a));
    hi = std::max(hi, std::fabs(a));
  }
  if (amplitudes.size() < 5 || !(lo > 0.0) || hi / lo < 10.0 * (1.0 - 1e-12))
    throw ValidationError("insufficient spread: need >= 5 amplitudes spanning at least one decade");
  make_ball(tmpl.grid, b.rho, b.R, b.center);
  enforce_radius(tmpl.family, s, b);

  EstimateReport rep;
  rep.theta1 = s.theta1;
  rep.theta2 = s.theta2;
  rep.theta3 = s.theta3;
  rep.theta4 = s.theta4;
  int m = static_cast<int>(amplitudes.size());
  std::vector<std::optional<MeasureRecord>> recs(m);
  std::vector<std::string> errs(m), warns(m);
  std::vector<char> descent(m, 1), nested(m, 1);
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < m; ++k) {
    double A = amplitudes[k];
    try {
      Grid g = tmpl.grid;
      auto base = tmpl.grid.boundary;
      g.boundary = [base, A](double x, double y) { return A * base(x, y); };
      SolveResult r = minimize(g, tmpl.family, tmpl.opts);
      for (size_t i = 1; i < r.trace.size(); ++i)
        if (r.trace[i] > r.trace[i - 1]) descent[k] = 0;
      for (const std::string& w : r.warnings) warns[k] += w;
      if (!r.converged) {
        errs[k] = "no convergence, gradient norm " + num(r.grad_norm);
        continue;
      }
      MeasureRecord rec = measure(g, tmpl.family, r.u, s, b);
      rec.amplitude = A * r.amplitude_scale;
      std::vector<double> radii;
      for (int i = 1; i <= 8; ++i) radii.push_back(b.R * i / 8.0);
      std::vector<double> sups = nested_sups(g, r.u, b.center, radii);
      for (size_t i = 1; i < sups.size(); ++i)
        if (sups[i] < sups[i - 1]) nested[k] = 0;
      recs[k] = rec;
    } catch (const std::exception& e) {
      errs[k] = e.what();
    }
  }
  for (int k = 0; k < m; ++k) {
    if (!warns[k].empty()) rep.warnings.push_back("amplitude " + num(amplitudes[k]) + ": " + warns[k]);
    if (!errs[k].empty()) rep.failures.push_back({amplitudes[k], errs[k]});
    if (recs[k]) rep.records.push_back(*recs[k]);
    rep.all_energy_descent = rep.all_energy_descent && descent[k];
    rep.nested_monotone = rep.nested_monotone && nested[k];
  }
  std::vector<double> E, S, W, C, CV;
  for (const MeasureRecord& r : rep.records) {
    E.push_back(r.energy_R);
    S.push_back(r.sup_grad2);
    W.push_back(r.w22);
    C.push_back(r.c_hat);
    CV.push_back(r.c_hat_V);
  }
  rep.spread = ratio_spread(C);
  rep.spread_V = ratio_spread(CV);
  rep.spread_pass = rep.spread <= 1e3;
  if (rep.records.size() >= 5) {
    std::optional<double> s1 = loglog_slope(E, S);
    bool w_zero = std::all_of(W.begin(), W.end(), [](double w) { return w == 0.0; });
    if (s1) {
      rep.fitted = true;
      rep.s1 = *s1;
      rep.s1_pass = rep.s1 <= s.theta1 + 0.05;
      rep.s3 = loglog_slope(E, W);
      if (rep.s3) rep.s3_pass = *rep.s3 <= s.theta3 + 0.05;
      else rep.s3_pass = w_zero;
    }
  }
  return rep;
}

RadiusReport radius_sweep(const Grid& g, const DiscreteField& u, const MoserSchedule& s,
                          const std::vector<std::pair<double, double>>& pairs, std::optional<Point> center) {
  if (pairs.size() < 4) throw ValidationError("radius sweep needs >= 4 (rho, R) pairs");
  double R = pairs.front().second;
  double dmin = INFINITY, dmax = 0.0;
  for (auto [rho, r] : pairs) {
    if (r != R) throw ValidationError("radius sweep needs a fixed R");
    make_ball(g, rho, r, center);
    dmin = std::min(dmin, r - rho);
    dmax = std::max(dmax, r - rho);
  }
  if (dmax / dmin < 4.0 * (1.0 - 1e-12)) throw ValidationError("R - rho must span a factor >= 4");
  std::vector<std::pair<double, double>> sorted = pairs;
  std::sort(sorted.begin(), sorted.end());
  Point c = center.value_or(g.center());
  std::vector<double> radii;
  for (auto [rho, r] : sorted) radii.push_back(rho);
  std::vector<double> sups = nested_sups(g, u, c, radii);
  RadiusReport rep;
  std::vector<double> norm;
  for (size_t i = 0; i < sorted.size(); ++i) {
    RadiusRow row;
    row.rho = sorted[i].first;
    row.sup_grad2 = sups[i] * sups[i];
    row.normalized = row.sup_grad2 * std::pow(R - row.rho, s.theta2);
    if (i > 0 && row.sup_grad2 < rep.rows.back().sup_grad2) rep.monotone = false;
    rep.rows.push_back(row);
    norm.push_back(row.normalized);
  }
  rep.spread = ratio_spread(norm);
  rep.bounded = rep.spread <= 1e3;
  return rep;
}

SecondDerivativeRecord second_derivative_check(const Grid& g, const Family& f, const DiscreteField& u,
                                               const MoserSchedule& s, const Ball& b) {
  FieldStats st = field_stats(g, f, u, b);
  GrowthTriple tr = catalog_triple(f, b.center, b.R);
  SecondDerivativeRecord r;
  r.w22 = st.w22;
  r.contributing_nodes = st.w22_nodes;
  double scale = std::pow(b.R - b.rho, s.theta4) / std::pow(st.energy_R, s.theta3);
  r.c_hat = st.w22 * scale;
  double m = tr.g1(0.0);
  if (m > 0.0 && std::isfinite(m)) {
    r.g1_at_zero = m;
    r.d2_integral = st.d2_integral;
    r.c_hat_unweighted = m * st.d2_integral * scale;
  }
  return r;
}

std::string format_report(const EstimateReport& r) {
  std::ostringstream o;
  o << "amplitude\tsup_grad2\tE_R\tW22\tc_hat\tc_hat_V\n";
  for (const MeasureRecord& m : r.records)
    o << num(m.amplitude, 12) << "\t" << num(m.sup_grad2, 12) << "\t" << num(m.energy_R, 12) << "\t"
      << num(m.w22, 12) << "\t" << num(m.c_hat, 12) << "\t" << num(m.c_hat_V, 12) << "\n";
  for (const SweepFailure& f : r.failures) o << "# failed amplitude " << num(f.amplitude) << ": " << f.message << "\n";
  for (const std::string& w : r.warnings) o << "# warning " << w << "\n";
  o << "theta1\t" << num(r.theta1, 12) << "\n";
  o << "theta2\t" << num(r.theta2, 12) << "\n";
  o << "theta3\t" << num(r.theta3, 12) << "\n";
  o << "theta4\t" << num(r.theta4, 12) << "\n";
  if (r.fitted) {
    o << "s1\t" << num(r.s1, 12) << "\n";
    o << "s3\t" << (r.s3 ? num(*r.s3, 12) : std::string("none")) << "\n";
  } else {
    o << "s1\tnone\ns3\tnone\n";
  }
  o << "c_hat_spread\t" << num(r.spread, 12) << "\n";
  o << "c_hat_V_spread\t" << num(r.spread_V, 12) << "\n";
  o << "pass_s1\t" << (r.s1_pass ? "yes" : "no") << "\n";
  o << "pass_s3\t" << (r.s3_pass ? "yes" : "no") << "\n";
  o << "pass_spread\t" << (r.spread_pass ? "yes" : "no") << "\n";
  o << "pass\t" << (r.pass() ? "yes" : "no") << "\n";
  return o.str();
}

std::string format_radius_report(const RadiusReport& r) {
  std::ostringstream o;
  o << "rho\tsup_grad2\tnormalized\n";
  for (const RadiusRow& row : r.rows)
    o << num(row.rho, 12) << "\t" << num(row.sup_grad2, 12) << "\t" << num(row.normalized, 12) << "\n";
  o << "monotone\t" << (r.monotone ? "yes" : "no") << "\n";
  o << "normalized_spread\t" << num(r.spread, 12) << "\n";
  o << "pass\t" << (r.pass() ? "yes" : "no") << "\n";
  return o.str();
}

}  // namespace pqlab
