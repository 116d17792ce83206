#include "pqlab/growth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "pqlab/exact.hpp"
#include "pqlab/exponents.hpp"
#include "pqlab/format.hpp"
#include "pqlab/quadrature.hpp"

namespace pqlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double logaddexp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

double safe_log(double t) { return t > 0.0 ? std::log(t) : -kInf; }

// log of (num/den) with 0/0 read as 0
double log_ratio(double log_num, double log_den) {
  if (std::isnan(log_num) || std::isnan(log_den)) return kInf;
  if (log_num == -kInf) return -kInf;
  if (log_den == -kInf) return kInf;
  double d = log_num - log_den;
  double slack = 1e-13 * std::max(std::fabs(log_num), std::fabs(log_den));
  return d > 0.0 ? std::max(0.0, d - slack) : d;
}

std::vector<Vec2> unit_directions(int count, std::mt19937_64& rng) {
  std::vector<Vec2> d{{1.0, 0.0}, {0.0, 1.0}, {M_SQRT1_2, M_SQRT1_2}};
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  for (int i = 0; i < count; ++i) {
    double a = ang(rng);
    d.push_back({std::cos(a), std::sin(a)});
  }
  return d;
}

struct Tracker {
  double worst_log = -kInf;
  double worst_t = 0.0;
  void add(double lr, double t) {
    if (std::isnan(lr)) lr = kInf;
    if (lr > worst_log) {
      worst_log = lr;
      worst_t = t;
    }
  }
  double ratio() const { return worst_log == -kInf ? 0.0 : std::exp(worst_log); }
};

std::vector<double> with_probes(std::vector<double> ts) {
  for (double t : ProbeSpec{}.ts) ts.push_back(t);
  return ts;
}

ConditionReport ratio_verdict(const std::string& id, const Tracker& tr, double tol) {
  ConditionReport r;
  r.id = id;
  r.worst_ratio = tr.ratio();
  r.worst_t = tr.worst_t;
  r.fitted_M = r.worst_ratio;
  r.verdict = (std::isfinite(r.worst_ratio) && r.worst_ratio <= 1.0 + tol) ? Verdict::pass : Verdict::fail;
  return r;
}

ConditionReport m_verdict(const std::string& id, const Tracker& grid, const std::function<double(double)>& log_h,
                          std::optional<double> M) {
  ConditionReport r;
  r.id = id;
  r.worst_ratio = grid.ratio();
  r.worst_t = grid.worst_t;
  ProbeSpec ps;
  ps.escalate = true;
  TailResult tail = tail_limit_log(log_h, 0.0, ps);
  r.tail_diverging = tail.diverging;
  if (tail.stabilized) r.tail_limit_estimate = tail.estimate;
  r.fitted_M = r.worst_ratio;
  if (tail.stabilized) r.fitted_M = std::max(r.fitted_M, tail.estimate);
  if (!std::isfinite(r.worst_ratio) || tail.diverging) {
    r.verdict = Verdict::fail;
    r.note = std::isfinite(r.worst_ratio) ? "tail diverges" : "ratio unbounded on grid";
  } else if (!tail.stabilized) {
    r.verdict = Verdict::inconclusive;
    r.note = "tail not stabilized";
  } else {
    r.verdict = Verdict::pass;
  }
  if (r.verdict == Verdict::pass && M && r.fitted_M > *M) {
    r.verdict = Verdict::fail;
    r.note = "fitted M exceeds supplied M";
  }
  return r;
}

}  // namespace

double GrowthFunction::operator()(double t) const { return std::exp(log_eval(t)); }

GrowthFunction GrowthFunction::from_linear(std::function<double(double)> g, std::string label) {
  return {[g](double t) { return safe_log(g(t)); }, std::move(label)};
}

GrowthFunction gf_power(double c, double e) {
  return {[c, e](double t) {
            if (c <= 0.0) return -kInf;
            if (e == 0.0) return std::log(c);
            return std::log(c) + e * safe_log(t);
          },
          num(c) + "*t^" + num(e)};
}

GrowthFunction gf_one_plus_power(double c, double e) {
  return {[c, e](double t) {
            if (c <= 0.0) return -kInf;
            return std::log(c) + logaddexp(0.0, e == 0.0 ? 0.0 : e * safe_log(t));
          },
          num(c) + "*(1+t^" + num(e) + ")"};
}

GrowthFunction gf_shifted_power(double c, double e) {
  return {[c, e](double t) {
            if (c <= 0.0) return -kInf;
            return std::log(c) + e * std::log1p(t);
          },
          num(c) + "*(1+t)^" + num(e)};
}

std::vector<std::string> validate_triple(const GrowthTriple& tr, const std::vector<double>& ts) {
  std::vector<std::string> out;
  const GrowthFunction* gs[3] = {&tr.g1, &tr.g2, &tr.g3};
  for (int i = 0; i < 3; ++i) {
    double prev = -kInf;
    for (double t : ts) {
      double v = gs[i]->log_eval(t);
      if (std::isnan(v)) {
        out.push_back("g" + std::to_string(i + 1) + " undefined at t=" + num(t));
        break;
      }
      if (v < prev - 1e-12 * std::max(1.0, std::fabs(prev))) {
        out.push_back("g" + std::to_string(i + 1) + " decreases near t=" + num(t));
        break;
      }
      prev = v;
    }
  }
  for (double t : ts) {
    if (tr.g2.log_eval(t) < tr.g1.log_eval(t) - 1e-12) {
      out.push_back("g2 < g1 at t=" + num(t));
      break;
    }
  }
  double g1 = tr.g1(1.0), g2 = tr.g2(1.0);
  if (!(g2 >= g1 && g1 >= 1.0)) out.push_back("normalization g2(1) >= g1(1) >= 1 fails: g1(1)=" + num(g1) + ", g2(1)=" + num(g2));
  return out;
}

double log_sqrt_g1_integral_quadrature(const GrowthFunction& g1, double t) {
  return log_integral_monotone([&](double s) { return 0.5 * g1.log_eval(s); }, t);
}

double log_one_plus_sqrt_g1_integral(const GrowthTriple& tr, double t) {
  double li = tr.log_sqrt_g1_integral ? tr.log_sqrt_g1_integral(t) : log_sqrt_g1_integral_quadrature(tr.g1, t);
  return logaddexp(0.0, li);
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

std::vector<double> default_t_grid() {
  std::vector<double> ts{0.0};
  for (int i = 0; i < 400; ++i) ts.push_back(std::pow(10.0, -3.0 + 6.0 * i / 399.0));
  return ts;
}

SampleSpec ball_sample_spec(Point center, double R, std::uint64_t seed) {
  SampleSpec s;
  s.xs = {center};
  for (double fr : {0.5, 1.0}) {
    for (int k = 0; k < 8; ++k) {
      double a = 2.0 * M_PI * k / 8.0;
      s.xs.push_back({center.x + fr * R * std::cos(a), center.y + fr * R * std::sin(a)});
    }
  }
  s.ts = default_t_grid();
  s.seed = seed;
  return s;
}

TailResult tail_limit_log(const std::function<double(double)>& log_h, double t0, const ProbeSpec& spec) {
  std::vector<double> ts;
  for (double t : spec.ts)
    if (t >= t0) ts.push_back(t);
  if (spec.escalate)
    for (int k : {10, 20, 40, 80, 160, 300}) ts.push_back(std::pow(10.0, k));

  std::vector<double> lv;
  for (size_t i = 0; i < ts.size(); ++i) {
    bool extra = i >= spec.ts.size();
    double l = log_h(ts[i]);
    if (std::isnan(l)) break;
    if (l == kInf) {
      if (extra) break;
      return {kInf, false, true};
    }
    lv.push_back(l);
    size_t m = lv.size();
    if (m < 3) continue;
    double a = lv[m - 3], b = lv[m - 2], c = lv[m - 1];
    if (a == -kInf && b == -kInf && c == -kInf) return {0.0, true, false};
    double hi = std::max({a, b, c}), lo = std::min({a, b, c});
    bool agree = hi != -kInf && lo != -kInf && -std::expm1(lo - hi) <= 1e-3;
    bool nonincreasing = b <= a && c <= b;
    if (agree || nonincreasing) return {c == -kInf ? 0.0 : std::exp(c), true, false};
  }
  size_t m = lv.size();
  bool increasing = m >= 2;
  for (size_t j = 1; j < m; ++j)
    if (!(lv[j] > lv[j - 1])) increasing = false;
  if (increasing && lv[0] != -kInf && lv[m - 1] - lv[0] > std::log(2.0)) return {kInf, false, true};
  return {lv.empty() ? 0.0 : std::exp(lv.back()), false, false};
}

TailResult tail_limit(const std::function<double(double)>& h, double t0, const ProbeSpec& spec) {
  return tail_limit_log([&](double t) { return safe_log(h(t)); }, t0, spec);
}

ConditionReport check_ellipticity_sandwich(const Family& f, const GrowthTriple& tr, const SampleSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::vector<Vec2> dirs = unit_directions(spec.directions, rng);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  Tracker worst;
  try {
    for (const Point& x : spec.xs) {
      LocalDensity d = local(f, x);
      for (double t : with_probes(spec.ts)) {
        double lg1 = tr.g1.log_eval(t), lg2 = tr.g2.log_eval(t);
        for (const Vec2& u : dirs) {
          Vec2 xi = u * t;
          double a = ang(rng);
          Vec2 lams[3] = {u, {-u.y, u.x}, {std::cos(a), std::sin(a)}};
          for (const Vec2& lam : lams) {
            Scaled<double> h = d.hessian_scaled(xi, lam);
            double lh = h.value > 0.0 ? h.log_scale + std::log(h.value) : (h.value == 0.0 ? -kInf : NAN);
            double ll = safe_log(norm2(lam));
            worst.add(log_ratio(lg1 + ll, lh), t);
            worst.add(log_ratio(lh, lg2 + ll), t);
          }
        }
      }
    }
  } catch (const DomainError& e) {
    ConditionReport r;
    r.id = "ellipticity-sandwich";
    r.verdict = Verdict::inconclusive;
    r.note = e.what();
    return r;
  }
  return ratio_verdict("ellipticity-sandwich", worst, spec.tol);
}

ConditionReport check_growth_A(const Family& f, const GrowthTriple& tr, const SampleSpec& spec) {
  std::mt19937_64 rng(spec.seed + 1);
  std::vector<Vec2> dirs = unit_directions(spec.directions, rng);
  Tracker worst;
  try {
    for (const Point& x : spec.xs) {
      for (int k = 0; k < 2; ++k) {
        double h = 1e-6 * std::max(1.0, std::fabs(k == 0 ? x.x : x.y));
        Point xp = x, xm = x;
        (k == 0 ? xp.x : xp.y) += h;
        (k == 0 ? xm.x : xm.y) -= h;
        LocalDensity d0 = local(f, x), dp = local(f, xp), dm = local(f, xm);
        for (double t : with_probes(spec.ts)) {
          double lg3 = tr.g3.log_eval(t);
          for (const Vec2& u : dirs) {
            Vec2 xi = u * t;
            Scaled<Vec2> g0 = d0.grad_scaled(xi), gp = dp.grad_scaled(xi), gm = dm.grad_scaled(xi);
            // d/dx (e^{ls} v) = e^{ls} (ls' v + v')
            double dls = (gp.log_scale - gm.log_scale) / (2.0 * h);
            Vec2 diff = g0.value * dls + (gp.value - gm.value) * (1.0 / (2.0 * h));
            double s = std::fabs(diff.x) + std::fabs(diff.y);
            double ls = s > 0.0 ? std::log(s) + g0.log_scale : -kInf;
            worst.add(log_ratio(ls, lg3), t);
          }
        }
      }
    }
  } catch (const DomainError& e) {
    ConditionReport r;
    r.id = "growth-A";
    r.verdict = Verdict::inconclusive;
    r.note = e.what();
    return r;
  }
  return ratio_verdict("growth-A", worst, spec.fd_tol);
}

ConditionReport check_11M(const GrowthTriple& tr, const ExponentParams& params, const std::vector<double>& ts) {
  double g = params.gamma, a = params.alpha;
  auto log_h = [&](double t) {
    if (t == 0.0) return -kInf;
    double lg2 = tr.g2.log_eval(t);
    double lhs = (2.0 * g - 1.0) * lg2 + 2.0 * std::log(t);
    if (lg2 == -kInf) lhs = -kInf;
    return log_ratio(lhs, a * log_one_plus_sqrt_g1_integral(tr, t));
  };
  Tracker grid;
  for (double t : ts) grid.add(log_h(t), t);
  return m_verdict("11M", grid, log_h, tr.M);
}

ConditionReport check_12M(const Family& f, const GrowthTriple& tr, const ExponentParams& params,
                          const SampleSpec& spec) {
  std::mt19937_64 rng(spec.seed + 2);
  std::vector<Vec2> dirs = unit_directions(spec.directions, rng);
  std::vector<LocalDensity> ds;
  for (const Point& x : spec.xs) ds.push_back(local(f, x));
  double g = params.gamma, b = params.beta;
  auto log_h = [&](double t) {
    if (t == 0.0) return -kInf;
    double lt = std::log(t);
    double lg2 = tr.g2.log_eval(t);
    double lhs = lg2 == -kInf ? -kInf : (2.0 * g - 1.0) * lg2 + 2.0 * g * lt;
    double worst = -kInf;
    for (const LocalDensity& d : ds)
      for (const Vec2& u : dirs) {
        double lf = d.log_value_polar(lt, u);
        worst = std::max(worst, log_ratio(lhs, b * logaddexp(0.0, lf)));
      }
    return worst;
  };
  Tracker grid;
  for (double t : spec.ts) grid.add(log_h(t), t);
  return m_verdict("12M", grid, log_h, tr.M);
}

ConditionReport check_A3(const GrowthTriple& tr, const ExponentParams& params, const std::vector<double>& ts) {
  double g = params.gamma;
  auto log_h = [&](double t) {
    double lg1 = tr.g1.log_eval(t), lg2 = tr.g2.log_eval(t), lg3 = tr.g3.log_eval(t);
    double rhs = logaddexp(0.0, g * safe_log(t));
    rhs = (lg1 == -kInf || lg2 == -kInf) ? -kInf : rhs + 0.5 * lg1 + (g - 0.5) * lg2;
    return log_ratio(lg3, rhs);
  };
  Tracker grid;
  for (double t : ts) grid.add(log_h(t), t);
  return m_verdict("A3", grid, log_h, tr.M);
}

ExponentBoundsReport check_exponent_bounds(const ExponentParams& p) {
  ExponentBoundsReport out;
  Rational a = exact(p.alpha), b = exact(p.beta), g = exact(p.gamma);
  Rational ts = p.ctx.two_star_exact();
  Rational a_hi = ts - 2 * (g - 1);
  out.alpha.id = "alpha-bound";
  out.alpha.worst_ratio = p.alpha / to_double(a_hi);
  bool a_ok = a >= 2 && strictly_less(a, a_hi);
  out.alpha.verdict = a_ok ? Verdict::pass : Verdict::fail;
  if (!a_ok) out.alpha.note = "need 2 <= alpha < " + num(to_double(a_hi));

  out.beta.id = "beta-bound";
  Rational den = p.ctx.n * (a + 2 * g - 4);
  bool b_ok = b >= 1;
  if (den > 0) {
    Rational hi = 2 * (a + 2 * g - 2) / den;
    out.beta_upper = to_double(hi);
    out.beta.worst_ratio = p.beta / out.beta_upper;
    b_ok = b_ok && strictly_less(b, hi);
    if (!b_ok) out.beta.note = "need 1 <= beta < " + num(out.beta_upper);
  } else {
    out.beta_upper = kInf;
    out.beta.worst_ratio = 0.0;
    out.beta.note = "upper bound vacuous";
    if (!b_ok) out.beta.note = "need beta >= 1";
  }
  out.beta.verdict = b_ok ? Verdict::pass : Verdict::fail;
  out.verdict = (a_ok && b_ok) ? Verdict::pass : Verdict::fail;
  return out;
}

std::string format_report_row(const ConditionReport& r) {
  std::ostringstream o;
  o << r.id << "\t" << verdict_name(r.verdict) << "\t" << num(r.worst_ratio) << "\t" << num(r.worst_t) << "\t"
    << num(r.fitted_M);
  if (!r.note.empty()) o << "\t" << r.note;
  return o.str();
}

}  // namespace pqlab
