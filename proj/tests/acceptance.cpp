#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "families.hpp"
#include "oracles.hpp"
#include "pqlab/catalog.hpp"
#include "pqlab/exponents.hpp"
#include "pqlab/growth.hpp"
#include "pqlab/solver.hpp"
#include "pqlab/validator.hpp"

using namespace pqlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(const char* id, double budget_s, const std::function<Outcome()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool ok = o.pass && dt < budget_s;
  if (!ok) ++failures;
  std::printf("%s %s  %s  [%.2fs of %.0fs]\n", id, ok ? "PASS" : "FAIL", o.detail.c_str(), dt, budget_s);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome a1() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> nd(3, 8), num(0, 1000);
  double worst = 0.0;
  int exact_fail = 0, n_params = 0;
  while (n_params < 200) {
    int n = nd(rng);
    Rational ts(2 * n, n - 2);
    Rational alpha = 2 + (ts - 2) * Rational(num(rng), 1001);
    Rational delta = Rational(num(rng), 4000);
    if (!(alpha < ts - 2 * delta)) continue;
    ExponentParams p = make_params(n, to_double(alpha), to_double(alpha / 2 + delta), to_double(1 + delta));
    if (check_exponent_bounds(p).verdict != Verdict::pass) continue;
    ++n_params;
    std::vector<double> l = lambda_sequence(p, 30);
    for (int k = 1; k <= 30; ++k) {
      double cf = lambda_closed_form(p, k);
      worst = std::max(worst, std::fabs(l[k - 1] - cf) / std::max(1.0, std::fabs(cf)));
    }
    std::vector<Rational> le = lambda_sequence_exact(p, 30);
    Rational te = p.ctx.two_star_exact(), ae = exact(p.alpha), ge = exact(p.gamma);
    for (int k = 0; k + 1 < 30; ++k)
      if (te * (le[k] + 1) - ae + 2 != 2 * (le[k + 1] + ge)) ++exact_fail;
  }
  return {worst <= 1e-10 && exact_fail == 0,
          fmt("worst relative closed-form gap %.2e", worst) + ", exact relation failures " + std::to_string(exact_fail)};
}

Outcome a2() {
  int disagree = 0;
  for (int n : {2, 3, 4, 5})
    for (int k = 0; k <= 100; ++k) {
      double q = 2.0 * (100 + k) / 100.0;
      disagree += anisotropic_params(2.0, q, n).accepted != oracle::anisotropic_accepts(k, n);
      disagree += double_phase_params(2.0, q, n).accepted != oracle::double_phase_accepts(k, n);
    }
  return {disagree == 0, std::to_string(disagree) + " disagreements over 808 verdicts"};
}

Outcome a3() {
  Grid g = Grid::make(65, 1.0, [](double x, double y) { return x * x - y * y; });
  SolveOptions o;
  o.tolerance = 1e-8;
  SolveResult r = minimize(g, p_laplacian(2), o);
  oracle::LinearSolve d = oracle::quadratic_direct(g, [](double, double) { return 1.0; });
  double err = 0.0;
  for (size_t k = 0; k < d.u.u.size(); ++k) err = std::max(err, std::fabs(r.u.u[k] - d.u.u[k]));
  MoserSchedule s = moser_exponents(make_params(2, 2, 1, 1), 1.0, std::nullopt);
  Problem pb{g, p_laplacian(2), o};
  EstimateReport rep = sweep_amplitudes(pb, {0.5, 1, 2, 4, 8}, s, make_ball(g, 0.2, 0.4));
  bool ok = r.converged && r.grad_norm <= 1e-8 && err <= 1e-8 && rep.fitted && rep.s1 <= rep.theta1 + 0.05;
  return {ok, fmt("grad norm %.1e", r.grad_norm) + fmt(", nodal error %.1e", err) + fmt(", s1 %.4f", rep.s1) +
                  fmt(" vs theta1 %.4f", rep.theta1)};
}

Outcome sweep_case(const char* name, const Family& f, std::function<double(double, double)> bd,
                   const std::vector<double>& amps) {
  Grid g = Grid::make(65, 1.0, std::move(bd));
  Ball b = make_ball(g, 0.2, 0.4);
  ParamsResult pr = auto_params(f, b.center, b.R, 2);
  if (!pr.accepted) return {false, std::string(name) + ": auto schedule rejected: " + pr.reason};
  MuNuChoice c = select_mu_nu(pr.params);
  if (!c.accepted) return {false, std::string(name) + ": " + c.reason};
  MoserSchedule s = moser_exponents(pr.params, c.nu, c.mu);
  s.coeff_theta = pr.coeff_theta;
  GrowthTriple tr = catalog_triple(f, b.center, b.R);
  SampleSpec sp = ball_sample_spec(b.center, b.R);
  ExponentBoundsReport eb = check_exponent_bounds(pr.params);
  int failed_checks = 0;
  for (const ConditionReport& r :
       {check_ellipticity_sandwich(f, tr, sp), check_growth_A(f, tr, sp), check_11M(tr, pr.params, sp.ts),
        check_12M(f, tr, pr.params, sp), check_A3(tr, pr.params, sp.ts), eb.alpha, eb.beta})
    failed_checks += r.verdict != Verdict::pass;
  EstimateReport rep = sweep_amplitudes(Problem{g, f, {}}, amps, s, b);
  bool ok = failed_checks == 0 && rep.failures.empty() && rep.fitted && rep.s1_pass && rep.s3_pass && rep.spread_pass;
  return {ok, std::string(name) + ": " + std::to_string(failed_checks) + " failed checks" +
                  fmt(", s1 %.3f", rep.s1) + fmt("<=%.3f", rep.theta1 + 0.05) + fmt(", s3 %.3f", rep.s3.value_or(NAN)) +
                  fmt("<=%.3f", rep.theta3 + 0.05) + fmt(", spread %.1f", rep.spread)};
}

Outcome a4() {
  Outcome dp = sweep_case("double phase", double_phase(2, 3, {Expr::parse("x^2 + y^2"), 2.0}),
                          [](double x, double y) { return x * x - y * y; }, {0.04, 0.07, 0.12, 0.22, 0.4});
  Outcome ex = sweep_case("exponential", exponential({Expr::parse("0.5 + 0.1*x"), 0.1}, 2.0),
                          [](double x, double y) { return x + y; }, {0.08, 0.14, 0.25, 0.45, 0.8});
  return {dp.pass && ex.pass, dp.detail + "; " + ex.detail};
}

Outcome a5() {
  Point c{0.5, 0.5};
  Family px = px_laplacian({Expr::parse("2 + 0.02*x"), 0.02});
  GrowthTriple tr = catalog_triple(px, c, 0.4, 0.01);
  std::vector<double> ts = default_t_grid();
  double delta = px_delta(2.0, 1.01, 0.01);
  ParamsResult pr = px_auto_params(2.0, 1.01, 0.01, 2);
  ExponentParams base = pr.params;
  ExponentParams g1 = make_params(2, base.alpha, base.beta - base.delta, 1.0);
  Verdict without = check_A3(tr, g1, ts).verdict;
  Verdict with = check_A3(tr, base, ts).verdict;
  GrowthTriple nat;
  nat.g1 = gf_power(1.0, 1.0);
  nat.g2 = gf_shifted_power(1.0, 1.0);
  nat.g3 = gf_power(1.0, 0.0);
  Verdict natural = check_11M(nat, make_params(3, 2, 1, 1), ts).verdict;
  bool ok = pr.accepted && base.gamma == 1.0 + delta && without == Verdict::fail && with == Verdict::pass &&
            natural == Verdict::pass;
  return {ok, std::string("A3 with gamma=1: ") + verdict_name(without) + fmt(", with delta %.5f: ", delta) +
                  verdict_name(with) + ", natural growth 11M: " + verdict_name(natural)};
}

Outcome a6() {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(0.0, 1.0), ang(0.0, 2 * M_PI);
  double worst_grad = 0.0, worst_sandwich = 0.0, worst_identity = 0.0, worst_discrete = 0.0;
  int descent_fail = 0, nested_fail = 0, solves = 0;
  for (const auto& nf : fixtures::catalog()) {
    for (int k = 0; k < 100; ++k) {
      Point x{u(rng), u(rng)};
      double t = 0.1 + (nf.f.kind == FamilyKind::Exponential ? 2.9 : 4.9) * u(rng), th = ang(rng);
      if (nf.f.kind == FamilyKind::VeryDegenerate && std::fabs(t - 1.0) < 0.05) continue;
      Vec2 xi{t * std::cos(th), t * std::sin(th)};
      double h = 3e-4 * std::max(1.0, t);
      auto F = [&](Vec2 v) { return eval_f(nf.f, x, v); };
      auto d5 = [&](Vec2 e) {
        return (8 * (F(xi + e * h) - F(xi - e * h)) - (F(xi + e * (2 * h)) - F(xi - e * (2 * h)))) / (12 * h);
      };
      Vec2 fd{d5({1, 0}), d5({0, 1})};
      Vec2 an = eval_grad_xi(nf.f, x, xi);
      worst_grad = std::max(worst_grad, norm(an - fd) / std::max(norm(an), 1e-8));
      if (nf.f.radial()) {
        Vec2 lam{std::cos(ang(rng)), std::sin(ang(rng))};
        double q = hessian_quadratic_form(nf.f, x, xi, lam);
        RadialBounds b = radial_bounds(RadialProfile::of(nf.f), x, t);
        double scale = std::max(1.0, b.upper * norm2(lam));
        worst_sandwich = std::max({worst_sandwich, (b.lower * norm2(lam) - q) / scale, (q - b.upper * norm2(lam)) / scale});
      }
    }
    double amp = nf.f.kind == FamilyKind::VeryDegenerate ? 3.0 : 0.7;
    Grid g = Grid::make(17, 1.0, [amp](double x, double y) { return amp * (x * x - y * y + std::sin(3 * x)); });
    DiscreteField u0 = bilinear_guess(g);
    std::vector<double> gr = discrete_energy_gradient(g, nf.f, u0);
    double gmax = 0.0;
    for (double v : gr) gmax = std::max(gmax, std::fabs(v));
    for (int k = 0; k < 50; ++k) {
      int i = 1 + static_cast<int>(u(rng) * (g.N - 2)), j = 1 + static_cast<int>(u(rng) * (g.N - 2));
      double h = 1e-4;
      auto E = [&](double s) {
        DiscreteField v = u0;
        v.at(i, j) += s;
        return discrete_energy(g, nf.f, v);
      };
      double fd = (8 * (E(h) - E(-h)) - (E(2 * h) - E(-2 * h))) / (12 * h);
      double an = gr[static_cast<size_t>(g.index(i, j))];
      worst_discrete = std::max(worst_discrete, std::fabs(fd - an) / std::max(std::fabs(an), 1e-3 * gmax));
    }
    SolveOptions o;
    o.tolerance = 1e-7;
    SolveResult r = minimize(g, nf.f, o);
    ++solves;
    for (size_t k = 1; k < r.trace.size(); ++k) descent_fail += r.trace[k] > r.trace[k - 1];
    std::vector<double> s = nested_sups(g, r.u, g.center(), {0.05, 0.1, 0.2, 0.3, 0.4});
    for (size_t k = 1; k < s.size(); ++k) nested_fail += s[k] < s[k - 1];
  }
  for (int k = 0; k < 1000; ++k) {
    double p = 2.0 + 5.0 * u(rng), t = 0.05 + 5 * u(rng), th = ang(rng), tl = ang(rng);
    Vec2 xi{t * std::cos(th), t * std::sin(th)}, lam{std::cos(tl), 2 * std::sin(tl)};
    double t2 = norm2(xi), xl = dot(xi, lam);
    double expect = p * (t2 * norm2(lam) + (p - 2) * xl * xl) * std::pow(t2, 0.5 * p - 2);
    double got = hessian_quadratic_form(p_laplacian(p), {0, 0}, xi, lam);
    worst_identity = std::max(worst_identity, std::fabs(got - expect) / std::max(1.0, std::fabs(expect)));
  }
  bool ok = worst_grad <= 1e-6 && worst_discrete <= 1e-6 && worst_sandwich <= 1e-12 && worst_identity <= 1e-12 &&
            descent_fail == 0 && nested_fail == 0;
  return {ok, fmt("density grad %.1e", worst_grad) + fmt(", energy grad %.1e", worst_discrete) +
                  fmt(", sandwich %.1e", std::max(worst_sandwich, 0.0)) + fmt(", identity %.1e", worst_identity) +
                  ", " + std::to_string(solves) + " solves, descent violations " + std::to_string(descent_fail) +
                  ", nesting violations " + std::to_string(nested_fail)};
}

Outcome a7() {
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> nd(2, 6);
  int accepted = 0, bad = 0;
  for (int trial = 0; trial < 20000 && accepted < 500; ++trial) {
    int n = nd(rng);
    double beta = u(rng) < 0.1 ? 1.0 : 1.0 + 1.5 * u(rng);
    ExponentParams p = make_params(n, 2.0 + 2.0 * u(rng), beta, 1.0 + 0.2 * u(rng));
    if (check_exponent_bounds(p).verdict != Verdict::pass) continue;
    MuNuChoice c = select_mu_nu(p);
    if (!c.accepted) continue;
    MoserSchedule s = moser_exponents(p, c.nu, c.mu);
    ++accepted;
    bad += !(s.theta1 > 1.0 && s.theta3 > 1.0 && s.theta4 == 2.0 + s.theta0);
  }
  return {accepted == 500 && bad == 0, std::to_string(accepted) + " schedules, " + std::to_string(bad) + " violations"};
}

}  // namespace

int main() {
  criterion("A1", 1, a1);
  criterion("A2", 1, a2);
  criterion("A3", 30, a3);
  criterion("A4", 300, a4);
  criterion("A5", 5, a5);
  criterion("A6", 60, a6);
  criterion("A7", 1, a7);
  return failures == 0 ? 0 : 1;
}
