#include "pqlab/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pqlab/format.hpp"
#include "pqlab/growth.hpp"

namespace pqlab {

namespace {

Rational rat(double v) { return exact(v); }

ParamsResult reject(ExponentParams params, std::string why) {
  ParamsResult r;
  r.accepted = false;
  r.params = params;
  r.reason = std::move(why);
  return r;
}

ParamsResult accept(ExponentParams params) {
  ParamsResult r;
  r.accepted = true;
  r.params = params;
  return r;
}

}  // namespace

SobolevContext SobolevContext::for_dimension(int n, double alpha, double gamma, std::optional<double> two_star,
                                             double beta) {
  if (n < 2) throw std::invalid_argument("dimension must be >= 2");
  SobolevContext c;
  c.n = n;
  if (n > 2) {
    c.two_star = 2.0 * n / (n - 2.0);
  } else if (two_star) {
    c.two_star = *two_star;
    if (!(c.two_star > 2.0)) throw std::invalid_argument("2* must exceed 2");
  } else {
    // minimizer of theta1 at mu = inf, raised until beta is reachable by some mu
    double s = alpha + 2.0 * (gamma - 1.0);
    double ts = s + std::max(std::sqrt(std::max(s * s - 2.0 * s, 0.0)), 1.0);
    double r = s > 2.0 ? beta * (s - 2.0) / s : 0.0;
    if (beta > 1.0 && r < 1.0) ts = std::max(ts, 3.0 / (1.0 - r));
    c.two_star = std::round(ts * 1024.0) / 1024.0;
  }
  return c;
}

Rational SobolevContext::two_star_exact() const {
  if (n > 2) return Rational(2 * n, n - 2);
  return exact(two_star);
}

ExponentParams make_params(int n, double alpha, double beta, double gamma, std::optional<double> two_star) {
  ExponentParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.gamma = gamma;
  p.delta = gamma - 1.0;
  p.ctx = SobolevContext::for_dimension(n, alpha, gamma, two_star, beta);
  return p;
}

ExponentParams default_params(int n, double alpha, double delta, std::optional<double> two_star) {
  if (delta < 0.0) throw std::invalid_argument("delta must be >= 0");
  if (n > 2 && !strictly_less(rat(delta), Rational(4, n * (n - 2))))
    throw std::invalid_argument("delta must be < 4/(n(n-2)) = " + num(4.0 / (n * (n - 2.0))));
  ExponentParams p = make_params(n, alpha, alpha / 2.0 + delta, 1.0 + delta, two_star);
  p.delta = delta;
  if (alpha < 2.0) throw std::invalid_argument("alpha must be >= 2");
  if (!strictly_less(rat(alpha), p.ctx.two_star_exact() - 2 * rat(delta)))
    throw std::invalid_argument("alpha must be < 2* - 2 delta = " + num(p.ctx.two_star - 2.0 * delta));
  ExponentBoundsReport b = check_exponent_bounds(p);
  if (b.verdict != Verdict::pass) throw std::invalid_argument("exponent bounds violated: " + b.beta.note + b.alpha.note);
  return p;
}

ParamsResult anisotropic_params(double p, double q, int n) {
  if (!(p >= 2.0 && q >= p)) throw std::invalid_argument("anisotropic_params requires 2 <= p <= q");
  ExponentParams e = make_params(n, 2.0 * q / p, q / p, 1.0);
  Rational r = rat(q) / rat(p);
  Rational bound = 1 + Rational(2, n);
  if (!strictly_less(r, bound))
    return reject(e, "q/p = " + num(q / p) + " violates q/p < 1 + 2/n = " + num(to_double(bound)));
  return accept(e);
}

ParamsResult double_phase_params(double p, double q, int n) {
  if (!(p >= 2.0 && q >= p)) throw std::invalid_argument("double_phase_params requires 2 <= p <= q");
  double alpha = 2.0 * (2.0 * q - p) / p;
  ExponentParams e = make_params(n, alpha, 1.0, 1.0);
  Rational r = rat(q) / rat(p);
  Rational bound = e.ctx.two_star_exact() / 2;
  if (!strictly_less(r, bound))
    return reject(e, "q/p = " + num(q / p) + " violates q/p < 2*/2 = " + num(to_double(bound)));
  return accept(e);
}

double px_delta(double p_min, double theta, double omega) {
  if (!(theta > 1.0 && omega > 0.0 && p_min >= 2.0))
    throw std::invalid_argument("px_delta requires theta > 1, omega > 0, p >= 2");
  return ((theta - 1.0) * p_min + 2.0 * omega) / (2.0 * (theta * p_min - 1.0));
}

ParamsResult exponential_params(double alpha, double theta, double delta, int n) {
  ExponentParams e = make_params(n, alpha, alpha / 2.0 + delta, 1.0 + delta);
  e.delta = delta;
  if (!(alpha > 2.0 && theta > 1.0 && delta > 0.0))
    return reject(e, "requires alpha > 2, theta > 1, delta > 0 strictly");
  Rational a = rat(alpha), th = rat(theta), d = rat(delta);
  Rational lhs = 2 * th * d;
  Rational rhs = a / 2 - th;
  if (!(lhs <= rhs) || !(rhs > 0))
    return reject(e, "2 theta delta = " + num(to_double(lhs)) + " exceeds alpha/2 - theta = " + num(to_double(rhs)));
  Rational beta = a / 2 + d;
  Rational need = th * (2 * d + 1);
  if (!strictly_less(need, beta))
    return reject(e, "beta = " + num(to_double(beta)) + " not above theta(2 delta + 1) = " + num(to_double(need)));
  return accept(e);
}

ParamsResult exponential_auto_params(double theta, int n) {
  ExponentParams none = make_params(n, 2.0, 1.0, 1.0);
  if (!(theta > 1.0)) theta = 1.0 + 1e-9;
  double d_min = (theta - 1.0) / (2.0 * theta);
  double cap = 2.0 + 4.0 / n;
  double d_hi = (cap - 2.0 * theta) / (4.0 * theta + 2.0);
  if (n > 2) d_hi = std::min(d_hi, 4.0 / (n * (n - 2.0)));
  if (!(d_hi > d_min)) {
    ParamsResult r = reject(none, "coefficient ratio theta = " + num(theta) +
                                      " leaves no admissible (alpha, delta); need theta closer to 1");
    r.coeff_theta = theta;
    return r;
  }
  double delta = d_min + 0.25 * (d_hi - d_min);
  double a_lo = 2.0 * theta * (1.0 + 2.0 * delta);
  double a_hi = cap - 2.0 * delta;
  double alpha = a_lo + 0.25 * (a_hi - a_lo);
  ParamsResult r = exponential_params(alpha, theta, delta, n);
  r.coeff_theta = theta;
  return r;
}

ParamsResult px_auto_params(double p_min, double theta, double omega, int n) {
  ExponentParams none = make_params(n, 2.0, 1.0, 1.0);
  if (!(theta > 1.0)) theta = 1.0 + 1e-9;
  double delta = px_delta(p_min, theta, omega);
  if (n > 2 && !(delta < 4.0 / (n * (n - 2.0)))) {
    ParamsResult r = reject(none, "delta = " + num(delta) + " violates delta < 4/(n(n-2))");
    r.coeff_theta = theta;
    return r;
  }
  double tp = theta * p_min;
  double a_lo = std::max({2.0 * theta + 4.0 * delta * (tp - 2.0) / p_min,
                          2.0 * theta - 2.0 * delta + 4.0 * delta * (tp - 1.0) / p_min, 2.0});
  double a_hi = 2.0 + 4.0 / n - 2.0 * delta;
  if (!(a_hi > a_lo)) {
    ParamsResult r = reject(none, "no alpha in (" + num(a_lo) + ", " + num(a_hi) + ")");
    r.coeff_theta = theta;
    return r;
  }
  double alpha = 0.5 * (a_lo + a_hi);
  ExponentParams e = make_params(n, alpha, alpha / 2.0 + delta, 1.0 + delta);
  e.delta = delta;
  ParamsResult r = accept(e);
  r.coeff_theta = theta;
  return r;
}

std::vector<double> lambda_sequence(const ExponentParams& p, int K) {
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  double ts = p.ctx.two_star;
  std::vector<double> l{0.0};
  for (int k = 1; k < K; ++k) l.push_back(ts / 2.0 * l.back() + (ts - p.alpha + 2.0) / 2.0 - p.gamma);
  return l;
}

std::vector<Rational> lambda_sequence_exact(const ExponentParams& p, int K) {
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  Rational ts = p.ctx.two_star_exact();
  Rational a = rat(p.alpha), g = rat(p.gamma);
  std::vector<Rational> l{Rational(0)};
  for (int k = 1; k < K; ++k) l.push_back(ts / 2 * l.back() + (ts - a + 2) / 2 - g);
  return l;
}

double lambda_closed_form(const ExponentParams& p, int k) {
  double ts = p.ctx.two_star;
  return (ts - p.alpha - 2.0 * (p.gamma - 1.0)) / (ts - 2.0) * (std::pow(ts / 2.0, k - 1) - 1.0);
}

Rational lambda_closed_form_exact(const ExponentParams& p, int k) {
  Rational ts = p.ctx.two_star_exact();
  Rational a = rat(p.alpha), g = rat(p.gamma);
  Rational pw = 1;
  for (int i = 1; i < k; ++i) pw *= ts / 2;
  return (ts - a - 2 * (g - 1)) / (ts - 2) * (pw - 1);
}

double nu_upper(const ExponentParams& p) { return p.ctx.two_star / (p.alpha - 2.0 + 2.0 * p.gamma); }

MoserSchedule moser_exponents(const ExponentParams& params, double nu, std::optional<double> mu, int K) {
  double ts = params.ctx.two_star;
  Rational tse = params.ctx.two_star_exact();
  if (nu < 1.0) throw std::invalid_argument("nu must be >= 1");
  if (!strictly_less(rat(nu), tse / (rat(params.alpha) - 2 + 2 * rat(params.gamma))))
    throw std::invalid_argument("nu must be < 2*/(alpha - 2 + 2 gamma) = " + num(nu_upper(params)));
  if (mu && !strictly_less(tse / 2, rat(*mu)))
    throw std::invalid_argument("mu must exceed 2*/2 = " + num(ts / 2.0));
  MoserSchedule s;
  s.params = params;
  s.nu = nu;
  s.mu = mu;
  s.lambdas = lambda_sequence(params, K);
  double factor = (ts - 2.0) / (ts - params.alpha - 2.0 * (params.gamma - 1.0));
  if (mu) {
    double m = *mu;
    s.theta0 = 2.0 * ts * m / ((2.0 * m - ts) * nu);
    s.theta3 = ts * (m - 1.0) / ((2.0 * m - ts) * nu);
  } else {
    s.theta0 = ts / nu;
    s.theta3 = ts / (2.0 * nu);
  }
  s.theta1 = s.theta3 * factor;
  s.theta2 = s.theta0 * factor;
  s.theta4 = 2.0 + s.theta0;
  return s;
}

MuNuChoice select_mu_nu(const ExponentParams& p) {
  MuNuChoice c;
  Rational ts = p.ctx.two_star_exact();
  Rational beta = rat(p.beta);
  Rational s = rat(p.alpha) - 2 + 2 * rat(p.gamma);
  Rational nu_max = ts / s;
  Rational half = ts / 2;
  c.beta_attainable_upper = half > nu_max ? to_double((half - 1) / (half - nu_max)) : INFINITY;
  if (!strictly_less(Rational(1), nu_max)) {
    c.reason = "nu interval [1, " + num(to_double(nu_max)) + ") is empty";
    return c;
  }
  if (beta < 1) {
    c.reason = "beta < 1";
    return c;
  }
  if (beta == 1) {
    c.accepted = true;
    c.nu = 1.0;
    return c;
  }
  auto mu_of = [&](const Rational& nu) { return (beta * nu - 1) / (beta - 1); };
  Rational nu = (1 + nu_max) / 2;
  if (!strictly_less(half, mu_of(nu))) {
    Rational lo = (1 + (beta - 1) * half) / beta;
    if (lo < 1) lo = 1;
    if (!strictly_less(lo, nu_max)) {
      c.reason = "beta = " + num(p.beta) + " outside attainable interval (1, " + num(c.beta_attainable_upper) + ")";
      return c;
    }
    nu = (lo + nu_max) / 2;
  }
  c.accepted = true;
  c.nu = to_double(nu);
  c.mu = (p.beta * c.nu - 1.0) / (p.beta - 1.0);
  return c;
}

std::string format_schedule(const MoserSchedule& s) {
  std::ostringstream o;
  const ExponentParams& p = s.params;
  o << "n " << p.ctx.n << "\n";
  o << "two_star " << num(p.ctx.two_star, 17) << "\n";
  o << "alpha " << num(p.alpha, 17) << "\n";
  o << "beta " << num(p.beta, 17) << "\n";
  o << "gamma " << num(p.gamma, 17) << "\n";
  o << "delta " << num(p.delta, 17) << "\n";
  o << "nu " << num(s.nu, 17) << "\n";
  o << "mu " << (s.mu ? num(*s.mu, 17) : std::string("unbounded")) << "\n";
  if (s.coeff_theta) o << "coeff_theta " << num(*s.coeff_theta, 17) << "\n";
  o << "lambda";
  for (double l : s.lambdas) o << " " << num(l, 17);
  o << "\n";
  o << "theta0 " << num(s.theta0, 17) << "\n";
  o << "theta1 " << num(s.theta1, 17) << "\n";
  o << "theta2 " << num(s.theta2, 17) << "\n";
  o << "theta3 " << num(s.theta3, 17) << "\n";
  o << "theta4 " << num(s.theta4, 17) << "\n";
  return o.str();
}

}  // namespace pqlab
