#include "pqlab/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pqlab/format.hpp"

namespace pqlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double logaddexp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

double lg(double t) { return t > 0.0 ? std::log(t) : -kInf; }

double lc(double c) { return c > 0.0 ? std::log(c) : -kInf; }

// log(c t^e), with t^0 = 1
double log_pow(double c, double e, double t) {
  if (c <= 0.0) return -kInf;
  if (e == 0.0) return std::log(c);
  return std::log(c) + e * lg(t);
}

// log(c (t^e1 + t^e2))
double log_two_pow(double c, double e1, double e2, double t) {
  return logaddexp(log_pow(c, e1, t), log_pow(c, e2, t));
}

GrowthFunction make(std::function<double(double)> f, std::string label) { return {std::move(f), std::move(label)}; }

std::pair<double, double> eigen_range(const Family& f, Point c, double R) {
  double lo = kInf, hi = -kInf;
  const int m = 41;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      double x = -R + 2.0 * R * i / (m - 1), y = -R + 2.0 * R * j / (m - 1);
      if (x * x + y * y > R * R * (1.0 + 1e-12)) continue;
      Point p{c.x + x, c.y + y};
      double a = f.a11(p), b = f.a12(p), d = f.a22(p);
      double mid = 0.5 * (a + d), rad = std::hypot(0.5 * (a - d), b);
      lo = std::min(lo, mid - rad);
      hi = std::max(hi, mid + rad);
    }
  double L = std::max({f.a11.lipschitz, f.a12.lipschitz, f.a22.lipschitz});
  double pad = 2.0 * L * std::sqrt(2.0) * 2.0 * R / (m - 1);
  return {lo - pad, hi + pad};
}

// log of c * integral_0^t s^{(e-2)/2} ds = c * t^{e/2} / (e/2)
double log_power_integral(double c, double e, double t) {
  if (t <= 0.0 || c <= 0.0) return -kInf;
  return std::log(c) + std::log(2.0 / e) + 0.5 * e * std::log(t);
}

}  // namespace

Range coefficient_range(const Coefficient& c, Point center, double R, int samples) {
  Range r{kInf, -kInf};
  for (int j = 0; j < samples; ++j)
    for (int i = 0; i < samples; ++i) {
      double x = -R + 2.0 * R * i / (samples - 1), y = -R + 2.0 * R * j / (samples - 1);
      if (x * x + y * y > R * R * (1.0 + 1e-12)) continue;
      double v = c({center.x + x, center.y + y});
      r.lo = std::min(r.lo, v);
      r.hi = std::max(r.hi, v);
    }
  double pad = c.lipschitz * std::sqrt(2.0) * R / (samples - 1);
  r.lo -= pad;
  r.hi += pad;
  return r;
}

GrowthTriple catalog_triple(const Family& f, Point center, double R, double omega) {
  GrowthTriple tr;
  const double r2 = std::sqrt(2.0);
  switch (f.kind) {
    case FamilyKind::PLaplacian: {
      Range a = coefficient_range(f.a, center, R);
      double p = f.p, amin = std::max(a.lo, 0.0), amax = a.hi, L = f.a.lipschitz;
      tr.g1 = gf_power(p * amin, p - 2.0);
      tr.g2 = gf_shifted_power(p * (p - 1.0) * amax, p - 2.0);
      if (p == 2.0) tr.g2 = gf_power(2.0 * amax, 0.0);
      tr.g3 = gf_power(r2 * L * p, p - 1.0);
      tr.log_sqrt_g1_integral = [c = std::sqrt(p * amin), p](double t) { return log_power_integral(c, p, t); };
      break;
    }
    case FamilyKind::Anisotropic: {
      double q = f.q;
      if (f.power_base) {
        Range b = coefficient_range(f.a, center, R);
        double p = f.p, L = f.a.lipschitz;
        double c1 = f.c1.value_or(p * b.lo);
        double c2 = f.c2.value_or(p * (p - 1.0) * b.hi);
        double c3 = f.c3.value_or(r2 * L * p);
        tr.g1 = gf_power(c1, p - 2.0);
        tr.g2 = gf_one_plus_power(2.0 * c2 + q * (q - 1.0), q - 2.0);
        tr.g3 = gf_power(c3, p - 1.0);
        tr.log_sqrt_g1_integral = [c = std::sqrt(c1), p](double t) { return log_power_integral(c, p, t); };
      } else {
        auto [lmin, lmax] = eigen_range(f, center, R);
        if (!(lmin > 0.0)) throw std::invalid_argument("anisotropic matrix not uniformly positive on the ball");
        double L = std::max({f.a11.lipschitz, f.a12.lipschitz, f.a22.lipschitz});
        tr.g1 = gf_power(2.0 * lmin, 0.0);
        tr.g2 = gf_one_plus_power(2.0 * lmax + q * (q - 1.0), q - 2.0);
        tr.g3 = gf_power(4.0 * r2 * L, 1.0);
        tr.log_sqrt_g1_integral = [c = std::sqrt(2.0 * lmin)](double t) { return lc(c) + lg(t); };
      }
      break;
    }
    case FamilyKind::Exponential: {
      Range a = coefficient_range(f.a, center, R);
      double p = a.lo, q = a.hi, tau = f.tau, L = f.a.lipschitz;
      if (!(p > 0.0)) throw std::invalid_argument("exponential coefficient not positive on the ball");
      double c2 = std::max(q * tau * (tau - 1.0), q * q * tau * tau);
      double c3 = r2 * L * tau * std::max(1.0, q);
      tr.g1 = make([=](double t) { return log_pow(tau * p, tau - 2.0, t) + p * std::pow(t, tau); },
                   num(tau * p) + "*t^" + num(tau - 2.0) + "*exp(" + num(p) + "*t^" + num(tau) + ")");
      tr.g2 = make(
          [=](double t) {
            return log_pow(c2, tau - 2.0, t) + logaddexp(0.0, tau * lg(t)) + q * std::pow(t, tau);
          },
          num(c2) + "*t^" + num(tau - 2.0) + "*(1+t^" + num(tau) + ")*exp(" + num(q) + "*t^" + num(tau) + ")");
      tr.g3 = make(
          [=](double t) {
            return log_pow(c3, tau - 1.0, t) + logaddexp(0.0, tau * lg(t)) + q * std::pow(t, tau);
          },
          num(c3) + "*t^" + num(tau - 1.0) + "*(1+t^" + num(tau) + ")*exp(" + num(q) + "*t^" + num(tau) + ")");
      break;
    }
    case FamilyKind::PxLaplacian:
    case FamilyKind::LogPxLaplacian: {
      Range e = coefficient_range(f.exponent, center, R);
      double p = std::max(e.lo, 2.0), q = e.hi, L = f.exponent.lipschitz;
      if (f.kind == FamilyKind::PxLaplacian) {
        double c2 = q * (q - 1.0);
        double c3 = r2 * L * (1.0 + q / omega);
        tr.g1 = make([=](double t) { return std::min(log_pow(p, p - 2.0, t), log_pow(p, q - 2.0, t)); },
                     num(p) + "*min(t^" + num(p - 2.0) + ",t^" + num(q - 2.0) + ")");
        tr.g2 = make([=](double t) { return std::max(log_pow(c2, p - 2.0, t), log_pow(c2, q - 2.0, t)); },
                     num(c2) + "*max(t^" + num(p - 2.0) + ",t^" + num(q - 2.0) + ")");
        tr.g3 = make([=](double t) { return log_two_pow(c3, p - 1.0 - omega, q - 1.0 + omega, t); },
                     num(c3) + "*(t^" + num(p - 1.0 - omega) + "+t^" + num(q - 1.0 + omega) + ")");
        tr.log_sqrt_g1_integral = [=](double t) {
          double c = std::sqrt(p);
          if (t <= 1.0) return log_power_integral(c, q, t);
          // c (2/q + (t^{p/2} - 1) 2/p)
          double big = std::log(2.0 / p) + 0.5 * p * std::log(t);
          double rest = 2.0 / q - 2.0 / p;
          return std::log(c) + big + std::log1p(rest * std::exp(-big));
        };
      } else {
        double w = omega;
        double c2 = q * (q - 1.0) + 4.0 * q + 2.0;
        double c3 = r2 * L * ((1.0 + 2.0 / w) * (1.0 + q / w) + 2.0 / w);
        auto logL = [](double t) { return t > 0.0 ? std::log(std::log1p(t * t)) : -kInf; };
        tr.g1 = make(
            [=](double t) { return std::min(log_pow(p, p - 2.0, t), log_pow(p, q - 2.0, t)) + logL(t); },
            num(p) + "*min(t^" + num(p - 2.0) + ",t^" + num(q - 2.0) + ")*log(1+t^2)");
        tr.g2 = make(
            [=](double t) {
              return std::max(log_pow(c2, p - 2.0, t), log_pow(c2, q - 2.0, t)) + std::log1p(std::log1p(t * t));
            },
            num(c2) + "*max(t^" + num(p - 2.0) + ",t^" + num(q - 2.0) + ")*(1+log(1+t^2))");
        tr.g3 = make([=](double t) { return log_two_pow(c3, p - 1.0 - w, q - 1.0 + 2.0 * w, t); },
                     num(c3) + "*(t^" + num(p - 1.0 - w) + "+t^" + num(q - 1.0 + 2.0 * w) + ")");
      }
      break;
    }
    case FamilyKind::DoublePhase:
    case FamilyKind::MultiPhase: {
      Range a = coefficient_range(f.a, center, R);
      double p = f.p, q = f.q, amax = std::max(a.hi, 0.0), L = f.a.lipschitz;
      double top = 2.0 * q - p;
      double c2 = p * (p - 1.0) + amax * q * (q - 1.0) + f.b * top * (top - 1.0);
      tr.g1 = gf_power(p, p - 2.0);
      tr.g2 = make([=](double t) { return log_two_pow(c2, p - 2.0, top - 2.0, t); },
                   num(c2) + "*(t^" + num(p - 2.0) + "+t^" + num(top - 2.0) + ")");
      tr.g3 = gf_power(r2 * L * q, q - 1.0);
      tr.log_sqrt_g1_integral = [c = std::sqrt(p), p](double t) { return log_power_integral(c, p, t); };
      break;
    }
    case FamilyKind::VeryDegenerate: {
      double p = f.p;
      tr.g1 = make([=](double t) { return t > 1.0 ? (p - 1.0) * std::log(t - 1.0) - std::log(t) : -kInf; },
                   "(t-1)_+^" + num(p - 1.0) + "/t");
      tr.g2 = make([=](double t) { return t > 1.0 ? std::log(p - 1.0) + (p - 2.0) * std::log(t - 1.0) : -kInf; },
                   num(p - 1.0) + "*(t-1)_+^" + num(p - 2.0));
      tr.g3 = make([](double) { return -kInf; }, "0");
      break;
    }
  }
  return tr;
}

std::optional<double> coefficient_theta(const Family& f, Point center, double R) {
  switch (f.kind) {
    case FamilyKind::Exponential: {
      Range a = coefficient_range(f.a, center, R);
      if (!(a.lo > 0.0)) throw std::invalid_argument("exponential coefficient not positive on the ball");
      return a.hi / a.lo;
    }
    case FamilyKind::PxLaplacian:
    case FamilyKind::LogPxLaplacian: {
      Range e = coefficient_range(f.exponent, center, R);
      return e.hi / std::max(e.lo, 2.0);
    }
    default:
      return std::nullopt;
  }
}

ParamsResult auto_params(const Family& f, Point center, double R, int n, double omega) {
  switch (f.kind) {
    case FamilyKind::PLaplacian:
    case FamilyKind::VeryDegenerate: {
      ParamsResult r;
      r.accepted = true;
      r.params = make_params(n, 2.0, 1.0, 1.0);
      return r;
    }
    case FamilyKind::Anisotropic:
      return anisotropic_params(f.power_base ? f.p : 2.0, std::max(f.q, f.power_base ? f.p : 2.0), n);
    case FamilyKind::MultiPhase:
      return double_phase_params(f.p, f.q, n);
    case FamilyKind::DoublePhase: {
      ParamsResult r = double_phase_params(f.p, f.q, n);
      if (!r.accepted || f.q == f.p) return r;
      // without the b t^{2q-p} term, t^{2q-p} <= M (1 + f)^beta needs beta >= (2q-p)/q where a > 0
      Range a = coefficient_range(f.a, center, R);
      double beta = (2.0 * f.q - f.p) / (a.lo > 0.0 ? f.q : f.p);
      r.params = make_params(n, r.params.alpha, beta, 1.0);
      ExponentBoundsReport b = check_exponent_bounds(r.params);
      if (b.verdict != Verdict::pass) {
        r.accepted = false;
        r.reason = "beta = " + num(beta) + " needed on this ball: " + b.beta.note;
      }
      return r;
    }
    case FamilyKind::Exponential:
      return exponential_auto_params(*coefficient_theta(f, center, R), n);
    case FamilyKind::PxLaplacian:
    case FamilyKind::LogPxLaplacian: {
      Range e = coefficient_range(f.exponent, center, R);
      double w = f.kind == FamilyKind::LogPxLaplacian ? 2.0 * omega : omega;
      return px_auto_params(std::max(e.lo, 2.0), *coefficient_theta(f, center, R), w, n);
    }
  }
  throw std::logic_error("unknown family");
}

}  // namespace pqlab
