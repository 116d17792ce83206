#include "pqlab/integrand.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <vector>

namespace pqlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLogMax = std::log(DBL_MAX);

struct KindName {
  FamilyKind kind;
  const char* name;
};

constexpr KindName kNames[] = {
    {FamilyKind::PLaplacian, "p_laplacian"},         {FamilyKind::Anisotropic, "anisotropic"},
    {FamilyKind::Exponential, "exponential"},        {FamilyKind::PxLaplacian, "px_laplacian"},
    {FamilyKind::LogPxLaplacian, "log_px_laplacian"}, {FamilyKind::DoublePhase, "double_phase"},
    {FamilyKind::MultiPhase, "multi_phase"},         {FamilyKind::VeryDegenerate, "very_degenerate"},
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double logaddexp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

// c*t^e with t^2 = s2
double power_term(double c, double e, double s2) {
  if (c == 0.0) return 0.0;
  if (e == 2.0) return c * s2;
  return c * std::pow(s2, 0.5 * e);
}

// c*(t1^e - t0^e) with t0^2 = s2, t1^2 = s2 + d
double power_delta(double c, double e, double s2, double d) {
  if (c == 0.0) return 0.0;
  if (e == 2.0) return c * d;
  if (s2 == 0.0) return c * std::pow(std::max(d, 0.0), 0.5 * e);
  double r = std::max(d / s2, -1.0);
  if (r == -1.0) return -c * std::pow(s2, 0.5 * e);
  return c * std::pow(s2, 0.5 * e) * std::expm1(0.5 * e * std::log1p(r));
}

void add_power(ProfileValues& v, double c, double e, double t) {
  if (c == 0.0) return;
  v.g += c * std::pow(t, e);
  v.gt += c * e * std::pow(t, e - 1.0);
  double te2 = std::pow(t, e - 2.0);
  v.gt_over_t += c * e * te2;
  v.gtt += c * e * (e - 1.0) * te2;
}

double log1p_exp2(double log_t) {
  // log(log(1+t^2))
  if (log_t > 20.0) return std::log(2.0 * log_t + std::log1p(std::exp(-2.0 * log_t)));
  return std::log(std::log1p(std::exp(2.0 * log_t)));
}

double checked_exp(double log_scale, double v) {
  if (v == 0.0) return 0.0;
  double lv = log_scale + std::log(std::fabs(v));
  if (lv > kLogMax) throw SaturationError("exponential density saturates: log f = " + std::to_string(lv));
  return std::exp(log_scale) * v;
}

double quad_form(const LocalDensity& d, Vec2 u, Vec2 v) {
  return d.a11 * u.x * v.x + d.a12 * (u.x * v.y + u.y * v.x) + d.a22 * u.y * v.y;
}

}  // namespace

std::string_view kind_name(FamilyKind k) {
  for (const auto& n : kNames)
    if (n.kind == k) return n.name;
  return "unknown";
}

std::optional<FamilyKind> kind_from_name(std::string_view name) {
  for (const auto& n : kNames)
    if (name == n.name) return n.kind;
  return std::nullopt;
}

Family p_laplacian(double p, Coefficient a) {
  require(p >= 2.0, "p_laplacian requires p >= 2");
  Family f;
  f.kind = FamilyKind::PLaplacian;
  f.p = p;
  f.a = std::move(a);
  return f;
}

Family anisotropic(Coefficient a11, Coefficient a12, Coefficient a22, double q) {
  require(q >= 2.0, "anisotropic requires q >= 2");
  Family f;
  f.kind = FamilyKind::Anisotropic;
  f.p = 2.0;
  f.q = q;
  f.a11 = std::move(a11);
  f.a12 = std::move(a12);
  f.a22 = std::move(a22);
  return f;
}

Family anisotropic_power(Coefficient base, double p, double q, std::optional<double> c1,
                         std::optional<double> c2, std::optional<double> c3) {
  require(p >= 2.0 && q >= p, "anisotropic requires 2 <= p <= q");
  Family f;
  f.kind = FamilyKind::Anisotropic;
  f.power_base = true;
  f.p = p;
  f.q = q;
  f.a = std::move(base);
  f.c1 = c1;
  f.c2 = c2;
  f.c3 = c3;
  return f;
}

Family exponential(Coefficient a, double tau) {
  require(tau >= 2.0, "exponential requires tau >= 2");
  Family f;
  f.kind = FamilyKind::Exponential;
  f.tau = tau;
  f.a = std::move(a);
  return f;
}

Family px_laplacian(Coefficient p) {
  Family f;
  f.kind = FamilyKind::PxLaplacian;
  f.exponent = std::move(p);
  return f;
}

Family log_px_laplacian(Coefficient p) {
  Family f;
  f.kind = FamilyKind::LogPxLaplacian;
  f.exponent = std::move(p);
  return f;
}

Family double_phase(double p, double q, Coefficient a) {
  require(p >= 2.0 && q >= p, "double_phase requires 2 <= p <= q");
  Family f;
  f.kind = FamilyKind::DoublePhase;
  f.p = p;
  f.q = q;
  f.a = std::move(a);
  return f;
}

Family multi_phase(double p, double q, Coefficient a, double b) {
  require(p >= 2.0 && q >= p, "multi_phase requires 2 <= p <= q");
  require(b >= 0.0, "multi_phase requires b >= 0");
  Family f = double_phase(p, q, std::move(a));
  f.kind = FamilyKind::MultiPhase;
  f.b = b;
  return f;
}

Family very_degenerate(double p) {
  require(p >= 2.0, "very_degenerate requires p >= 2");
  Family f;
  f.kind = FamilyKind::VeryDegenerate;
  f.p = p;
  return f;
}

LocalDensity local(const Family& f, Point x) {
  LocalDensity d;
  d.kind = f.kind;
  d.p = f.p;
  d.q = f.q;
  d.tau = f.tau;
  d.b = f.b;
  d.power_base = f.power_base;
  switch (f.kind) {
    case FamilyKind::PLaplacian:
      d.a = f.a(x);
      if (!(d.a >= 0.0)) throw DomainError("p_laplacian coefficient must be nonnegative");
      break;
    case FamilyKind::Anisotropic:
      if (f.power_base) {
        d.a = f.a(x);
        if (!(d.a > 0.0)) throw DomainError("anisotropic base coefficient must be positive");
      } else {
        d.a11 = f.a11(x);
        d.a12 = f.a12(x);
        d.a22 = f.a22(x);
        if (!(d.a11 > 0.0 && d.a11 * d.a22 - d.a12 * d.a12 > 0.0))
          throw DomainError("anisotropic matrix must be positive definite");
      }
      break;
    case FamilyKind::Exponential:
      d.a = f.a(x);
      if (!(d.a > 0.0)) throw DomainError("exponential coefficient must be positive");
      break;
    case FamilyKind::PxLaplacian:
    case FamilyKind::LogPxLaplacian:
      d.p = f.exponent(x);
      if (!(d.p >= 2.0)) throw DomainError("variable exponent must be >= 2");
      break;
    case FamilyKind::DoublePhase:
    case FamilyKind::MultiPhase:
      d.a = f.a(x);
      if (!(d.a >= 0.0)) throw DomainError("double phase coefficient must be nonnegative");
      break;
    case FamilyKind::VeryDegenerate:
      break;
  }
  return d;
}

ProfileValues LocalDensity::profile(double t) const {
  ProfileValues v;
  switch (kind) {
    case FamilyKind::PLaplacian:
      add_power(v, a, p, t);
      break;
    case FamilyKind::PxLaplacian:
      add_power(v, 1.0, p, t);
      break;
    case FamilyKind::DoublePhase:
      add_power(v, 1.0, p, t);
      add_power(v, a, q, t);
      break;
    case FamilyKind::MultiPhase:
      add_power(v, 1.0, p, t);
      add_power(v, a, q, t);
      add_power(v, b, 2.0 * q - p, t);
      break;
    case FamilyKind::Exponential: {
      v.log_scale = a * std::pow(t, tau);
      v.g = 1.0;
      double gt = a * tau * std::pow(t, tau - 1.0);
      double t2 = std::pow(t, tau - 2.0);
      v.gt = gt;
      v.gt_over_t = a * tau * t2;
      v.gtt = a * tau * (tau - 1.0) * t2 + gt * gt;
      break;
    }
    case FamilyKind::LogPxLaplacian: {
      double t2 = t * t;
      double L = std::log1p(t2);
      double tp = std::pow(t, p);
      double tp2 = std::pow(t, p - 2.0);
      double w = 1.0 + t2;
      v.g = tp * L;
      v.gt = p * std::pow(t, p - 1.0) * L + 2.0 * tp * t / w;
      v.gt_over_t = p * tp2 * L + 2.0 * tp / w;
      v.gtt = p * (p - 1.0) * tp2 * L + 4.0 * p * tp / w + 2.0 * tp * (1.0 - t2) / (w * w);
      break;
    }
    case FamilyKind::VeryDegenerate: {
      double u = t - 1.0;
      if (u <= 0.0) break;
      v.g = std::pow(u, p) / p;
      v.gt = std::pow(u, p - 1.0);
      v.gt_over_t = v.gt / t;
      v.gtt = (p - 1.0) * std::pow(u, p - 2.0);
      break;
    }
    case FamilyKind::Anisotropic:
      throw DomainError("anisotropic density has no radial profile");
  }
  return v;
}

double LocalDensity::log_value_polar(double log_t, Vec2 dir) const {
  switch (kind) {
    case FamilyKind::PLaplacian:
      return a > 0.0 ? std::log(a) + p * log_t : -kInf;
    case FamilyKind::PxLaplacian:
      return p * log_t;
    case FamilyKind::DoublePhase:
    case FamilyKind::MultiPhase: {
      double r = p * log_t;
      if (a > 0.0) r = logaddexp(r, std::log(a) + q * log_t);
      if (kind == FamilyKind::MultiPhase && b > 0.0) r = logaddexp(r, std::log(b) + (2.0 * q - p) * log_t);
      return r;
    }
    case FamilyKind::Exponential:
      return a * std::exp(tau * log_t);
    case FamilyKind::LogPxLaplacian:
      return p * log_t + log1p_exp2(log_t);
    case FamilyKind::VeryDegenerate: {
      if (log_t <= 0.0) return -kInf;
      double lu = log_t > 30.0 ? log_t + std::log1p(-std::exp(-log_t)) : std::log(std::expm1(log_t));
      return p * lu - std::log(p);
    }
    case FamilyKind::Anisotropic: {
      double n2 = norm2(dir);
      Vec2 u = dir * (1.0 / std::sqrt(n2));
      double base;
      if (power_base)
        base = std::log(a) + p * log_t;
      else
        base = 2.0 * log_t + std::log(quad_form(*this, u, u));
      double y = std::fabs(u.y);
      if (y == 0.0) return base;
      return logaddexp(base, q * (log_t + std::log(y)));
    }
  }
  return -kInf;
}

double LocalDensity::value(Vec2 xi, double eps) const {
  double s2 = norm2(xi) + eps * eps;
  if (kind == FamilyKind::Anisotropic) {
    double base = power_base ? power_term(a, p, s2) : quad_form(*this, xi, xi);
    return base + power_term(1.0, q, xi.y * xi.y + eps * eps);
  }
  ProfileValues v = profile(std::sqrt(s2));
  return checked_exp(v.log_scale, v.g);
}

Vec2 LocalDensity::grad(Vec2 xi, double eps) const {
  if (kind == FamilyKind::Anisotropic) {
    Vec2 g;
    if (power_base) {
      double s2 = norm2(xi) + eps * eps;
      double c = a * p * (p == 2.0 ? 1.0 : std::pow(s2, 0.5 * p - 1.0));
      g = xi * c;
    } else {
      g = {2.0 * (a11 * xi.x + a12 * xi.y), 2.0 * (a12 * xi.x + a22 * xi.y)};
    }
    double s2y = xi.y * xi.y + eps * eps;
    g.y += q * (q == 2.0 ? 1.0 : std::pow(s2y, 0.5 * q - 1.0)) * xi.y;
    return g;
  }
  double s = std::sqrt(norm2(xi) + eps * eps);
  ProfileValues v = profile(s);
  if (s == 0.0) return {0.0, 0.0};
  double c = checked_exp(v.log_scale, v.gt_over_t);
  return xi * c;
}

double LocalDensity::delta(Vec2 xi, Vec2 eta, double eps) const {
  double s2 = norm2(xi) + eps * eps;
  double d = 2.0 * dot(xi, eta) + norm2(eta);
  switch (kind) {
    case FamilyKind::Anisotropic: {
      double base = power_base ? power_delta(a, p, s2, d) : 2.0 * quad_form(*this, xi, eta) + quad_form(*this, eta, eta);
      double dy = 2.0 * xi.y * eta.y + eta.y * eta.y;
      return base + power_delta(1.0, q, xi.y * xi.y + eps * eps, dy);
    }
    case FamilyKind::PLaplacian:
      return power_delta(a, p, s2, d);
    case FamilyKind::PxLaplacian:
      return power_delta(1.0, p, s2, d);
    case FamilyKind::DoublePhase:
      return power_delta(1.0, p, s2, d) + power_delta(a, q, s2, d);
    case FamilyKind::MultiPhase:
      return power_delta(1.0, p, s2, d) + power_delta(a, q, s2, d) + power_delta(b, 2.0 * q - p, s2, d);
    case FamilyKind::Exponential: {
      double l0 = a * power_term(1.0, tau, s2);
      double dl = a * power_delta(1.0, tau, s2, d);
      double r = std::exp(l0) * std::expm1(dl);
      if (!std::isfinite(r) || l0 + dl > kLogMax) throw SaturationError("exponential density saturates");
      return r;
    }
    case FamilyKind::LogPxLaplacian: {
      double A0 = power_term(1.0, p, s2);
      double L0 = std::log1p(s2);
      double dA = power_delta(1.0, p, s2, d);
      double dL = std::log1p(std::max(d / (1.0 + s2), -1.0));
      return A0 * dL + dA * (L0 + dL);
    }
    case FamilyKind::VeryDegenerate: {
      double s0 = std::sqrt(s2);
      double s1 = std::sqrt(std::max(s2 + d, 0.0));
      if (s0 <= 1.0 && s1 <= 1.0) return 0.0;
      if (s0 <= 1.0) return std::pow(s1 - 1.0, p) / p;
      if (s1 <= 1.0) return -std::pow(s0 - 1.0, p) / p;
      double u0 = s0 - 1.0;
      double du = d / (s1 + s0);
      return std::pow(u0, p) / p * std::expm1(p * std::log1p(std::max(du / u0, -1.0)));
    }
  }
  return 0.0;
}

Scaled<Vec2> LocalDensity::grad_scaled(Vec2 xi) const {
  if (kind == FamilyKind::Anisotropic) return {0.0, grad(xi)};
  double t = norm(xi);
  if (t == 0.0) return {0.0, {0.0, 0.0}};
  ProfileValues v = profile(t);
  return {v.log_scale, xi * v.gt_over_t};
}

Scaled<double> LocalDensity::hessian_scaled(Vec2 xi, Vec2 lam) const {
  double t2 = norm2(xi);
  double l2 = norm2(lam);
  if (kind == FamilyKind::Anisotropic) {
    double h;
    if (power_base) {
      if (t2 == 0.0) {
        if (p == 2.0)
          h = 2.0 * a * l2;
        else
          h = 0.0;
      } else {
        double xl = dot(xi, lam);
        h = a * p * (t2 * l2 + (p - 2.0) * xl * xl) * std::pow(t2, 0.5 * p - 2.0);
      }
    } else {
      h = 2.0 * quad_form(*this, lam, lam);
    }
    double y = std::fabs(xi.y);
    double w = (q == 2.0) ? 2.0 : (y == 0.0 ? 0.0 : q * (q - 1.0) * std::pow(y, q - 2.0));
    return {0.0, h + w * lam.y * lam.y};
  }
  double t = std::sqrt(t2);
  ProfileValues v = profile(t);
  if (t == 0.0) {
    if (!std::isfinite(v.gt_over_t) || !std::isfinite(v.gtt) || v.gt_over_t != v.gtt)
      throw DomainError("hessian form undefined at xi = 0 for this profile");
    return {v.log_scale, v.gt_over_t * l2};
  }
  if (!std::isfinite(v.gt_over_t) || !std::isfinite(v.gtt)) throw DomainError("singular radial profile");
  double xl = dot(xi, lam);
  return {v.log_scale, (v.gtt - v.gt_over_t) * xl * xl / t2 + v.gt_over_t * l2};
}

double eval_f(const Family& f, Point x, Vec2 xi) { return local(f, x).value(xi); }

Vec2 eval_grad_xi(const Family& f, Point x, Vec2 xi) { return local(f, x).grad(xi); }

double hessian_quadratic_form(const Family& f, Point x, Vec2 xi, Vec2 lam) {
  Scaled<double> h = local(f, x).hessian_scaled(xi, lam);
  return checked_exp(h.log_scale, h.value);
}

RadialProfile RadialProfile::of(const Family& f) {
  if (!f.radial()) throw DomainError("family is not radial");
  RadialProfile r;
  r.local_ = [f](Point x) { return local(f, x); };
  return r;
}

RadialProfile RadialProfile::power(double c, double p) {
  require(p > 1.0 && c > 0.0, "power profile requires c > 0, p > 1");
  LocalDensity d;
  d.kind = FamilyKind::PLaplacian;
  d.a = c;
  d.p = p;
  RadialProfile r;
  r.local_ = [d](Point) { return d; };
  return r;
}

RadialProfile RadialProfile::exponential(double a, double tau) {
  require(a > 0.0 && tau >= 2.0, "exponential profile requires a > 0, tau >= 2");
  LocalDensity d;
  d.kind = FamilyKind::Exponential;
  d.a = a;
  d.tau = tau;
  RadialProfile r;
  r.local_ = [d](Point) { return d; };
  return r;
}

ProfileValues RadialProfile::at(Point x, double t) const { return local_(x).profile(t); }

RadialBounds radial_bounds(const RadialProfile& profile, Point x, double t) {
  if (!(t > 0.0)) throw DomainError("radial_bounds requires t > 0");
  ProfileValues v = profile.at(x, t);
  RadialBounds rb;
  double s = std::exp(v.log_scale);
  rb.lower = std::min(v.gt_over_t, v.gtt) * s;
  rb.upper = std::max(v.gt_over_t, v.gtt) * s;
  bool up = true, down = true;
  std::vector<double> ts;
  for (int k = 0; k <= 60; ++k) ts.push_back(std::pow(10.0, -3.0 + 0.1 * k));
  ts.push_back(t);
  for (double s_ : ts) {
    ProfileValues w = profile.at(x, s_);
    double diff = w.gtt - w.gt_over_t;
    double tol = 1e-12 * std::max(std::fabs(w.gtt), std::fabs(w.gt_over_t));
    if (diff < -tol) up = false;
    if (diff > tol) down = false;
  }
  if (up)
    rb.which = RadialCase::ii;
  else if (down)
    rb.which = RadialCase::iii;
  else
    rb.which = RadialCase::i;
  return rb;
}

}  // namespace pqlab
