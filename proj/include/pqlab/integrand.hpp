#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pqlab/expr.hpp"
#include "pqlab/geometry.hpp"

namespace pqlab {

class SaturationError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Coefficient {
  Expr expr;
  double lipschitz = 0.0;

  double operator()(Point p) const { return expr(p.x, p.y); }
  static Coefficient constant(double c) { return {Expr(c), 0.0}; }
};

enum class FamilyKind {
  PLaplacian,
  Anisotropic,
  Exponential,
  PxLaplacian,
  LogPxLaplacian,
  DoublePhase,
  MultiPhase,
  VeryDegenerate
};

std::string_view kind_name(FamilyKind k);
std::optional<FamilyKind> kind_from_name(std::string_view name);

struct Family {
  FamilyKind kind = FamilyKind::PLaplacian;
  double p = 2.0;
  double q = 2.0;
  double tau = 2.0;
  double b = 0.0;
  Coefficient a = Coefficient::constant(1.0);
  Coefficient exponent = Coefficient::constant(2.0);
  Coefficient a11 = Coefficient::constant(1.0);
  Coefficient a12 = Coefficient::constant(0.0);
  Coefficient a22 = Coefficient::constant(1.0);
  bool power_base = false;
  std::optional<double> c1, c2, c3;

  bool radial() const { return kind != FamilyKind::Anisotropic; }
};

Family p_laplacian(double p, Coefficient a = Coefficient::constant(1.0));
Family anisotropic(Coefficient a11, Coefficient a12, Coefficient a22, double q);
Family anisotropic_power(Coefficient base, double p, double q, std::optional<double> c1 = {},
                         std::optional<double> c2 = {}, std::optional<double> c3 = {});
Family exponential(Coefficient a, double tau = 2.0);
Family px_laplacian(Coefficient p);
Family log_px_laplacian(Coefficient p);
Family double_phase(double p, double q, Coefficient a);
Family multi_phase(double p, double q, Coefficient a, double b);
Family very_degenerate(double p);

// Value times exp(log_scale); lets exponential densities be compared past overflow.
template <class T>
struct Scaled {
  double log_scale = 0.0;
  T value{};
};

struct ProfileValues {
  double log_scale = 0.0;
  double g = 0.0;
  double gt = 0.0;
  double gt_over_t = 0.0;
  double gtt = 0.0;
};

// Family frozen at one point x.
struct LocalDensity {
  FamilyKind kind = FamilyKind::PLaplacian;
  double a = 1.0;
  double p = 2.0;
  double q = 2.0;
  double tau = 2.0;
  double b = 0.0;
  double a11 = 1.0, a12 = 0.0, a22 = 1.0;
  bool power_base = false;

  ProfileValues profile(double t) const;
  double log_value_polar(double log_t, Vec2 dir) const;
  double value(Vec2 xi, double eps = 0.0) const;
  Vec2 grad(Vec2 xi, double eps = 0.0) const;
  double delta(Vec2 xi, Vec2 eta, double eps = 0.0) const;
  Scaled<Vec2> grad_scaled(Vec2 xi) const;
  Scaled<double> hessian_scaled(Vec2 xi, Vec2 lam) const;
};

LocalDensity local(const Family& f, Point x);

double eval_f(const Family& f, Point x, Vec2 xi);
Vec2 eval_grad_xi(const Family& f, Point x, Vec2 xi);
double hessian_quadratic_form(const Family& f, Point x, Vec2 xi, Vec2 lam);

class RadialProfile {
 public:
  static RadialProfile of(const Family& f);
  static RadialProfile power(double c, double p);
  static RadialProfile exponential(double a, double tau);

  ProfileValues at(Point x, double t) const;

 private:
  std::function<LocalDensity(Point)> local_;
};

enum class RadialCase { i, ii, iii };

struct RadialBounds {
  double lower = 0.0;
  double upper = 0.0;
  RadialCase which = RadialCase::i;
};

RadialBounds radial_bounds(const RadialProfile& profile, Point x, double t);

}  // namespace pqlab
