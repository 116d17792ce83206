#include <doctest.h>

#include <cmath>
#include <random>

#include "families.hpp"
#include "pqlab/catalog.hpp"
#include "pqlab/exponents.hpp"
#include "pqlab/growth.hpp"
#include "pqlab/quadrature.hpp"

using namespace pqlab;

namespace {

GrowthFunction zero() {
  return GrowthFunction::from_linear([](double) { return 0.0; }, "0");
}

GrowthTriple triple(GrowthFunction g1, GrowthFunction g2, GrowthFunction g3 = zero()) {
  GrowthTriple t;
  t.g1 = std::move(g1);
  t.g2 = std::move(g2);
  t.g3 = std::move(g3);
  return t;
}

const Point kCenter{0.5, 0.5};
constexpr double kR = 0.4;

}  // namespace

TEST_SUITE("growth") {
  TEST_CASE("ellipticity sandwich") {
    SampleSpec spec = ball_sample_spec(kCenter, kR);
    CHECK(check_ellipticity_sandwich(p_laplacian(3.0), triple(gf_power(3, 1), gf_power(6, 1)), spec).verdict ==
          Verdict::pass);
    ConditionReport bad = check_ellipticity_sandwich(p_laplacian(4.0), triple(gf_power(4, 2), gf_power(1, 1)), spec);
    CHECK(bad.verdict == Verdict::fail);
    CHECK(bad.worst_t > 1.0);
    Family e = exponential({Expr::parse("0.5 + 0.1*x"), 0.1});
    CHECK(check_ellipticity_sandwich(e, catalog_triple(e, kCenter, kR), spec).verdict == Verdict::pass);
  }

  TEST_CASE("growth A") {
    SampleSpec spec = ball_sample_spec(kCenter, kR);
    CHECK(check_growth_A(p_laplacian(3.0), triple(gf_power(3, 1), gf_power(6, 1)), spec).verdict == Verdict::pass);
    Family e = exponential({Expr::parse("0.5 + 0.1*x"), 0.1});
    CHECK(check_growth_A(e, catalog_triple(e, kCenter, kR), spec).verdict == Verdict::pass);
    Family px = px_laplacian({Expr::parse("2 + 0.1*x"), 0.1});
    CHECK(check_growth_A(px, catalog_triple(px, kCenter, kR), spec).verdict == Verdict::pass);
    Family steep = p_laplacian(3.0, {Expr::parse("1 + 2*x"), 2.0});
    CHECK(check_growth_A(steep, triple(gf_power(3, 1), gf_power(18, 1), gf_power(1e-3, 2)), spec).verdict ==
          Verdict::fail);
  }

  TEST_CASE("11M examples") {
    std::vector<double> ts = default_t_grid();
    for (double p : {2.0, 3.0, 4.5}) {
      GrowthTriple nat = triple(gf_power(1, p - 2), gf_shifted_power(1, p - 2));
      CHECK(check_11M(nat, make_params(3, 2.0, 1.0, 1.0), ts).verdict == Verdict::pass);
    }
    // p,q growth passes iff q <= alpha p / 2
    double p = 2.0;
    for (double q : {2.5, 3.0, 3.5}) {
      GrowthTriple pq = triple(gf_power(1, p - 2), gf_shifted_power(1, q - 2));
      CHECK(check_11M(pq, make_params(3, 3.0, 1.0, 1.0), ts).verdict ==
            (q <= 3.0 * p / 2 ? Verdict::pass : Verdict::fail));
    }
    double q = 3.0;
    GrowthTriple an = triple(gf_power(1, p - 2), gf_one_plus_power(1, q - 2));
    CHECK(check_11M(an, make_params(3, 2 * q / p - 0.1, 1.0, 1.0), ts).verdict == Verdict::fail);
    CHECK(check_11M(an, make_params(3, 2 * q / p, 1.0, 1.0), ts).verdict == Verdict::pass);
  }

  TEST_CASE("12M examples") {
    SampleSpec spec = ball_sample_spec(kCenter, kR);
    Family f = p_laplacian(3.0);
    CHECK(check_12M(f, triple(gf_power(3, 1), gf_shifted_power(6, 1)), make_params(3, 2, 1, 1), spec).verdict ==
          Verdict::pass);
    Family an = anisotropic(Coefficient::constant(1), Coefficient::constant(0), Coefficient::constant(1), 2.5);
    GrowthTriple tr = catalog_triple(an, kCenter, kR);
    CHECK(check_12M(an, tr, make_params(3, 2.5, 1.25, 1), spec).verdict == Verdict::pass);
    Family mp = multi_phase(2, 3, {Expr::parse("x^2 + y^2"), 2}, 1.0);
    CHECK(check_12M(mp, catalog_triple(mp, kCenter, kR), make_params(2, 4, 1, 1), spec).verdict == Verdict::pass);
  }

  TEST_CASE("A3 examples") {
    std::vector<double> ts = default_t_grid();
    Family an = anisotropic(Coefficient::constant(1), {Expr::parse("0.2*x"), 0.2}, Coefficient::constant(1), 3.0);
    CHECK(check_A3(catalog_triple(an, kCenter, kR), make_params(3, 3, 1.5, 1), ts).verdict == Verdict::pass);
    Family px = px_laplacian({Expr::parse("2 + 0.02*x"), 0.02});
    GrowthTriple tr = catalog_triple(px, kCenter, kR, 0.01);
    CHECK(check_A3(tr, make_params(2, 2.5, 1.25, 1.0), ts).verdict == Verdict::fail);
    double d = px_delta(2.0, 1.01, 0.01);
    CHECK(check_A3(tr, make_params(2, 2.5, 1.25 + d, 1.0 + d), ts).verdict == Verdict::pass);
  }

  TEST_CASE("exponent bounds") {
    CHECK(check_exponent_bounds(make_params(3, 2, 1, 1)).verdict == Verdict::pass);
    CHECK(check_exponent_bounds(make_params(3, 6, 1, 1)).verdict == Verdict::fail);
    ExponentBoundsReport r = check_exponent_bounds(make_params(3, 2.5, 1.25, 1));
    CHECK(r.verdict == Verdict::pass);
    CHECK(r.beta_upper == doctest::Approx(10.0 / 3));
    CHECK(check_exponent_bounds(make_params(3, 2.5, 10.0 / 3, 1)).verdict == Verdict::fail);
    CHECK(check_exponent_bounds(make_params(3, 2, 0.9, 1)).verdict == Verdict::fail);
    CHECK(std::isinf(check_exponent_bounds(make_params(3, 2, 1, 1)).beta_upper));
  }

  TEST_CASE("tail limit") {
    TailResult a = tail_limit([](double t) { return t * t / (1 + t * t); }, 1.0);
    CHECK(a.stabilized);
    CHECK(a.estimate == doctest::Approx(1.0).epsilon(1e-3));
    TailResult b = tail_limit([](double t) { return std::sqrt(t); }, 1.0);
    CHECK(b.diverging);
    double p = 3.0, q = 3.0;
    TailResult c =
        tail_limit([&](double t) { return std::pow(t, p / 2) / ((1 + t) * std::pow(1 + std::pow(t, q - 2), 0.5)); }, 1.0);
    CHECK(c.stabilized);
    CHECK_FALSE(c.diverging);
    CHECK(std::isfinite(c.estimate));
    for (double k : {0.0, 0.5, 3.0, 1e6}) {
      TailResult r = tail_limit([k](double) { return k; }, 1.0);
      CHECK(r.stabilized);
      CHECK(r.estimate == doctest::Approx(k).epsilon(1e-12));
    }
  }

  TEST_CASE("property: quadrature matches closed forms") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> lt(-3.0, 3.0);
    std::vector<Family> fams{p_laplacian(3.0), px_laplacian({Expr::parse("2 + 0.5*x"), 0.5}),
                             double_phase(2.0, 3.5, {Expr::parse("x^2"), 2.0}),
                             anisotropic(Coefficient::constant(2), Coefficient::constant(0), Coefficient::constant(1), 3)};
    for (const Family& f : fams) {
      GrowthTriple tr = catalog_triple(f, kCenter, kR);
      REQUIRE(tr.log_sqrt_g1_integral);
      for (int k = 0; k < 20; ++k) {
        double t = std::pow(10.0, lt(rng));
        double exact = tr.log_sqrt_g1_integral(t);
        double quad = log_sqrt_g1_integral_quadrature(tr.g1, t);
        CHECK(std::fabs(std::expm1(quad - exact)) <= 1e-8);
      }
    }
    double l = log_integral_monotone([](double s) { return s > 0 ? std::log(3.0) + 2 * std::log(s) : -INFINITY; }, 2.0);
    CHECK(l == doctest::Approx(std::log(8.0)).epsilon(1e-10));
    double e = log_integral_monotone([](double s) { return s; }, 700.0);
    CHECK(e == doctest::Approx(700.0 + std::log1p(-std::exp(-700.0))).epsilon(1e-12));
  }

  TEST_CASE("property: 11M worst ratio nonincreasing in alpha") {
    std::vector<double> ts = default_t_grid();
    GrowthTriple tr = triple(gf_power(2, 0), gf_one_plus_power(4, 1.5));
    double prev = INFINITY;
    for (double alpha = 3.5; alpha < 5.9; alpha += 0.3) {
      ConditionReport r = check_11M(tr, make_params(3, alpha, 1.0, 1.0), ts);
      CHECK(r.worst_ratio <= prev * (1 + 1e-12));
      prev = r.worst_ratio;
    }
  }

  TEST_CASE("property: catalog triples pass all checks with derived parameters") {
    for (const auto& nf : fixtures::catalog()) {
      CAPTURE(nf.name);
      int n = 2;
      ParamsResult pr = auto_params(nf.f, kCenter, kR, n);
      if (!pr.accepted) {
        MESSAGE("auto params rejected: " << pr.reason);
        continue;
      }
      GrowthTriple tr = catalog_triple(nf.f, kCenter, kR);
      SampleSpec spec = ball_sample_spec(kCenter, kR, 3);
      if (nf.f.kind != FamilyKind::VeryDegenerate) CHECK(validate_triple(tr, spec.ts).empty());
      for (const ConditionReport& r :
           {check_ellipticity_sandwich(nf.f, tr, spec), check_growth_A(nf.f, tr, spec), check_11M(tr, pr.params, spec.ts),
            check_12M(nf.f, tr, pr.params, spec), check_A3(tr, pr.params, spec.ts)}) {
        CAPTURE(r.id);
        CAPTURE(r.note);
        CHECK(r.verdict == Verdict::pass);
        CHECK(std::isfinite(r.fitted_M));
      }
    }
  }

  TEST_CASE("report rows") {
    ConditionReport r;
    r.id = "11M";
    r.verdict = Verdict::pass;
    r.worst_ratio = 2.5;
    r.worst_t = 10;
    r.fitted_M = 2.5;
    CHECK(format_report_row(r) == "11M\tpass\t2.5\t10\t2.5");
    r.note = "tail";
    CHECK(format_report_row(r) == "11M\tpass\t2.5\t10\t2.5\ttail");
  }

  TEST_CASE("triple validation flags bad normalization") {
    std::vector<std::string> issues = validate_triple(triple(gf_power(0.5, 0), gf_power(0.25, 0)), default_t_grid());
    CHECK_FALSE(issues.empty());
  }
}
