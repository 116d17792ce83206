#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "families.hpp"
#include "oracles.hpp"
#include "pqlab/field_io.hpp"
#include "pqlab/solver.hpp"

using namespace pqlab;

namespace {

Grid unit(int N, std::function<double(double, double)> b) { return Grid::make(N, 1.0, std::move(b)); }

double max_diff(const DiscreteField& a, const DiscreteField& b) {
  double m = 0.0;
  for (size_t k = 0; k < a.u.size(); ++k) m = std::max(m, std::fabs(a.u[k] - b.u[k]));
  return m;
}

DiscreteField perturbed(const Grid& g, double amp, std::uint64_t seed) {
  DiscreteField u = bilinear_guess(g);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-amp, amp);
  for (int j = 1; j < g.N - 1; ++j)
    for (int i = 1; i < g.N - 1; ++i) u.at(i, j) += d(rng);
  return u;
}

double affine_x(double x, double) { return x; }

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("grid construction") {
    CHECK_THROWS_AS(Grid::make(4, 1.0, affine_x), GeometryError);
    CHECK_THROWS_AS(Grid::make(9, 0.0, affine_x), GeometryError);
    CHECK_THROWS_AS(Grid::make(9, 1.0, [](double, double) { return NAN; }), GeometryError);
    Grid g = unit(9, affine_x);
    CHECK(g.h() == 0.125);
    CHECK(g.index(2, 3) == 29);
    CHECK(g.on_boundary(0, 4));
    CHECK_FALSE(g.on_boundary(1, 4));
  }

  TEST_CASE("discrete energy examples") {
    Grid z = unit(17, [](double, double) { return 0.0; });
    CHECK(discrete_energy(z, p_laplacian(2), bilinear_guess(z)) == 0.0);
    for (int N : {9, 17, 33}) {
      Grid g = unit(N, affine_x);
      DiscreteField u = sample_field(g, affine_x);
      CHECK(discrete_energy(g, p_laplacian(2), u) == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(discrete_energy(g, double_phase(2, 4, Coefficient::constant(1)), u) == doctest::Approx(2.0).epsilon(1e-13));
    }
  }

  TEST_CASE("gradient vanishes where expected") {
    Grid c = unit(17, [](double, double) { return 3.0; });
    for (const auto& nf : fixtures::catalog()) {
      std::vector<double> gr = discrete_energy_gradient(c, nf.f, bilinear_guess(c));
      for (double v : gr) CHECK(v == 0.0);
    }
    Grid g = unit(33, [](double x, double y) { return x * x - y * y + 0.3 * x * y; });
    oracle::LinearSolve d = oracle::quadratic_direct(g, [](double, double) { return 1.0; });
    double m = 0.0;
    for (double v : discrete_energy_gradient(g, p_laplacian(2), d.u)) m = std::max(m, std::fabs(v));
    CHECK(m <= 1e-10);
  }

  TEST_CASE("property: energy gradient matches finite differences") {
    std::mt19937_64 rng(41);
    for (const auto& nf : fixtures::catalog()) {
      CAPTURE(nf.name);
      double amp = nf.f.kind == FamilyKind::VeryDegenerate ? 3.0 : 0.6;
      Grid g = unit(17, [amp](double x, double y) { return amp * (x * x - y + 0.5 * x * y); });
      DiscreteField u = perturbed(g, 0.05 * amp, 7);
      std::vector<double> gr = discrete_energy_gradient(g, nf.f, u);
      std::uniform_int_distribution<int> node(1, g.N - 2);
      double gmax = 0.0;
      for (double v : gr) gmax = std::max(gmax, std::fabs(v));
      for (int k = 0; k < 50; ++k) {
        int i = node(rng), j = node(rng);
        double h = 1e-6;
        DiscreteField up = u, dn = u;
        up.at(i, j) += h;
        dn.at(i, j) -= h;
        double fd = (discrete_energy(g, nf.f, up) - discrete_energy(g, nf.f, dn)) / (2 * h);
        double an = gr[static_cast<size_t>(g.index(i, j))];
        CHECK(std::fabs(fd - an) <= 1e-6 * std::max(std::fabs(an), 1e-3 * gmax));
      }
    }
  }

  TEST_CASE("property: parallel and serial kernels agree") {
    for (const auto& nf : fixtures::catalog()) {
      Grid g = unit(33, [](double x, double y) { return 0.7 * (x - y * y); });
      DiscreteField u = perturbed(g, 0.05, 9);
      Assembler a(g, nf.f);
      double e = a.energy(u), es = a.energy_serial(u);
      CHECK(std::fabs(e - es) <= 1e-13 * std::fabs(es));
      std::vector<double> gp = a.gradient(u), gs = a.gradient_serial(u);
      for (size_t k = 0; k < gp.size(); ++k) CHECK(std::fabs(gp[k] - gs[k]) <= 1e-13 * std::max(1.0, std::fabs(gs[k])));
      CHECK(a.energy(u) == e);
    }
  }

  TEST_CASE("harmonic solve matches the direct solve") {
    Grid g = unit(33, [](double x, double y) { return x * x * x - 3 * x * y * y + std::exp(x) * 0.1; });
    oracle::LinearSolve d = oracle::quadratic_direct(g, [](double, double) { return 1.0; });
    SolveOptions o;
    o.tolerance = 1e-11;
    SolveResult r = minimize(g, p_laplacian(2), o);
    CHECK(r.converged);
    CHECK(r.grad_norm <= 1e-11);
    CHECK(max_diff(r.u, d.u) <= 1e-8);
    CHECK(r.energy == doctest::Approx(d.energy).epsilon(1e-10));
  }

  TEST_CASE("variable coefficient quadratic solve matches the direct solve") {
    auto a = [](double x, double y) { return 1.0 + 0.5 * x + y * y; };
    Grid g = unit(25, [](double x, double y) { return std::sin(3 * x) * y; });
    oracle::LinearSolve d = oracle::quadratic_direct(g, a);
    SolveOptions o;
    o.tolerance = 1e-11;
    SolveResult r = minimize(g, p_laplacian(2, {Expr::parse("1 + 0.5*x + y^2"), 2.0}), o);
    CHECK(r.converged);
    CHECK(max_diff(r.u, d.u) <= 1e-8);
  }

  TEST_CASE("affine data gives the affine interpolant") {
    Grid g = unit(33, [](double x, double y) { return x + y; });
    oracle::LinearSolve d = oracle::quadratic_direct(g, [](double, double) { return 1.0; });
    SolveResult r = minimize(g, p_laplacian(2));
    CHECK(max_diff(r.u, d.u) <= 1e-8);
    CHECK(max_diff(r.u, sample_field(g, [](double x, double y) { return x + y; })) <= 1e-12);
  }

  TEST_CASE("zero data returns immediately") {
    Grid g = unit(17, [](double, double) { return 0.0; });
    for (const auto& nf : fixtures::catalog()) {
      SolveResult r = minimize(g, nf.f);
      CHECK(r.iterations == 0);
      CHECK(r.converged);
      CHECK(r.energy == doctest::Approx(discrete_energy(g, nf.f, r.u)).epsilon(1e-14));
    }
  }

  TEST_CASE("exponential solve beats the affine interpolant") {
    Grid g = unit(33, [](double x, double y) { return 0.5 * (x + y); });
    Family f = exponential(Coefficient::constant(1.0));
    SolveResult r = minimize(g, f);
    CHECK(r.converged);
    CHECK(r.energy <= discrete_energy(g, f, sample_field(g, g.boundary)));
  }

  TEST_CASE("saturating data is rescaled with a warning") {
    Grid g = unit(33, [](double x, double y) { return 30 * (x + y); });
    SolveResult r = minimize(g, exponential(Coefficient::constant(1.0)));
    CHECK(r.converged);
    CHECK(r.amplitude_scale < 1.0);
    CHECK_FALSE(r.warnings.empty());
  }

  TEST_CASE("property: energy descent along every trace") {
    for (const auto& nf : fixtures::catalog()) {
      CAPTURE(nf.name);
      double amp = nf.f.kind == FamilyKind::VeryDegenerate ? 3.0 : 0.8;
      Grid g = unit(17, [amp](double x, double y) { return amp * (x * x - y * y + std::sin(3 * x)); });
      SolveOptions o;
      o.tolerance = 1e-7;
      SolveResult r = minimize(g, nf.f, o);
      CHECK(r.converged);
      for (size_t k = 1; k < r.trace.size(); ++k) CHECK(r.trace[k] <= r.trace[k - 1]);
      for (int j = 0; j < g.N; ++j)
        for (int i = 0; i < g.N; ++i)
          if (g.on_boundary(i, j)) {
            Point p = g.node(i, j);
            CHECK(r.u.at(i, j) == r.amplitude_scale * g.boundary(p.x, p.y));
          }
    }
  }

  TEST_CASE("property: mesh refinement order") {
    auto exact = [](double x, double y) { return std::exp(x) * std::cos(y); };
    std::vector<double> err;
    for (int N : {17, 33, 65}) {
      Grid g = unit(N, exact);
      oracle::LinearSolve d = oracle::quadratic_direct(g, [](double, double) { return 1.0; });
      SolveOptions o;
      o.tolerance = 1e-11;
      SolveResult r = minimize(g, p_laplacian(2), o);
      CHECK(max_diff(r.u, d.u) <= 1e-8);
      err.push_back(max_diff(r.u, sample_field(g, exact)));
    }
    for (size_t k = 1; k < err.size(); ++k) CHECK(std::log2(err[k - 1] / err[k]) >= 1.8);
  }

  TEST_CASE("property: comparison principle") {
    for (double p : {2.0, 3.0, 4.0}) {
      Grid g = unit(25, [](double x, double y) { return 0.5 + 0.5 * std::sin(6 * x) * std::cos(4 * y); });
      SolveOptions o;
      o.tolerance = 1e-9;
      SolveResult r = minimize(g, p_laplacian(p), o);
      CHECK(r.converged);
      for (double v : r.u.u) {
        CHECK(v >= -1e-6);
        CHECK(v <= 1 + 1e-6);
      }
    }
  }

  TEST_CASE("field stats") {
    Grid g = unit(33, affine_x);
    DiscreteField u = sample_field(g, affine_x);
    FieldStats s = field_stats(g, p_laplacian(2), u, 0.2, 0.4);
    CHECK(s.sup_grad == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.w22 == doctest::Approx(0.0).epsilon(1e-20));
    CHECK_THROWS_AS(field_stats(g, p_laplacian(2), u, 0.2, 0.6), GeometryError);
    CHECK_THROWS_AS(field_stats(g, p_laplacian(2), u, 0.4, 0.2), GeometryError);
  }

  TEST_CASE("outer energy agrees with an independent accumulation") {
    Grid g = unit(65, [](double x, double y) { return x * x - y * y; });
    SolveResult r = minimize(g, p_laplacian(2));
    Ball b = make_ball(g, 0.2, 0.4);
    FieldStats s = field_stats(g, p_laplacian(2), r.u, b);
    double h = g.h(), acc = 0.0;
    for (int j = 0; j + 1 < g.N; ++j) {
      for (int i = 0; i + 1 < g.N; ++i) {
        Point c = g.cell_center(i, j);
        if (std::hypot(c.x - 0.5, c.y - 0.5) > 0.4) continue;
        double gx = (r.u.at(i + 1, j) + r.u.at(i + 1, j + 1) - r.u.at(i, j) - r.u.at(i, j + 1)) / (2 * h);
        double gy = (r.u.at(i, j + 1) + r.u.at(i + 1, j + 1) - r.u.at(i, j) - r.u.at(i + 1, j)) / (2 * h);
        acc += (1 + gx * gx + gy * gy) * h * h;
      }
    }
    CHECK(s.energy_R == doctest::Approx(acc).epsilon(1e-12));
  }

  TEST_CASE("field file round trip is bit identical") {
    Grid g = unit(17, [](double x, double y) { return std::exp(x) / 3 + y * 1e-17; });
    SolveResult r = minimize(g, p_laplacian(3));
    std::stringstream ss;
    write_field(ss, r.u, "p_laplacian");
    FieldFile back = read_field(ss);
    CHECK(back.family == "p_laplacian");
    CHECK(back.field.N == r.u.N);
    CHECK(back.field.side == r.u.side);
    CHECK(back.field.u == r.u.u);
    std::stringstream bad("N 3\nside 1\nfamily x\n1 2 3\n");
    CHECK_THROWS(read_field(bad));
  }

  TEST_CASE("pairwise sum") {
    std::vector<double> v(1000, 0.1);
    CHECK(pairwise_sum(v.data(), v.size()) == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(pairwise_sum(v.data(), 0) == 0.0);
  }
}
