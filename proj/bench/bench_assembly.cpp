#include <benchmark/benchmark.h>

#include <cmath>

#include "pqlab/solver.hpp"

using namespace pqlab;

namespace {

struct Setup {
  Grid g;
  Assembler a;
  DiscreteField u;

  explicit Setup(int N)
      : g(Grid::make(N, 1.0, [](double x, double y) { return std::sin(3 * x) * y; })),
        a(g, double_phase(2.0, 3.0, {Expr::parse("x^2 + y^2"), 2.0})),
        u(bilinear_guess(g)) {}
};

void BM_EnergyParallel(benchmark::State& st) {
  Setup s(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(s.a.energy(s.u));
}

void BM_EnergySerial(benchmark::State& st) {
  Setup s(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(s.a.energy_serial(s.u));
}

void BM_GradientParallel(benchmark::State& st) {
  Setup s(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(s.a.gradient(s.u));
}

void BM_GradientSerial(benchmark::State& st) {
  Setup s(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(s.a.gradient_serial(s.u));
}

}  // namespace

BENCHMARK(BM_EnergyParallel)->Arg(65)->Arg(257)->Arg(513);
BENCHMARK(BM_EnergySerial)->Arg(65)->Arg(257)->Arg(513);
BENCHMARK(BM_GradientParallel)->Arg(65)->Arg(257)->Arg(513);
BENCHMARK(BM_GradientSerial)->Arg(65)->Arg(257)->Arg(513);

BENCHMARK_MAIN();
