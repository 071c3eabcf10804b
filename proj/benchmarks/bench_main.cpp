#include <cmath>

#include <benchmark/benchmark.h>

#include "stochgm/fc_opt.hpp"
#include "stochgm/gm_model.hpp"
#include "stochgm/parallel.hpp"
#include "stochgm/resp_spectrum.hpp"
#include "stochgm/rng.hpp"

using namespace stochgm;

namespace {

GMParams bench_params() {
  GMParams p;
  p.log_ai = std::log(0.3);
  p.d595 = 12.0;
  p.t_mid = 8.0;
  p.omega_mid = 2.0 * kPi * 4.0;
  p.omega_rate = -0.2;
  p.zeta_f = 0.3;
  p.fc_hz = 0.2;
  p.t_total = 30.0;
  return p;
}

std::vector<double> noise(std::size_t n) {
  NormalStream s(7, 0);
  std::vector<double> x(n);
  for (auto& v : x) v = s();
  return x;
}

void BM_Highpass(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out;
  for (auto _ : state) {
    highpass_into(x, 0.2, 0.01, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Highpass)->Arg(3000)->Arg(12000);

void BM_ComputeSa(benchmark::State& state) {
  const auto x = noise(3000);
  const auto periods = standard_period_grid();
  for (auto _ : state) {
    auto sp = compute_sa(x, 0.01, periods);
    benchmark::DoNotOptimize(sp.sa.data());
  }
  state.SetItemsProcessed(state.iterations() * 3000 * static_cast<std::int64_t>(periods.size()));
}
BENCHMARK(BM_ComputeSa);

void BM_Simulate(benchmark::State& state) {
  set_jobs(1);
  const auto engine = state.range(0) == 0 ? Engine::temporal : Engine::spectral;
  const auto p = bench_params();
  const auto n = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    auto batch = simulate_motions(p, 0.01, n, kDefaultSeed, engine);
    benchmark::DoNotOptimize(batch.realizations.data());
  }
  state.SetLabel(std::string(to_string(engine)));
  state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_Simulate)->Args({0, 10})->Args({1, 10})->Args({0, 100})->Args({1, 100})->Unit(benchmark::kMillisecond);

void BM_FitFc(benchmark::State& state) {
  set_jobs(1);
  auto p = bench_params();
  p.fc_hz = 0.3;
  const auto rec = simulate_motions(p, 0.01, 1, kDefaultSeed + 1, Engine::temporal);
  FcSearchConfig cfg;
  cfg.n_mc = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto fit = optimize_fc(rec.row(0), rec.dt, p, cfg, Engine::temporal);
    benchmark::DoNotOptimize(fit.fc_star);
  }
}
BENCHMARK(BM_FitFc)->Arg(20)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
