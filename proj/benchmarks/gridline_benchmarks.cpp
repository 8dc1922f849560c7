#include <benchmark/benchmark.h>

#include <filesystem>

#include "gridline/network_factors.hpp"
#include "gridline/rating.hpp"
#include "gridline/scopf.hpp"

namespace {

using namespace gridline;

const std::filesystem::path kFixtures = GRIDLINE_FIXTURE_DIR;

struct Study {
  Network network = load_network(kFixtures / "thirty_bus");
  HourlySeries series = load_hourly_series(kFixtures / "thirty_bus", network);
  WeatherGrid weather = load_weather(kFixtures / "weather.csv");
  SensitivityFactors factors = compute_factors(network);
};

const Study& study() {
  static const Study s;
  return s;
}

void BM_Factors(benchmark::State& state) {
  const auto& s = study();
  for (auto _ : state) benchmark::DoNotOptimize(compute_factors(s.network));
}
BENCHMARK(BM_Factors);

void BM_DlrRatings(benchmark::State& state) {
  const auto& s = study();
  const RatingParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_rating_series(s.network, &s.weather, s.series.hours, Regime::dlr, params));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.series.hours.size() * s.network.branch_count()));
}
BENCHMARK(BM_DlrRatings);

void BM_ScopfHour(benchmark::State& state) {
  const auto& s = study();
  std::vector<double> normal, cont;
  for (const auto& b : s.network.branches()) {
    normal.push_back(b.rating_mva);
    cont.push_back(1.146 * b.rating_mva);
  }
  const auto hour = hour_data(s.series, static_cast<std::size_t>(state.range(0)));
  const lp::DenseSimplex solver;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_scdcopf(s.network, s.factors, hour, normal, cont, {}, solver));
  }
}
BENCHMARK(BM_ScopfHour)->Arg(4)->Arg(17)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
