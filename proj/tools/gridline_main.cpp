// gridline: line ratings and N-1 SC-DCOPF over an hourly horizon.

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "gridline/csv.hpp"
#include "gridline/error.hpp"
#include "gridline/network_factors.hpp"
#include "gridline/pipeline.hpp"

namespace {

using namespace gridline;

constexpr double kDegree = std::numbers::pi / 180.0;

struct RatingFlags {
  std::string config;
  double tc = 0, phi_slr = 0, v_slr = 0, ta_slr = 0, ratio = 0;
  CLI::Option* tc_opt = nullptr;
  CLI::Option* phi_opt = nullptr;
  CLI::Option* v_opt = nullptr;
  CLI::Option* ta_opt = nullptr;
  CLI::Option* ratio_opt = nullptr;

  void add(CLI::App& app, bool scalar_tc_phi) {
    app.add_option("--config", config, "Rating parameter file (key = value lines)")->check(CLI::ExistingFile);
    if (scalar_tc_phi) {
      tc_opt = app.add_option("--tc", tc, "Maximum conductor temperature, C");
      phi_opt = app.add_option("--phi-slr", phi_slr, "Static-rating attack angle, degrees");
    }
    v_opt = app.add_option("--v-slr", v_slr, "Static-rating wind speed, m/s");
    ta_opt = app.add_option("--ta-slr", ta_slr, "Static-rating ambient temperature, C");
    ratio_opt = app.add_option("--contingency-ratio", ratio, "Contingency / normal limit ratio");
  }

  RatingParams resolve() const {
    RatingParams p = config.empty() ? RatingParams{} : load_rating_params(config);
    if (tc_opt && tc_opt->count()) p.t_conductor_c = tc;
    if (phi_opt && phi_opt->count()) p.phi_slr = phi_slr * kDegree;
    if (v_opt->count()) p.v_slr = v_slr;
    if (ta_opt->count()) p.t_ambient_slr_c = ta_slr;
    if (ratio_opt->count()) p.contingency_ratio = ratio;
    p.validate();
    return p;
  }
};

std::vector<Scenario> parse_scenarios(const std::vector<std::string>& names) {
  std::vector<Scenario> out;
  for (const auto& n : names) {
    const auto s = parse_scenario(n);
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

std::vector<HourStamp> select_hours(const std::optional<std::string>& text, const HourlySeries& series) {
  if (!text) return series.hours;
  const auto range = resolve_hour_range(*text, series);
  std::vector<HourStamp> hours;
  for (auto h = range.first; h <= range.last; h = h.next()) hours.push_back(h);
  return hours;
}

std::ofstream create(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(path.string(), 0, "cannot open for writing");
  return out;
}

void print_summary(const RunSummary& summary) {
  std::cout << "hours: " << summary.hours.size() << " (common feasible: " << summary.common_hours.size() << ")\n";
  for (const auto& s : summary.scenarios) {
    std::cout << to_string(s.scenario) << ": cost " << csv::format_fixed(s.total_cost, 2);
    if (s.congestion_cost) std::cout << ", congestion " << csv::format_fixed(*s.congestion_cost, 2);
    std::cout << ", emissions " << csv::format_fixed(s.emissions_mmt, 6) << " MMT, max iterations " << s.max_iterations
              << ", failed " << s.failed_hours.size() << ", unconverged " << s.unconverged_hours.size() << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weather-dependent line ratings and N-1 security-constrained DC OPF"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "Rate lines and solve SC-DCOPF for every hour and regime");
  RunConfig run_config;
  std::string case_dir, weather_file, out_dir = "out";
  std::vector<std::string> regimes{"slr", "aar", "dlr", "uncongested"};
  std::string hours;
  std::optional<BusId> slack;
  RatingFlags run_flags;
  run_cmd->add_option("--case", case_dir, "Case directory (bus.csv, branch.csv, gen.csv, demand.csv)")
      ->required()
      ->check(CLI::ExistingDirectory);
  run_cmd->add_option("--weather", weather_file, "Weather CSV")->check(CLI::ExistingFile);
  run_cmd->add_option("--regimes", regimes, "Comma-separated: slr,aar,dlr,uncongested")->delimiter(',');
  auto* hours_opt = run_cmd->add_option("--hours", hours, "START..END as indices or timestamps");
  run_cmd->add_option("--penalty", run_config.scopf.penalty_price, "Slack penalty, $/MWh")->check(CLI::PositiveNumber);
  run_cmd->add_option("--max-iter", run_config.scopf.max_iterations, "Constraint-generation iteration cap")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--workers", run_config.workers, "Worker threads")->check(CLI::PositiveNumber);
  run_cmd->add_option("--slack", slack, "Slack bus id (default: lowest-id bus with a generator)");
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_flags.add(*run_cmd, true);

  // ratings
  auto* ratings_cmd = app.add_subcommand("ratings", "Compute hourly branch ratings only");
  std::string r_case, r_weather, r_out = "ratings.csv", r_hours;
  std::vector<std::string> r_regimes{"slr", "aar", "dlr"};
  unsigned r_workers = 1;
  RatingFlags rating_flags;
  ratings_cmd->add_option("--case", r_case, "Case directory")->required()->check(CLI::ExistingDirectory);
  ratings_cmd->add_option("--weather", r_weather, "Weather CSV")->check(CLI::ExistingFile);
  ratings_cmd->add_option("--regimes", r_regimes, "Comma-separated: slr,aar,dlr")->delimiter(',');
  auto* r_hours_opt = ratings_cmd->add_option("--hours", r_hours, "START..END as indices or timestamps");
  ratings_cmd->add_option("--workers", r_workers, "Worker threads")->check(CLI::PositiveNumber);
  ratings_cmd->add_option("--out", r_out, "Output CSV");
  rating_flags.add(*ratings_cmd, true);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Mean DLR multiplier over a grid of static-rating assumptions");
  std::string s_case, s_weather, s_out = "sweep.csv", s_hours;
  std::vector<double> s_tc{78, 100, 110}, s_phi{0, 45, 90};
  RatingFlags sweep_flags;
  sweep_cmd->add_option("--case", s_case, "Case directory")->required()->check(CLI::ExistingDirectory);
  sweep_cmd->add_option("--weather", s_weather, "Weather CSV")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--tc", s_tc, "Conductor temperatures, C")->delimiter(',');
  sweep_cmd->add_option("--phi-slr", s_phi, "Static-rating attack angles, degrees")->delimiter(',');
  auto* s_hours_opt = sweep_cmd->add_option("--hours", s_hours, "START..END as indices or timestamps");
  sweep_cmd->add_option("--out", s_out, "Output CSV");
  sweep_flags.add(*sweep_cmd, false);

  // factors
  auto* factors_cmd = app.add_subcommand("factors", "Write PTDF and LODF matrices");
  std::string f_case, f_out = "factors";
  std::optional<BusId> f_slack;
  factors_cmd->add_option("--case", f_case, "Case directory")->required()->check(CLI::ExistingDirectory);
  factors_cmd->add_option("--slack", f_slack, "Slack bus id");
  factors_cmd->add_option("--out", f_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      run_config.case_directory = case_dir;
      run_config.weather_file = weather_file;
      run_config.output_directory = out_dir;
      if (hours_opt->count()) run_config.hours = hours;
      run_config.regimes = parse_scenarios(regimes);
      run_config.rating = run_flags.resolve();
      run_config.slack_bus = slack;
      const auto summary = gridline::run(run_config);
      print_summary(summary);
      for (const auto& s : summary.scenarios) {
        for (auto h : s.failed_hours) std::cerr << "failed: " << to_string(s.scenario) << ' ' << format_hour(h) << '\n';
        for (auto h : s.unconverged_hours)
          std::cerr << "unconverged: " << to_string(s.scenario) << ' ' << format_hour(h) << '\n';
      }
      return summary.all_ok() ? 0 : 1;
    }

    if (ratings_cmd->parsed()) {
      const auto params = rating_flags.resolve();
      const auto network = load_network(r_case);
      const auto series = load_hourly_series(r_case, network);
      const auto hours = select_hours(r_hours_opt->count() ? std::optional(r_hours) : std::nullopt, series);
      std::optional<WeatherGrid> weather;
      if (!r_weather.empty()) weather = load_weather(r_weather);
      std::vector<RatingSeries> out;
      for (const auto& name : r_regimes) {
        const auto regime = parse_regime(name);
        if (regime != Regime::slr && !weather) throw DomainError("regime " + name + " needs --weather");
        out.push_back(build_rating_series(network, weather ? &*weather : nullptr, hours, regime, params, r_workers));
      }
      auto file = create(r_out);
      write_ratings_csv(file, network, out);
      return 0;
    }

    if (sweep_cmd->parsed()) {
      const auto params = sweep_flags.resolve();
      const auto network = load_network(s_case);
      const auto series = load_hourly_series(s_case, network);
      const auto hours = select_hours(s_hours_opt->count() ? std::optional(s_hours) : std::nullopt, series);
      const auto weather = load_weather(s_weather);
      const auto points = sweep_parameters(network, weather, hours, s_tc, s_phi, params);
      auto file = create(s_out);
      file << "t_conductor_c,phi_slr_deg,mean_multiplier,samples\n";
      for (const auto& p : points) {
        file << csv::format_number(p.t_conductor_c) << ',' << csv::format_number(p.phi_slr_deg) << ','
             << csv::format_fixed(p.mean_multiplier, 6) << ',' << p.samples << '\n';
        std::cout << "T_C " << p.t_conductor_c << " C, phi_SLR " << p.phi_slr_deg << " deg: "
                  << csv::format_fixed(p.mean_multiplier, 4) << '\n';
      }
      return 0;
    }

    if (factors_cmd->parsed()) {
      const auto network = load_network(f_case);
      const auto factors = compute_factors(network, f_slack);
      auto ptdf = create(std::filesystem::path(f_out) / "ptdf.csv");
      write_ptdf_csv(ptdf, network, factors);
      auto lodf = create(std::filesystem::path(f_out) / "lodf.csv");
      write_lodf_csv(lodf, network, factors);
      std::cout << "slack bus " << factors.slack_bus << ", radial branches:";
      for (auto id : factors.radial_branch_ids(network)) std::cout << ' ' << id;
      std::cout << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "gridline: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
