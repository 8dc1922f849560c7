#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridline/dispatch.hpp"
#include "gridline/grid_model.hpp"
#include "gridline/network_factors.hpp"
#include "gridline/rating.hpp"
#include "gridline/scopf.hpp"
#include "gridline/weather.hpp"

namespace gridline {

/// A rating regime solved with SC-DCOPF, or the copperplate baseline.
enum class Scenario { slr, aar, dlr, uncongested };

std::string_view to_string(Scenario scenario);
Scenario parse_scenario(std::string_view text);
std::optional<Regime> rating_regime(Scenario scenario);

/// Tons CO2 per MWh by fuel. Defaults are placeholders: coal 1.0, gas 0.42.
std::map<Fuel, double> default_emission_factors();

struct HourRange {
  HourStamp first;
  HourStamp last;  ///< inclusive
};

/// Parses `START..END` where each end is a 0-based index into `series` or a
/// timestamp. Throws DomainError when the range is empty or outside the series.
HourRange resolve_hour_range(std::string_view text, const HourlySeries& series);

struct RunConfig {
  std::filesystem::path case_directory;
  std::filesystem::path weather_file;  ///< may be empty when no AAR/DLR regime is requested
  std::filesystem::path output_directory;
  std::optional<std::string> hours;    ///< START..END; whole series when absent
  std::vector<Scenario> regimes{Scenario::slr, Scenario::aar, Scenario::dlr, Scenario::uncongested};
  RatingParams rating;
  ScopfOptions scopf;
  unsigned workers = 1;
  std::map<Fuel, double> emission_factors = default_emission_factors();
  std::optional<BusId> slack_bus;
};

/// Row of a solved hour that carries a nonzero shadow price.
struct BindingRow {
  std::size_t monitored_branch = 0;
  std::optional<std::size_t> outaged_branch;
  double dual = 0.0;   ///< $/MWh, magnitude
  double limit = 0.0;  ///< MW
};

struct HourOutcome {
  HourStamp hour;
  bool feasible = false;
  bool converged = false;
  std::string error;
  int iterations = 0;
  Eigen::VectorXd p_gen;
  Eigen::VectorXd flows;
  Eigen::VectorXd availability;
  double objective = 0.0;
  double generation_cost = 0.0;
  double penalty_cost = 0.0;
  double slack_mw = 0.0;
  std::vector<IterationRecord> trace;
  std::vector<BindingRow> binding;
};

struct ScenarioResults {
  Scenario scenario = Scenario::slr;
  std::optional<RatingSeries> ratings;
  std::vector<HourOutcome> hours;
};

struct StudyInputs {
  Network network;
  HourlySeries series;
  std::optional<WeatherGrid> weather;
};

/// Loads case tables, hourly series, and weather when any requested regime
/// needs it.
StudyInputs load_study(const RunConfig& config);

/// Solves every requested scenario for every hour in `hours`, spreading
/// hours over config.workers threads. Per-hour failures are recorded in the
/// outcome, never thrown. Results do not depend on the worker count.
std::vector<ScenarioResults> run_study(const StudyInputs& inputs, const SensitivityFactors& factors,
                                       std::span<const HourStamp> hours, const RunConfig& config);

struct CongestionEntry {
  BranchId branch = 0;
  double metric = 0.0;  ///< sum over hours and rows of |dual| x limit, $
  std::size_t binding_hours = 0;
  std::size_t binding_rows = 0;
};

/// Per monitored branch congestion proxy over the hours selected by
/// `include`, sorted by metric (descending) then branch id. Branches with no
/// binding rows are omitted.
std::vector<CongestionEntry> congestion_by_branch(const Network& network, std::span<const HourOutcome> hours,
                                                  const std::vector<bool>& include);

/// Million metric tons CO2 from MWh generated per fuel.
double emissions_mmt(const std::map<Fuel, double>& generation_mwh, const std::map<Fuel, double>& factors);

struct ScenarioSummary {
  Scenario scenario = Scenario::slr;
  double total_cost = 0.0;  ///< $, objective incl. penalties, over common hours
  double generation_cost = 0.0;
  double penalty_cost = 0.0;
  std::optional<double> congestion_cost;  ///< total - uncongested total
  std::map<Fuel, double> generation_mwh;
  std::map<Fuel, double> curtailment_mwh;  ///< solar and wind only
  double emissions_mmt = 0.0;
  std::vector<HourStamp> failed_hours;
  std::vector<HourStamp> unconverged_hours;
  int max_iterations = 0;
  double mean_iterations = 0.0;
  std::vector<CongestionEntry> congestion;
};

struct RunSummary {
  std::vector<HourStamp> hours;
  /// Hours feasible in every scenario; all aggregates use only these.
  std::vector<HourStamp> common_hours;
  std::vector<ScenarioSummary> scenarios;

  bool all_ok() const;
};

RunSummary summarize(const StudyInputs& inputs, const std::vector<ScenarioResults>& results,
                     std::span<const HourStamp> hours, const RunConfig& config);

/// Writes summary.json, hourly.csv, ratings.csv and per-scenario
/// dispatch.csv, flows.csv, iteration_trace.csv, congestion_by_branch.csv.
void write_outputs(const std::filesystem::path& directory, const StudyInputs& inputs,
                   const std::vector<ScenarioResults>& results, const RunSummary& summary, const RunConfig& config);

/// load_study + run_study + summarize + write_outputs.
RunSummary run(const RunConfig& config);

}  // namespace gridline
