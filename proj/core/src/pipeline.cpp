#include "gridline/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "gridline/csv.hpp"
#include "gridline/error.hpp"
#include "gridline/parallel.hpp"

namespace gridline {

namespace {

constexpr double kDualEpsilon = 1e-9;

std::ofstream open_output(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(path.string(), 0, "cannot open for writing");
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool needs_weather(const RunConfig& config) {
  return std::any_of(config.regimes.begin(), config.regimes.end(),
                     [](Scenario s) { return s == Scenario::aar || s == Scenario::dlr; });
}

HourOutcome solve_hour(const StudyInputs& in, const SensitivityFactors& factors, std::size_t series_index,
                       Scenario scenario, const RatingSeries* ratings, std::size_t rating_row, const RunConfig& config,
                       const lp::Solver& solver) {
  const auto data = hour_data(in.series, series_index);
  HourOutcome out;
  out.hour = data.hour;
  out.availability = data.availability;

  DispatchResult dispatch;
  const DispatchProblem* problem = nullptr;
  ScopfResult scopf;
  if (scenario == Scenario::uncongested) {
    dispatch = solve_copperplate(in.network, factors, data, solver);
    out.converged = dispatch.ok();
    if (dispatch.ok()) out.trace.push_back({0, 0, dispatch.objective});
  } else {
    const auto r = static_cast<Eigen::Index>(rating_row);
    const Eigen::VectorXd normal = ratings->normal_limit.row(r).transpose();
    const Eigen::VectorXd contingency = ratings->contingency_limit.row(r).transpose();
    scopf = solve_scdcopf(in.network, factors, data, std::span(normal.data(), static_cast<std::size_t>(normal.size())),
                          std::span(contingency.data(), static_cast<std::size_t>(contingency.size())), config.scopf,
                          solver);
    dispatch = scopf.dispatch;
    problem = &scopf.problem;
    out.converged = scopf.converged;
    out.iterations = scopf.iterations;
    out.trace = scopf.trace;
  }

  out.feasible = dispatch.ok();
  if (!out.feasible) {
    out.error = dispatch.message.empty() ? std::string(to_string(dispatch.status)) : dispatch.message;
    return out;
  }
  if (!out.converged) out.error = "constraint generation hit the iteration limit";
  out.p_gen = dispatch.p_gen;
  out.flows = dispatch.flows;
  out.objective = dispatch.objective;
  out.generation_cost = dispatch.generation_cost;
  out.penalty_cost = dispatch.penalty_cost;
  for (double s : dispatch.slack_values) out.slack_mw += s;
  if (problem) {
    for (std::size_t i = 0; i < problem->flow_rows.size(); ++i) {
      if (dispatch.row_duals[i] > kDualEpsilon) {
        const auto& row = problem->flow_rows[i];
        out.binding.push_back({row.monitored_branch, row.outaged_branch, dispatch.row_duals[i], row.limit});
      }
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::slr: return "slr";
    case Scenario::aar: return "aar";
    case Scenario::dlr: return "dlr";
    case Scenario::uncongested: return "uncongested";
  }
  return "slr";
}

Scenario parse_scenario(std::string_view text) {
  const auto s = lower(text);
  if (s == "slr") return Scenario::slr;
  if (s == "aar") return Scenario::aar;
  if (s == "dlr") return Scenario::dlr;
  if (s == "uncongested" || s == "copperplate") return Scenario::uncongested;
  throw DomainError("unknown regime '" + std::string(text) + "'");
}

std::optional<Regime> rating_regime(Scenario scenario) {
  switch (scenario) {
    case Scenario::slr: return Regime::slr;
    case Scenario::aar: return Regime::aar;
    case Scenario::dlr: return Regime::dlr;
    case Scenario::uncongested: return std::nullopt;
  }
  return std::nullopt;
}

std::map<Fuel, double> default_emission_factors() { return {{Fuel::coal, 1.0}, {Fuel::natural_gas, 0.42}}; }

HourRange resolve_hour_range(std::string_view text, const HourlySeries& series) {
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) throw DomainError("hour range must look like START..END");
  auto resolve = [&](std::string_view part) {
    std::size_t index = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), index);
    if (!part.empty() && ec == std::errc{} && ptr == part.data() + part.size()) {
      if (index >= series.hours.size()) throw DomainError("hour index " + std::string(part) + " outside the series");
      return series.hours[index];
    }
    const auto stamp = parse_hour(part);
    if (!series.find_hour(stamp)) throw DomainError("hour " + std::string(part) + " outside the series");
    return stamp;
  };
  HourRange range{resolve(text.substr(0, dots)), resolve(text.substr(dots + 2))};
  if (range.last < range.first) throw DomainError("hour range is empty");
  return range;
}

StudyInputs load_study(const RunConfig& config) {
  auto network = load_network(config.case_directory);
  auto series = load_hourly_series(config.case_directory, network);
  std::optional<WeatherGrid> weather;
  if (needs_weather(config) || !config.weather_file.empty()) {
    if (config.weather_file.empty()) throw DomainError("AAR and DLR regimes need a weather file");
    weather = load_weather(config.weather_file);
  }
  return StudyInputs{std::move(network), std::move(series), std::move(weather)};
}

std::vector<ScenarioResults> run_study(const StudyInputs& in, const SensitivityFactors& factors,
                                       std::span<const HourStamp> hours, const RunConfig& config) {
  config.rating.validate();
  std::vector<std::size_t> series_index;
  for (auto h : hours) {
    const auto idx = in.series.find_hour(h);
    if (!idx) throw DomainError("hour " + format_hour(h) + " not in the demand series");
    series_index.push_back(*idx);
  }
  const lp::DenseSimplex solver;
  const WeatherGrid* weather = in.weather ? &*in.weather : nullptr;

  std::vector<ScenarioResults> results;
  for (const auto scenario : config.regimes) {
    ScenarioResults sr;
    sr.scenario = scenario;
    if (const auto regime = rating_regime(scenario)) {
      sr.ratings = build_rating_series(in.network, weather, hours, *regime, config.rating, config.workers);
    }
    sr.hours.resize(hours.size());
    const RatingSeries* ratings = sr.ratings ? &*sr.ratings : nullptr;
    parallel_for(hours.size(), config.workers, [&](std::size_t h) {
      try {
        sr.hours[h] = solve_hour(in, factors, series_index[h], scenario, ratings, h, config, solver);
      } catch (const std::exception& e) {
        HourOutcome failed;
        failed.hour = hours[h];
        failed.error = std::string(to_string(scenario)) + " at " + format_hour(hours[h]) + ": " + e.what();
        sr.hours[h] = std::move(failed);
      }
    });
    results.push_back(std::move(sr));
  }
  return results;
}

std::vector<CongestionEntry> congestion_by_branch(const Network& network, std::span<const HourOutcome> hours,
                                                  const std::vector<bool>& include) {
  std::vector<CongestionEntry> table(network.branch_count());
  for (std::size_t b = 0; b < table.size(); ++b) table[b].branch = network.branches()[b].id;
  for (std::size_t h = 0; h < hours.size(); ++h) {
    if (h < include.size() && !include[h]) continue;
    std::vector<bool> seen(network.branch_count(), false);
    for (const auto& row : hours[h].binding) {
      auto& entry = table[row.monitored_branch];
      entry.metric += std::abs(row.dual) * row.limit;
      ++entry.binding_rows;
      if (!seen[row.monitored_branch]) {
        seen[row.monitored_branch] = true;
        ++entry.binding_hours;
      }
    }
  }
  std::erase_if(table, [](const CongestionEntry& e) { return e.binding_rows == 0; });
  std::sort(table.begin(), table.end(), [](const CongestionEntry& a, const CongestionEntry& b) {
    if (a.metric != b.metric) return a.metric > b.metric;
    return a.branch < b.branch;
  });
  return table;
}

double emissions_mmt(const std::map<Fuel, double>& generation_mwh, const std::map<Fuel, double>& factors) {
  double tons = 0.0;
  for (const auto& [fuel, mwh] : generation_mwh) {
    if (auto it = factors.find(fuel); it != factors.end()) {
      if (it->second < 0.0) throw DomainError("emission factors must be nonnegative");
      tons += it->second * mwh;
    }
  }
  return tons / 1e6;
}

bool RunSummary::all_ok() const {
  return std::all_of(scenarios.begin(), scenarios.end(),
                     [](const ScenarioSummary& s) { return s.failed_hours.empty() && s.unconverged_hours.empty(); });
}

RunSummary summarize(const StudyInputs& in, const std::vector<ScenarioResults>& results,
                     std::span<const HourStamp> hours, const RunConfig& config) {
  RunSummary summary;
  summary.hours.assign(hours.begin(), hours.end());
  std::vector<bool> common(hours.size(), true);
  for (const auto& sr : results) {
    for (std::size_t h = 0; h < hours.size(); ++h) common[h] = common[h] && sr.hours[h].feasible;
  }
  for (std::size_t h = 0; h < hours.size(); ++h) {
    if (common[h]) summary.common_hours.push_back(hours[h]);
  }

  const auto& gens = in.network.generators();
  std::optional<double> uncongested_total;
  for (const auto& sr : results) {
    ScenarioSummary s;
    s.scenario = sr.scenario;
    std::size_t counted = 0;
    long total_iterations = 0;
    for (std::size_t h = 0; h < hours.size(); ++h) {
      const auto& o = sr.hours[h];
      if (!o.feasible) s.failed_hours.push_back(o.hour);
      if (o.feasible && !o.converged) s.unconverged_hours.push_back(o.hour);
      if (!common[h]) continue;
      ++counted;
      total_iterations += o.iterations;
      s.max_iterations = std::max(s.max_iterations, o.iterations);
      s.total_cost += o.objective;
      s.generation_cost += o.generation_cost;
      s.penalty_cost += o.penalty_cost;
      for (std::size_t g = 0; g < gens.size(); ++g) {
        const double p = o.p_gen(static_cast<Eigen::Index>(g));
        s.generation_mwh[gens[g].fuel] += p;
        if (gens[g].is_variable_renewable()) {
          s.curtailment_mwh[gens[g].fuel] += std::max(0.0, o.availability(static_cast<Eigen::Index>(g)) - p);
        }
      }
    }
    s.mean_iterations = counted > 0 ? static_cast<double>(total_iterations) / static_cast<double>(counted) : 0.0;
    s.emissions_mmt = emissions_mmt(s.generation_mwh, config.emission_factors);
    if (sr.scenario != Scenario::uncongested) {
      s.congestion = congestion_by_branch(in.network, sr.hours, common);
    } else {
      uncongested_total = s.total_cost;
    }
    summary.scenarios.push_back(std::move(s));
  }
  if (uncongested_total) {
    for (auto& s : summary.scenarios) s.congestion_cost = s.total_cost - *uncongested_total;
  }
  return summary;
}

namespace {

nlohmann::ordered_json fuel_map(const std::map<Fuel, double>& m, double scale) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [fuel, value] : m) j[std::string(to_string(fuel))] = value * scale;
  return j;
}

nlohmann::ordered_json hour_list(const std::vector<HourStamp>& hours) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (auto h : hours) j.push_back(format_hour(h));
  return j;
}

}  // namespace

void write_outputs(const std::filesystem::path& dir, const StudyInputs& in, const std::vector<ScenarioResults>& results,
                   const RunSummary& summary, const RunConfig& config) {
  using csv::format_fixed;
  const auto& net = in.network;
  std::filesystem::create_directories(dir);

  {
    nlohmann::ordered_json j;
    j["hours"] = {{"first", summary.hours.empty() ? "" : format_hour(summary.hours.front())},
                  {"last", summary.hours.empty() ? "" : format_hour(summary.hours.back())},
                  {"count", summary.hours.size()},
                  {"common_feasible", summary.common_hours.size()}};
    const auto& p = config.rating;
    j["rating_parameters"] = {{"t_conductor_c", p.t_conductor_c},
                              {"t_ambient_slr_c", p.t_ambient_slr_c},
                              {"v_slr_ms", p.v_slr},
                              {"phi_slr_deg", p.phi_slr * 180.0 / std::numbers::pi},
                              {"k_angle_slr", p.k_angle_slr()},
                              {"air_density", p.air_density},
                              {"air_viscosity", p.air_viscosity},
                              {"contingency_ratio", p.contingency_ratio},
                              {"eligibility_length_km", p.eligibility_length_km}};
    j["penalty_usd_per_mwh"] = config.scopf.penalty_price;
    j["max_iterations"] = config.scopf.max_iterations;
    j["emission_factors_t_per_mwh"] = fuel_map(config.emission_factors, 1.0);
    j["congestion_metric"] = "proxy: sum over hours and rows of |shadow price| x row limit, by monitored branch";
    j["dual_caveat"] = "shadow prices are basis-dependent when the LP is degenerate";
    auto& regimes = j["regimes"] = nlohmann::ordered_json::array();
    for (const auto& s : summary.scenarios) {
      nlohmann::ordered_json r;
      r["regime"] = std::string(to_string(s.scenario));
      r["total_cost_usd"] = s.total_cost;
      r["generation_cost_usd"] = s.generation_cost;
      r["penalty_cost_usd"] = s.penalty_cost;
      r["congestion_cost_usd"] = s.congestion_cost ? nlohmann::ordered_json(*s.congestion_cost) : nlohmann::ordered_json();
      r["generation_twh"] = fuel_map(s.generation_mwh, 1e-6);
      r["curtailment_twh"] = fuel_map(s.curtailment_mwh, 1e-6);
      r["emissions_mmt_co2"] = s.emissions_mmt;
      r["binding_branches"] = s.congestion.size();
      r["mean_iterations"] = s.mean_iterations;
      r["max_iterations"] = s.max_iterations;
      r["infeasible_hours"] = hour_list(s.failed_hours);
      r["unconverged_hours"] = hour_list(s.unconverged_hours);
      regimes.push_back(std::move(r));
    }
    j["all_hours_ok"] = summary.all_ok();
    auto out = open_output(dir / "summary.json");
    out << j.dump(2) << '\n';
  }

  {
    auto out = open_output(dir / "hourly.csv");
    out << "time,regime,status,objective_usd,generation_cost_usd,penalty_cost_usd,slack_mw,curtailment_mwh,emissions_t,"
           "iterations\n";
    for (const auto& sr : results) {
      for (const auto& o : sr.hours) {
        double curtail = 0.0, tons = 0.0;
        if (o.feasible) {
          for (std::size_t g = 0; g < net.generator_count(); ++g) {
            const auto& gen = net.generators()[g];
            const double p = o.p_gen(static_cast<Eigen::Index>(g));
            if (gen.is_variable_renewable()) curtail += std::max(0.0, o.availability(static_cast<Eigen::Index>(g)) - p);
            if (auto it = config.emission_factors.find(gen.fuel); it != config.emission_factors.end()) tons += it->second * p;
          }
        }
        const char* status = !o.feasible ? "failed" : (o.converged ? "ok" : "unconverged");
        out << format_hour(o.hour) << ',' << to_string(sr.scenario) << ',' << status << ',' << format_fixed(o.objective, 6)
            << ',' << format_fixed(o.generation_cost, 6) << ',' << format_fixed(o.penalty_cost, 6) << ','
            << format_fixed(o.slack_mw, 6) << ',' << format_fixed(curtail, 6) << ',' << format_fixed(tons, 6) << ','
            << o.iterations << '\n';
      }
    }
  }

  {
    std::vector<RatingSeries> series;
    for (const auto& sr : results) {
      if (sr.ratings) series.push_back(*sr.ratings);
    }
    auto out = open_output(dir / "ratings.csv");
    write_ratings_csv(out, net, series);
  }

  for (const auto& sr : results) {
    const auto sub = dir / std::string(to_string(sr.scenario));
    {
      auto out = open_output(sub / "dispatch.csv");
      out << "time,gen_id,mw\n";
      for (const auto& o : sr.hours) {
        if (!o.feasible) continue;
        const auto stamp = format_hour(o.hour);
        for (std::size_t g = 0; g < net.generator_count(); ++g) {
          out << stamp << ',' << net.generators()[g].id << ',' << format_fixed(o.p_gen(static_cast<Eigen::Index>(g)), 6) << '\n';
        }
      }
    }
    {
      auto out = open_output(sub / "flows.csv");
      out << "time,branch_id,mw\n";
      for (const auto& o : sr.hours) {
        if (!o.feasible) continue;
        const auto stamp = format_hour(o.hour);
        for (std::size_t b = 0; b < net.branch_count(); ++b) {
          out << stamp << ',' << net.branches()[b].id << ',' << format_fixed(o.flows(static_cast<Eigen::Index>(b)), 6) << '\n';
        }
      }
    }
    {
      auto out = open_output(sub / "iteration_trace.csv");
      out << "hour,iteration,violations_added,objective\n";
      for (const auto& o : sr.hours) {
        for (const auto& rec : o.trace) {
          out << format_hour(o.hour) << ',' << rec.iteration << ',' << rec.violations_added << ','
              << format_fixed(rec.objective, 6) << '\n';
        }
      }
    }
    if (sr.scenario != Scenario::uncongested) {
      auto out = open_output(sub / "congestion_by_branch.csv");
      out << "branch_id,congestion_metric_proxy_usd,binding_hours,binding_rows\n";
      for (const auto& s : summary.scenarios) {
        if (s.scenario != sr.scenario) continue;
        for (const auto& e : s.congestion) {
          out << e.branch << ',' << format_fixed(e.metric, 6) << ',' << e.binding_hours << ',' << e.binding_rows << '\n';
        }
      }
    }
  }
}

RunSummary run(const RunConfig& config) {
  if (config.workers < 1) throw DomainError("worker count must be at least 1");
  if (config.regimes.empty()) throw DomainError("no regimes requested");
  const auto inputs = load_study(config);
  const auto factors = compute_factors(inputs.network, config.slack_bus);

  std::vector<HourStamp> hours;
  if (config.hours) {
    const auto range = resolve_hour_range(*config.hours, inputs.series);
    for (auto h = range.first; h <= range.last; h = h.next()) hours.push_back(h);
  } else {
    hours = inputs.series.hours;
  }
  const auto results = run_study(inputs, factors, hours, config);
  auto summary = summarize(inputs, results, hours, config);
  write_outputs(config.output_directory, inputs, results, summary, config);
  return summary;
}

}  // namespace gridline
