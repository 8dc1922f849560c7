#include "gridline/rating.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <string>

#include "gridline/csv.hpp"
#include "gridline/error.hpp"
#include "gridline/geospatial.hpp"
#include "gridline/parallel.hpp"

namespace gridline {

namespace {

constexpr double kZeroCelsius = 273.15;
constexpr double kDeg = std::numbers::pi / 180.0;

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::slr: return "SLR";
    case Regime::aar: return "AAR";
    case Regime::dlr: return "DLR";
  }
  return "SLR";
}

Regime parse_regime(std::string_view text) {
  std::string s(text);
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "slr") return Regime::slr;
  if (s == "aar") return Regime::aar;
  if (s == "dlr") return Regime::dlr;
  throw DomainError("unknown rating regime '" + std::string(text) + "'");
}

double k_angle(double phi) {
  return 1.194 - std::cos(phi) + 0.194 * std::cos(2.0 * phi) + 0.368 * std::sin(2.0 * phi);
}

double fold_attack_angle(double phi) {
  const double a = std::abs(std::fmod(phi, std::numbers::pi));
  return std::min(a, std::numbers::pi - a);
}

double RatingParams::k_angle_slr() const { return k_angle(fold_attack_angle(phi_slr)); }

void RatingParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw DomainError(std::string("rating parameters: ") + what);
  };
  require(std::isfinite(t_conductor_c) && std::isfinite(t_ambient_slr_c), "temperatures must be finite");
  require(t_conductor_c > t_ambient_slr_c, "t_conductor must exceed t_ambient_slr");
  require(t_ambient_slr_c + kZeroCelsius > 0.0, "t_ambient_slr below absolute zero");
  require(v_slr > 0.0, "v_slr must be positive");
  require(std::isfinite(phi_slr), "phi_slr must be finite");
  require(air_density > 0.0 && air_viscosity > 0.0, "air properties must be positive");
  require(contingency_ratio >= 1.0, "contingency_ratio must be at least 1");
  require(eligibility_length_km > 0.0, "eligibility_length_km must be positive");
  require(calm_threshold >= 0.0, "calm_threshold must be nonnegative");
}

RatingParams load_rating_params(const std::filesystem::path& file, RatingParams p) {
  std::ifstream in(file);
  if (!in) throw InputError(file.string(), 0, "cannot open file");
  const std::map<std::string, double*> fields = {
      {"t_conductor_c", &p.t_conductor_c},
      {"t_ambient_slr_c", &p.t_ambient_slr_c},
      {"v_slr_ms", &p.v_slr},
      {"air_density", &p.air_density},
      {"air_viscosity", &p.air_viscosity},
      {"contingency_ratio", &p.contingency_ratio},
      {"eligibility_length_km", &p.eligibility_length_km},
      {"diameter_slope", &p.diameter_slope},
      {"diameter_intercept", &p.diameter_intercept},
      {"calm_threshold_ms", &p.calm_threshold},
  };
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos) throw InputError(file.string(), line_no, "expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto text = trim(line.substr(eq + 1));
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
      throw InputError(file.string(), line_no, "bad number for '" + key + "'");
    }
    if (key == "phi_slr_deg") {
      p.phi_slr = value * kDeg;
    } else if (auto it = fields.find(key); it != fields.end()) {
      *it->second = value;
    } else {
      throw InputError(file.string(), line_no, "unknown key '" + key + "'");
    }
  }
  p.validate();
  return p;
}

void write_rating_params(std::ostream& out, const RatingParams& p) {
  using csv::format_number;
  out << "t_conductor_c = " << format_number(p.t_conductor_c) << '\n'
      << "t_ambient_slr_c = " << format_number(p.t_ambient_slr_c) << '\n'
      << "v_slr_ms = " << format_number(p.v_slr) << '\n'
      << "phi_slr_deg = " << format_number(p.phi_slr / kDeg) << '\n'
      << "air_density = " << format_number(p.air_density) << '\n'
      << "air_viscosity = " << format_number(p.air_viscosity) << '\n'
      << "contingency_ratio = " << format_number(p.contingency_ratio) << '\n'
      << "eligibility_length_km = " << format_number(p.eligibility_length_km) << '\n'
      << "diameter_slope = " << format_number(p.diameter_slope) << '\n'
      << "diameter_intercept = " << format_number(p.diameter_intercept) << '\n'
      << "calm_threshold_ms = " << format_number(p.calm_threshold) << '\n';
}

double eta_temperature(double t_ambient_k, const RatingParams& params) {
  const double tc = params.t_conductor_c + kZeroCelsius;
  const double ta_slr = params.t_ambient_slr_c + kZeroCelsius;
  if (!(t_ambient_k < tc)) {
    throw DomainError("ambient temperature " + csv::format_number(t_ambient_k) +
                      " K is not below the conductor limit; the rating would collapse to zero");
  }
  return std::sqrt((tc - t_ambient_k) / (tc - ta_slr));
}

double eta_wind(double speed, double phi, double diameter_m, const RatingParams& params) {
  if (!(speed >= 0.0)) throw DomainError("eta_wind: negative wind speed");
  if (!(diameter_m > 0.0)) throw DomainError("eta_wind: nonpositive conductor diameter");
  if (speed < params.calm_threshold) return 1.0;
  const double angle = std::sqrt(k_angle(fold_attack_angle(phi)) / params.k_angle_slr());
  const double speed_ratio = std::pow(speed / params.v_slr, 0.26);
  const double reynolds = params.air_density / params.air_viscosity * diameter_m * speed;
  return angle * speed_ratio * std::max(1.0, 0.566 * std::pow(reynolds, 0.04));
}

double ampacity_amps(double rating_mva, double base_kv) {
  return rating_mva * 1000.0 / (std::sqrt(3.0) * base_kv);
}

double estimate_diameter(const Branch& branch, const Network& network, const RatingParams& params) {
  if (branch.diameter_m) return *branch.diameter_m;
  const auto& from = network.buses()[network.bus_index(branch.from_bus)];
  const double amps = ampacity_amps(branch.rating_mva, from.base_kv);
  if (!(amps > 0.0)) throw DomainError("branch " + std::to_string(branch.id) + ": nonpositive ampacity");
  const double d = params.diameter_slope * amps + params.diameter_intercept;
  if (!(d > 0.0)) throw DomainError("branch " + std::to_string(branch.id) + ": diameter fit is nonpositive");
  return d;
}

bool is_eligible(const Branch& branch, const RatingParams& params) {
  return branch.kind == BranchKind::line && branch.length_km < params.eligibility_length_km;
}

std::vector<BranchSite> locate_branches(const Network& network, const WeatherGrid* weather, const RatingParams& params) {
  std::vector<BranchSite> sites;
  sites.reserve(network.branch_count());
  for (const auto& br : network.branches()) {
    BranchSite site;
    site.eligible = is_eligible(br, params);
    if (site.eligible) {
      const auto& a = network.buses()[network.bus_index(br.from_bus)];
      const auto& b = network.buses()[network.bus_index(br.to_bus)];
      const auto pa = geo::to_utm(a.latitude, a.longitude);
      const auto pb = geo::to_utm(b.latitude, b.longitude, pa.zone);
      if (pa.x != pb.x || pa.y != pb.y) site.conductor_angle = geo::conductor_angle(pa, pb);
      site.diameter_m = estimate_diameter(br, network, params);
      if (weather) {
        site.cell = weather->nearest_cell(0.5 * (a.latitude + b.latitude), 0.5 * (a.longitude + b.longitude));
      }
    }
    sites.push_back(site);
  }
  return sites;
}

double branch_multiplier(const std::optional<WeatherSample>& sample, const BranchSite& site, Regime regime,
                         const RatingParams& params) {
  if (regime == Regime::slr || !site.eligible || !sample) return 1.0;
  const double eta_t = eta_temperature(sample->ambient_temp_k, params);
  if (regime == Regime::aar) return eta_t;

  const double speed = std::hypot(sample->wind_u, sample->wind_v);
  double eta_v = 1.0;
  if (speed >= params.calm_threshold) {
    // Without a bearing the attack angle is unknown; assume the static one.
    const double phi = site.conductor_angle
                           ? geo::wind_angle(sample->wind_u, sample->wind_v).angle - *site.conductor_angle
                           : params.phi_slr;
    eta_v = eta_wind(speed, phi, site.diameter_m, params);
  }
  return eta_t * std::max(1.0, eta_v);
}

RatingSeries build_rating_series(const Network& network, const WeatherGrid* weather, std::span<const HourStamp> hours,
                                 Regime regime, const RatingParams& params, unsigned workers) {
  params.validate();
  if (regime != Regime::slr && weather == nullptr) {
    throw DomainError(std::string(to_string(regime)) + " ratings need a weather grid");
  }
  const auto n_hours = static_cast<Eigen::Index>(hours.size());
  const auto n_branches = static_cast<Eigen::Index>(network.branch_count());
  RatingSeries series;
  series.regime = regime;
  series.hours.assign(hours.begin(), hours.end());
  series.multiplier = Eigen::MatrixXd::Ones(n_hours, n_branches);

  if (regime != Regime::slr) {
    const auto sites = locate_branches(network, weather, params);
    parallel_for(hours.size(), workers, [&](std::size_t h) {
      const auto hour = hours[h];
      const bool present = weather->present(hour);
      for (Eigen::Index b = 0; b < n_branches; ++b) {
        const auto& site = sites[static_cast<std::size_t>(b)];
        std::optional<WeatherSample> sample;
        if (present && site.eligible) sample = weather->sample_cell(hour, site.cell);
        try {
          series.multiplier(static_cast<Eigen::Index>(h), b) = branch_multiplier(sample, site, regime, params);
        } catch (const DomainError& e) {
          throw DomainError("branch " + std::to_string(network.branches()[static_cast<std::size_t>(b)].id) + " at " +
                            format_hour(hour) + ": " + e.what());
        }
      }
    });
  }

  Eigen::RowVectorXd static_rating(n_branches);
  for (Eigen::Index b = 0; b < n_branches; ++b) static_rating(b) = network.branches()[static_cast<std::size_t>(b)].rating_mva;
  series.normal_limit = series.multiplier.array().rowwise() * static_rating.array();
  series.contingency_limit = params.contingency_ratio * series.normal_limit;
  return series;
}

std::vector<SweepPoint> sweep_parameters(const Network& network, const WeatherGrid& weather,
                                         std::span<const HourStamp> hours, std::span<const double> t_conductor_c,
                                         std::span<const double> phi_slr_deg, const RatingParams& base) {
  const auto sites = locate_branches(network, &weather, base);
  std::vector<SweepPoint> out;
  for (double tc : t_conductor_c) {
    for (double phi_deg : phi_slr_deg) {
      RatingParams p = base;
      p.t_conductor_c = tc;
      p.phi_slr = phi_deg * kDeg;
      p.validate();
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto hour : hours) {
        if (!weather.present(hour)) continue;
        for (const auto& site : sites) {
          if (!site.eligible) continue;
          sum += branch_multiplier(weather.sample_cell(hour, site.cell), site, Regime::dlr, p);
          ++n;
        }
      }
      out.push_back({tc, phi_deg, n > 0 ? sum / static_cast<double>(n) : 1.0, n});
    }
  }
  return out;
}

void write_ratings_csv(std::ostream& out, const Network& network, std::span<const RatingSeries> series) {
  using csv::format_number;
  out << "time,branch_id,regime,multiplier,normal_limit_mva,contingency_limit_mva\n";
  for (const auto& s : series) {
    const auto regime = to_string(s.regime);
    for (std::size_t h = 0; h < s.hours.size(); ++h) {
      const auto stamp = format_hour(s.hours[h]);
      const auto r = static_cast<Eigen::Index>(h);
      for (std::size_t b = 0; b < network.branch_count(); ++b) {
        const auto c = static_cast<Eigen::Index>(b);
        out << stamp << ',' << network.branches()[b].id << ',' << regime << ',' << format_number(s.multiplier(r, c)) << ','
            << format_number(s.normal_limit(r, c)) << ',' << format_number(s.contingency_limit(r, c)) << '\n';
      }
    }
  }
}

}  // namespace gridline
