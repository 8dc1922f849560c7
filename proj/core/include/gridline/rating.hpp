#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "gridline/grid_model.hpp"
#include "gridline/weather.hpp"

namespace gridline {

enum class Regime { slr, aar, dlr };

std::string_view to_string(Regime regime);
Regime parse_regime(std::string_view text);

/// Assumptions behind the static rating and the air properties used by the
/// multiplicative ampacity model. Temperatures are degrees Celsius here and
/// converted to kelvin internally.
struct RatingParams {
  double t_conductor_c = 100.0;
  double t_ambient_slr_c = 40.0;
  double v_slr = 0.61;                 ///< m/s
  double phi_slr = 0.0;                ///< attack angle assumed by the static rating, rad
  double air_density = 1.029;          ///< kg/m^3
  double air_viscosity = 2.043e-5;     ///< kg/(m s)
  double contingency_ratio = 1.146;
  double eligibility_length_km = 100.0;
  double diameter_slope = 2.0e-5;      ///< m/A
  double diameter_intercept = 0.006;   ///< m
  double calm_threshold = 0.01;        ///< m/s; slower winds count as calm

  /// K_angle evaluated at the (folded) static-rating attack angle.
  double k_angle_slr() const;
  /// Throws DomainError on violated invariants.
  void validate() const;
};

/// Reads `key = value` lines ('#' comments allowed) over `base`. Keys:
/// t_conductor_c, t_ambient_slr_c, v_slr_ms, phi_slr_deg, air_density,
/// air_viscosity, contingency_ratio, eligibility_length_km, diameter_slope,
/// diameter_intercept, calm_threshold_ms.
RatingParams load_rating_params(const std::filesystem::path& file, RatingParams base = {});
void write_rating_params(std::ostream& out, const RatingParams& params);

/// IEEE 738 attack-angle weighting: 1.194 - cos(phi) + 0.194 cos(2 phi) +
/// 0.368 sin(2 phi). Meaningful on [0, pi/2]; see fold_attack_angle.
double k_angle(double phi);

/// Maps any angle between wind and conductor onto [0, pi/2]. Wind along a
/// conductor cools the same whichever way it blows.
double fold_attack_angle(double phi);

/// Temperature-only factor sqrt((T_C - T_A) / (T_C - T_A^SLR)); no floor.
/// Throws DomainError when t_ambient_k >= T_C.
double eta_temperature(double t_ambient_k, const RatingParams& params);

/// Wind factor for speed (m/s), attack angle (rad) and conductor diameter
/// (m). Calm wind returns 1. Throws DomainError for negative speed or
/// nonpositive diameter.
double eta_wind(double speed, double phi, double diameter_m, const RatingParams& params);

/// Three-phase current for an MVA rating at a line-to-line kV.
double ampacity_amps(double rating_mva, double base_kv);

/// Explicit diameter when given, else the linear ampacity fit.
double estimate_diameter(const Branch& branch, const Network& network, const RatingParams& params);

/// Lines shorter than the eligibility length; transformers never.
bool is_eligible(const Branch& branch, const RatingParams& params);

/// Hour-invariant per-branch data needed to rate a branch from weather.
struct BranchSite {
  bool eligible = false;
  /// Bearing in the from-bus UTM zone; nullopt when endpoints coincide.
  std::optional<double> conductor_angle;
  double diameter_m = 0.0;
  std::size_t cell = 0;  ///< nearest weather cell to the branch midpoint
};

/// Resolves eligibility, geometry and weather cell for every branch. The
/// weather grid may be null, in which case cells are left at 0.
std::vector<BranchSite> locate_branches(const Network& network, const WeatherGrid* weather, const RatingParams& params);

/// Rating multiplier for one branch-hour:
///   SLR -> 1, AAR -> eta_T, DLR -> eta_T * max(1, eta_v).
/// Missing weather or an ineligible branch -> 1 in every regime.
double branch_multiplier(const std::optional<WeatherSample>& sample, const BranchSite& site, Regime regime,
                         const RatingParams& params);

struct RatingSeries {
  Regime regime = Regime::slr;
  std::vector<HourStamp> hours;
  Eigen::MatrixXd multiplier;         ///< hours x branches
  Eigen::MatrixXd normal_limit;       ///< MVA
  Eigen::MatrixXd contingency_limit;  ///< MVA
};

/// Ratings for every branch over `hours`. `weather` may be null only for
/// SLR. Hours outside the weather range raise DomainError; hours missing
/// from the grid fall back to the static rating.
RatingSeries build_rating_series(const Network& network, const WeatherGrid* weather, std::span<const HourStamp> hours,
                                 Regime regime, const RatingParams& params, unsigned workers = 1);

struct SweepPoint {
  double t_conductor_c = 0.0;
  double phi_slr_deg = 0.0;
  double mean_multiplier = 1.0;
  std::size_t samples = 0;  ///< eligible branch-hours with weather
};

/// Mean DLR multiplier over eligible branches and non-missing hours for
/// every (T_C, phi_SLR) pair, T_C-major order.
std::vector<SweepPoint> sweep_parameters(const Network& network, const WeatherGrid& weather,
                                         std::span<const HourStamp> hours, std::span<const double> t_conductor_c,
                                         std::span<const double> phi_slr_deg, const RatingParams& base);

/// `time,branch_id,regime,multiplier,normal_limit_mva,contingency_limit_mva`
void write_ratings_csv(std::ostream& out, const Network& network, std::span<const RatingSeries> series);

}  // namespace gridline
