#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "gridline/grid_model.hpp"
#include "gridline/lp.hpp"
#include "gridline/network_factors.hpp"

namespace gridline {

inline constexpr double kDefaultPenaltyPrice = 2000.0;  // $/MWh

/// Inputs for one hour, in network bus and generator order.
struct HourData {
  HourStamp hour;
  Eigen::VectorXd demand;        ///< MW per bus
  Eigen::VectorXd availability;  ///< MW upper bound per generator
};

HourData hour_data(const HourlySeries& series, std::size_t hour_index);

struct GeneratorOffer {
  std::size_t bus = 0;  ///< bus index
  double p_min = 0.0;
  double p_max = 0.0;   ///< static p_max already capped by availability
  std::vector<CostSegment> segments;
};

/// One two-sided flow constraint -limit <= coefficients . injection <= limit.
struct FlowRow {
  Eigen::RowVectorXd coefficients;  ///< over buses
  double limit = 0.0;               ///< MW, > 0
  bool slack_allowed = false;
  std::size_t monitored_branch = 0;
  std::optional<std::size_t> outaged_branch;  ///< set for contingency rows
};

struct DispatchProblem {
  HourStamp hour;
  Eigen::VectorXd demand;
  std::vector<GeneratorOffer> offers;
  std::vector<FlowRow> flow_rows;
  double penalty_price = kDefaultPenaltyPrice;
};

enum class DispatchStatus { optimal, infeasible, error };
std::string_view to_string(DispatchStatus status);

struct DispatchResult {
  DispatchStatus status = DispatchStatus::error;
  Eigen::VectorXd p_gen;  ///< MW per generator
  Eigen::VectorXd flows;  ///< physical MW per branch, PTDF (P_G - P_D)
  double objective = 0.0;        ///< generation cost plus slack penalties, $
  double generation_cost = 0.0;  ///< $
  double penalty_cost = 0.0;     ///< $
  /// Shadow price magnitude per flow row: the $/MWh saved by relaxing the
  /// binding side of the row by one MW. Zero for non-binding rows.
  std::vector<double> row_duals;
  double balance_dual = 0.0;  ///< system marginal price at the slack bus, $/MWh
  std::vector<double> slack_values;  ///< MW per flow row (zero for hard rows)
  std::size_t lp_iterations = 0;
  std::string message;

  bool ok() const noexcept { return status == DispatchStatus::optimal; }
};

/// Offers and demand for one hour with no flow rows.
DispatchProblem make_dispatch_problem(const Network& network, const HourData& hour);

/// Base-case rows PTDF_b for every branch at `limits` (MW per branch).
void add_base_rows(DispatchProblem& problem, const SensitivityFactors& factors, std::span<const double> limits,
                   bool slack_allowed = false);

/// Post-contingency row PTDF_b + LODF_{b,c} PTDF_c for monitored b, outaged c.
FlowRow contingency_row(const SensitivityFactors& factors, std::size_t monitored, std::size_t outaged, double limit,
                        bool slack_allowed = true);

/// Solves the problem as given: hard rows stay hard, slack-allowed rows get
/// a pair of nonnegative slack columns priced at penalty_price.
DispatchResult solve_penalized_dcopf(const DispatchProblem& problem, const SensitivityFactors& factors,
                                     const lp::Solver& solver);

/// Base DCOPF: power balance, generator bounds and hard two-sided PTDF limits.
DispatchResult solve_base_dcopf(const Network& network, const SensitivityFactors& factors, const HourData& hour,
                                std::span<const double> limits, const lp::Solver& solver);

/// Merit-order dispatch with no network limits; flows reported for information.
DispatchResult solve_copperplate(const Network& network, const SensitivityFactors& factors, const HourData& hour,
                                 const lp::Solver& solver);

struct DispatchAudit {
  double balance_residual = 0.0;      ///< |sum P_G - sum P_D|, MW
  double max_bound_violation = 0.0;   ///< MW
  double max_row_violation = 0.0;     ///< MW beyond limit + slack
  bool within(double tolerance) const {
    return balance_residual <= tolerance && max_bound_violation <= tolerance && max_row_violation <= tolerance;
  }
};

/// Recomputes balance, bounds and every row from the dispatch alone.
DispatchAudit audit_dispatch(const DispatchProblem& problem, const DispatchResult& result);

}  // namespace gridline
