#pragma once

#include <compare>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gridline/dispatch.hpp"

namespace gridline {

/// Relative slack allowed on a limit before a post-contingency flow counts
/// as a violation.
inline constexpr double kScreeningTolerance = 1e-6;

struct ContingencyPair {
  std::size_t monitored = 0;  ///< branch index b
  std::size_t outaged = 0;    ///< branch index c

  friend auto operator<=>(const ContingencyPair&, const ContingencyPair&) = default;
};

struct Violation {
  ContingencyPair pair;
  double flow = 0.0;      ///< post-contingency MW on the monitored branch
  double overload = 0.0;  ///< |flow| - limit, MW
};

/// Violations sorted by overload, largest first; ties by (monitored, outaged).
struct ViolationSet {
  std::vector<Violation> items;

  bool empty() const noexcept { return items.empty(); }
  std::size_t size() const noexcept { return items.size(); }
};

/// F(b, c) = f_b + LODF(b, c) f_c: flow on b after losing c. Diagonal entries
/// are 0 and columns of radial branches are NaN (never screened).
Eigen::MatrixXd post_contingency_flows(const Eigen::VectorXd& base_flows, const SensitivityFactors& factors);

/// Every valid off-diagonal (b, c) with |F(b, c)| > limit_b (1 + tolerance).
ViolationSet screen_violations(const Eigen::MatrixXd& contingency_flows, std::span<const double> contingency_limits);

/// Which limit the appended post-contingency rows enforce.
enum class ContingencyRowLimit {
  contingency,  ///< the short-term contingency rating used for screening
  normal,       ///< the normal rating
};

struct ScopfOptions {
  int max_iterations = 20;
  double penalty_price = kDefaultPenaltyPrice;
  ContingencyRowLimit row_limit = ContingencyRowLimit::contingency;
  /// Also give the base-case rows penalized slacks in re-solves.
  bool slack_on_base_rows = false;
};

struct IterationRecord {
  int iteration = 0;  ///< 0 is the base solve
  std::size_t violations_added = 0;
  double objective = 0.0;
};

struct ScopfResult {
  DispatchResult dispatch;
  /// The last problem solved: base rows first, then contingency rows in the
  /// order they were appended. Row duals in `dispatch` follow this order.
  DispatchProblem problem;
  int iterations = 0;  ///< while-loop iterations (re-solves)
  /// False when the loop hit max_iterations with new violations pending, or
  /// the base case failed.
  bool converged = false;
  /// Violations left at exit. After convergence these are pairs whose rows
  /// are already active and covered by penalized slack.
  ViolationSet residual;
  std::vector<IterationRecord> trace;
};

/// Preventative N-1 SC-DCOPF by constraint generation:
/// solve the base case, screen post-contingency flows, append a row for each
/// new violated pair (rows are never dropped), re-solve with penalized slacks
/// on appended rows, and repeat until screening finds no new pair.
ScopfResult solve_scdcopf(const Network& network, const SensitivityFactors& factors, const HourData& hour,
                          std::span<const double> normal_limits, std::span<const double> contingency_limits,
                          const ScopfOptions& options, const lp::Solver& solver);

}  // namespace gridline
