#include "gridline/scopf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "gridline/error.hpp"

namespace gridline {

Eigen::MatrixXd post_contingency_flows(const Eigen::VectorXd& base_flows, const SensitivityFactors& factors) {
  const auto l = factors.lodf.rows();
  if (base_flows.size() != l || factors.lodf.cols() != l) throw DomainError("post_contingency_flows: dimension mismatch");
  Eigen::MatrixXd f = base_flows.replicate(1, l) + factors.lodf * base_flows.asDiagonal();
  for (Eigen::Index c = 0; c < l; ++c) {
    if (factors.radial[static_cast<std::size_t>(c)]) {
      f.col(c).setConstant(std::numeric_limits<double>::quiet_NaN());
    } else {
      f(c, c) = 0.0;
    }
  }
  return f;
}

ViolationSet screen_violations(const Eigen::MatrixXd& f, std::span<const double> limits) {
  if (static_cast<std::size_t>(f.rows()) != limits.size()) throw DomainError("screen_violations: limit count mismatch");
  ViolationSet set;
  for (Eigen::Index c = 0; c < f.cols(); ++c) {
    for (Eigen::Index b = 0; b < f.rows(); ++b) {
      const double flow = f(b, c);
      if (b == c || std::isnan(flow)) continue;
      const double limit = limits[static_cast<std::size_t>(b)];
      if (std::abs(flow) > limit * (1.0 + kScreeningTolerance)) {
        set.items.push_back({{static_cast<std::size_t>(b), static_cast<std::size_t>(c)}, flow, std::abs(flow) - limit});
      }
    }
  }
  std::sort(set.items.begin(), set.items.end(), [](const Violation& x, const Violation& y) {
    if (x.overload != y.overload) return x.overload > y.overload;
    return x.pair < y.pair;
  });
  return set;
}

ScopfResult solve_scdcopf(const Network& network, const SensitivityFactors& factors, const HourData& hour,
                          std::span<const double> normal_limits, std::span<const double> contingency_limits,
                          const ScopfOptions& options, const lp::Solver& solver) {
  if (options.max_iterations < 1) throw DomainError("max_iterations must be at least 1");
  if (normal_limits.size() != network.branch_count() || contingency_limits.size() != network.branch_count()) {
    throw DomainError("limit vectors do not match the branch count");
  }
  for (std::size_t b = 0; b < normal_limits.size(); ++b) {
    if (!(normal_limits[b] > 0.0) || !(contingency_limits[b] > 0.0)) {
      throw DomainError("branch limits must be positive");
    }
  }

  ScopfResult result;
  result.problem = make_dispatch_problem(network, hour);
  result.problem.penalty_price = options.penalty_price;
  add_base_rows(result.problem, factors, normal_limits, false);
  result.dispatch = solve_penalized_dcopf(result.problem, factors, solver);
  if (!result.dispatch.ok()) return result;
  result.trace.push_back({0, 0, result.dispatch.objective});

  if (options.slack_on_base_rows) {
    for (auto& row : result.problem.flow_rows) row.slack_allowed = true;
  }

  std::set<ContingencyPair> active;
  auto violations = screen_violations(post_contingency_flows(result.dispatch.flows, factors), contingency_limits);
  while (!violations.empty()) {
    std::vector<ContingencyPair> fresh;
    for (const auto& v : violations.items) {
      if (!active.contains(v.pair)) fresh.push_back(v.pair);
    }
    if (fresh.empty()) break;
    if (result.iterations >= options.max_iterations) {
      result.residual = std::move(violations);
      return result;
    }
    ++result.iterations;
    for (const auto& pair : fresh) {
      active.insert(pair);
      const double limit = options.row_limit == ContingencyRowLimit::contingency ? contingency_limits[pair.monitored]
                                                                                 : normal_limits[pair.monitored];
      result.problem.flow_rows.push_back(contingency_row(factors, pair.monitored, pair.outaged, limit, true));
    }
    result.dispatch = solve_penalized_dcopf(result.problem, factors, solver);
    if (!result.dispatch.ok()) return result;
    result.trace.push_back({result.iterations, fresh.size(), result.dispatch.objective});
    violations = screen_violations(post_contingency_flows(result.dispatch.flows, factors), contingency_limits);
  }
  result.converged = true;
  result.residual = std::move(violations);
  return result;
}

}  // namespace gridline
