#include "gridline/dispatch.hpp"

#include <algorithm>
#include <cmath>

#include "gridline/error.hpp"

namespace gridline {

std::string_view to_string(DispatchStatus status) {
  switch (status) {
    case DispatchStatus::optimal: return "optimal";
    case DispatchStatus::infeasible: return "infeasible";
    case DispatchStatus::error: return "error";
  }
  return "error";
}

HourData hour_data(const HourlySeries& series, std::size_t h) {
  if (h >= series.hours.size()) throw DomainError("hour index out of range");
  const auto r = static_cast<Eigen::Index>(h);
  return HourData{series.hours[h], series.demand.row(r).transpose(), series.availability.row(r).transpose()};
}

DispatchProblem make_dispatch_problem(const Network& network, const HourData& hour) {
  if (hour.demand.size() != static_cast<Eigen::Index>(network.bus_count()) ||
      hour.availability.size() != static_cast<Eigen::Index>(network.generator_count())) {
    throw DomainError("hour data is not aligned with the network");
  }
  DispatchProblem p;
  p.hour = hour.hour;
  p.demand = hour.demand;
  for (std::size_t g = 0; g < network.generator_count(); ++g) {
    const auto& gen = network.generators()[g];
    GeneratorOffer offer;
    offer.bus = network.bus_index(gen.bus);
    offer.p_max = std::clamp(hour.availability(static_cast<Eigen::Index>(g)), 0.0, gen.p_max_mw);
    offer.p_min = std::min(gen.p_min_mw, offer.p_max);
    offer.segments = gen.cost_curve;
    p.offers.push_back(std::move(offer));
  }
  return p;
}

void add_base_rows(DispatchProblem& problem, const SensitivityFactors& factors, std::span<const double> limits,
                   bool slack_allowed) {
  if (limits.size() != static_cast<std::size_t>(factors.ptdf.rows())) {
    throw DomainError("limit vector does not match the branch count");
  }
  for (std::size_t b = 0; b < limits.size(); ++b) {
    FlowRow row;
    row.coefficients = factors.ptdf.row(static_cast<Eigen::Index>(b));
    row.limit = limits[b];
    row.slack_allowed = slack_allowed;
    row.monitored_branch = b;
    problem.flow_rows.push_back(std::move(row));
  }
}

FlowRow contingency_row(const SensitivityFactors& factors, std::size_t monitored, std::size_t outaged, double limit,
                        bool slack_allowed) {
  const auto b = static_cast<Eigen::Index>(monitored);
  const auto c = static_cast<Eigen::Index>(outaged);
  FlowRow row;
  row.coefficients = factors.ptdf.row(b) + factors.lodf(b, c) * factors.ptdf.row(c);
  row.limit = limit;
  row.slack_allowed = slack_allowed;
  row.monitored_branch = monitored;
  row.outaged_branch = outaged;
  return row;
}

namespace {

// Column layout of the LP built for a DispatchProblem.
struct Layout {
  std::vector<std::size_t> first_segment;  // per offer
  std::vector<std::size_t> segment_count;
  std::vector<std::size_t> slack_column;   // per flow row; npos when hard
  std::size_t columns = 0;
};

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

Layout build_lp(const DispatchProblem& p, lp::Problem& lp) {
  Layout layout;
  for (const auto& offer : p.offers) {
    layout.first_segment.push_back(lp.cost.size());
    // Convex offers fill cheapest segments first, so availability truncates
    // from the top and p_min is met from the bottom.
    double room = offer.p_max;
    double floor = offer.p_min;
    std::size_t count = 0;
    for (const auto& seg : offer.segments) {
      const double cap = std::clamp(seg.capacity_mw, 0.0, room);
      const double low = std::clamp(floor, 0.0, cap);
      room -= cap;
      floor -= low;
      lp.cost.push_back(seg.marginal_cost);
      lp.col_lower.push_back(low);
      lp.col_upper.push_back(cap);
      ++count;
    }
    layout.segment_count.push_back(count);
  }
  for (const auto& row : p.flow_rows) {
    if (!(row.limit > 0.0) || !std::isfinite(row.limit)) throw DomainError("flow row limit must be positive and finite");
    if (row.slack_allowed) {
      layout.slack_column.push_back(lp.cost.size());
      for (int k = 0; k < 2; ++k) {
        lp.cost.push_back(p.penalty_price);
        lp.col_lower.push_back(0.0);
        lp.col_upper.push_back(lp::kInfinity);
      }
    } else {
      layout.slack_column.push_back(kNone);
    }
  }
  layout.columns = lp.cost.size();

  const auto m = static_cast<Eigen::Index>(1 + p.flow_rows.size());
  lp.a = Eigen::MatrixXd::Zero(m, static_cast<Eigen::Index>(layout.columns));
  const double total_demand = p.demand.sum();
  lp.row_lower.push_back(total_demand);
  lp.row_upper.push_back(total_demand);
  for (std::size_t g = 0; g < p.offers.size(); ++g) {
    for (std::size_t k = 0; k < layout.segment_count[g]; ++k) lp.a(0, static_cast<Eigen::Index>(layout.first_segment[g] + k)) = 1.0;
  }
  for (std::size_t i = 0; i < p.flow_rows.size(); ++i) {
    const auto& row = p.flow_rows[i];
    const auto r = static_cast<Eigen::Index>(i + 1);
    for (std::size_t g = 0; g < p.offers.size(); ++g) {
      const double coeff = row.coefficients(static_cast<Eigen::Index>(p.offers[g].bus));
      for (std::size_t k = 0; k < layout.segment_count[g]; ++k) {
        lp.a(r, static_cast<Eigen::Index>(layout.first_segment[g] + k)) = coeff;
      }
    }
    if (layout.slack_column[i] != kNone) {
      lp.a(r, static_cast<Eigen::Index>(layout.slack_column[i])) = -1.0;
      lp.a(r, static_cast<Eigen::Index>(layout.slack_column[i] + 1)) = 1.0;
    }
    const double offset = row.coefficients.dot(p.demand);
    lp.row_lower.push_back(-row.limit + offset);
    lp.row_upper.push_back(row.limit + offset);
  }
  return layout;
}

Eigen::VectorXd bus_injection(const DispatchProblem& p, const Eigen::VectorXd& p_gen) {
  Eigen::VectorXd inj = -p.demand;
  for (std::size_t g = 0; g < p.offers.size(); ++g) inj(static_cast<Eigen::Index>(p.offers[g].bus)) += p_gen(static_cast<Eigen::Index>(g));
  return inj;
}

}  // namespace

DispatchResult solve_penalized_dcopf(const DispatchProblem& problem, const SensitivityFactors& factors,
                                     const lp::Solver& solver) {
  if (problem.demand.size() != factors.ptdf.cols()) throw DomainError("demand vector does not match the bus count");
  lp::Problem lp;
  const auto layout = build_lp(problem, lp);
  const auto sol = solver.solve(lp);

  DispatchResult result;
  result.lp_iterations = sol.iterations;
  if (sol.status == lp::Status::infeasible) {
    result.status = DispatchStatus::infeasible;
    result.message = "dispatch infeasible at " + format_hour(problem.hour);
    return result;
  }
  if (sol.status != lp::Status::optimal) {
    result.status = DispatchStatus::error;
    result.message = "LP solver returned " + std::string(lp::to_string(sol.status)) + " at " + format_hour(problem.hour);
    return result;
  }

  result.status = DispatchStatus::optimal;
  result.p_gen = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(problem.offers.size()));
  for (std::size_t g = 0; g < problem.offers.size(); ++g) {
    double p = 0.0;
    for (std::size_t k = 0; k < layout.segment_count[g]; ++k) {
      const auto col = layout.first_segment[g] + k;
      p += sol.x[col];
      result.generation_cost += sol.x[col] * lp.cost[col];
    }
    result.p_gen(static_cast<Eigen::Index>(g)) = p;
  }
  result.flows = factors.ptdf * bus_injection(problem, result.p_gen);
  result.balance_dual = sol.row_duals[0];
  result.row_duals.resize(problem.flow_rows.size());
  result.slack_values.assign(problem.flow_rows.size(), 0.0);
  for (std::size_t i = 0; i < problem.flow_rows.size(); ++i) {
    result.row_duals[i] = std::abs(sol.row_duals[i + 1]);
    if (layout.slack_column[i] != kNone) {
      const double s = sol.x[layout.slack_column[i]] + sol.x[layout.slack_column[i] + 1];
      result.slack_values[i] = s;
      result.penalty_cost += s * problem.penalty_price;
    }
  }
  result.objective = sol.objective;
  return result;
}

DispatchResult solve_base_dcopf(const Network& network, const SensitivityFactors& factors, const HourData& hour,
                                std::span<const double> limits, const lp::Solver& solver) {
  auto problem = make_dispatch_problem(network, hour);
  add_base_rows(problem, factors, limits, false);
  return solve_penalized_dcopf(problem, factors, solver);
}

DispatchResult solve_copperplate(const Network& network, const SensitivityFactors& factors, const HourData& hour,
                                 const lp::Solver& solver) {
  return solve_penalized_dcopf(make_dispatch_problem(network, hour), factors, solver);
}

DispatchAudit audit_dispatch(const DispatchProblem& problem, const DispatchResult& result) {
  DispatchAudit audit;
  audit.balance_residual = std::abs(result.p_gen.sum() - problem.demand.sum());
  for (std::size_t g = 0; g < problem.offers.size(); ++g) {
    const double p = result.p_gen(static_cast<Eigen::Index>(g));
    const auto& offer = problem.offers[g];
    audit.max_bound_violation = std::max({audit.max_bound_violation, offer.p_min - p, p - offer.p_max});
  }
  Eigen::VectorXd inj = -problem.demand;
  for (std::size_t g = 0; g < problem.offers.size(); ++g) {
    inj(static_cast<Eigen::Index>(problem.offers[g].bus)) += result.p_gen(static_cast<Eigen::Index>(g));
  }
  for (std::size_t i = 0; i < problem.flow_rows.size(); ++i) {
    const auto& row = problem.flow_rows[i];
    const double flow = row.coefficients.dot(inj);
    const double slack = i < result.slack_values.size() ? result.slack_values[i] : 0.0;
    audit.max_row_violation = std::max(audit.max_row_violation, std::abs(flow) - row.limit - slack);
  }
  return audit;
}

}  // namespace gridline
