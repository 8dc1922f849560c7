#pragma once

#include <limits>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace gridline::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// min cost'x  s.t.  row_lower <= A x <= row_upper,  col_lower <= x <= col_upper.
/// Equality rows use row_lower == row_upper. Infinite bounds are allowed.
struct Problem {
  std::vector<double> cost;
  std::vector<double> col_lower;
  std::vector<double> col_upper;
  Eigen::MatrixXd a;  ///< rows x columns
  std::vector<double> row_lower;
  std::vector<double> row_upper;

  std::size_t columns() const noexcept { return cost.size(); }
  std::size_t rows() const noexcept { return row_lower.size(); }
  /// Throws DomainError on inconsistent sizes or crossed bounds.
  void validate() const;
};

enum class Status { optimal, infeasible, unbounded, iteration_limit };
std::string_view to_string(Status status);

struct Solution {
  Status status = Status::infeasible;
  std::vector<double> x;
  std::vector<double> row_activity;
  /// d(objective)/d(active bound) per row; zero for rows not at a bound.
  std::vector<double> row_duals;
  /// d(objective)/d(x_j) for nonbasic columns; zero for basic ones.
  std::vector<double> reduced_costs;
  double objective = 0.0;
  std::size_t iterations = 0;
};

/// Solver contract. Implementations must be safe to call concurrently on
/// distinct problems.
class Solver {
 public:
  virtual ~Solver() = default;
  virtual Solution solve(const Problem& problem) const = 0;
};

/// Two-phase primal simplex on a dense tableau with bounded variables.
///
/// Every row gets a logical variable r_i = a_i x carrying the row bounds;
/// rows infeasible at the starting point receive an artificial column that
/// phase 1 drives to zero. Pricing is Dantzig's rule with a Harris ratio
/// test; a run of degenerate pivots switches to Bland's rule until progress
/// resumes. Intended for problems with at most a few thousand rows.
class DenseSimplex final : public Solver {
 public:
  struct Options {
    double feasibility_tolerance = 1e-9;
    double optimality_tolerance = 1e-9;
    double pivot_tolerance = 1e-9;
    std::size_t max_iterations = 0;  ///< 0 selects a size-based default
  };

  DenseSimplex() = default;
  explicit DenseSimplex(Options options) : options_(options) {}

  Solution solve(const Problem& problem) const override;

 private:
  Options options_{};
};

}  // namespace gridline::lp
