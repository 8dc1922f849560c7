#include "gridline/lp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gridline/error.hpp"

namespace gridline::lp {

std::string_view to_string(Status status) {
  switch (status) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::iteration_limit: return "iteration_limit";
  }
  return "infeasible";
}

void Problem::validate() const {
  const auto n = cost.size();
  if (col_lower.size() != n || col_upper.size() != n) throw DomainError("lp: column bound sizes differ from cost size");
  if (row_upper.size() != row_lower.size()) throw DomainError("lp: row bound sizes differ");
  if (static_cast<std::size_t>(a.rows()) != row_lower.size() || static_cast<std::size_t>(a.cols()) != n) {
    throw DomainError("lp: constraint matrix has the wrong shape");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(cost[j])) throw DomainError("lp: non-finite cost");
    if (col_lower[j] > col_upper[j]) throw DomainError("lp: crossed column bounds");
  }
  for (std::size_t i = 0; i < row_lower.size(); ++i) {
    if (row_lower[i] > row_upper[i]) throw DomainError("lp: crossed row bounds");
  }
  if (!a.allFinite()) throw DomainError("lp: non-finite constraint coefficient");
}

namespace {

enum class State { basic, at_lower, at_upper, free_zero };

class Tableau {
 public:
  Tableau(const Problem& p, const DenseSimplex::Options& opt) : p_(p), opt_(opt) {
    n_ = p.columns();
    m_ = p.rows();
    build();
  }

  Solution run() {
    Solution sol;
    if (!artificials_.empty()) {
      std::vector<double> phase1(total_, 0.0);
      for (auto k : artificials_) phase1[k] = 1.0;
      const auto st = iterate(phase1);
      if (st == Status::iteration_limit) return finish(Status::iteration_limit);
      refresh_basic_values();
      double infeasibility = 0.0;
      for (auto k : artificials_) infeasibility += x_[k];
      if (infeasibility > phase1_tolerance_) return finish(Status::infeasible);
      for (auto k : artificials_) {
        lo_[k] = hi_[k] = 0.0;
        if (state_[k] != State::basic) state_[k] = State::at_lower;
        x_[k] = 0.0;
      }
    }
    std::vector<double> phase2(total_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) phase2[j] = p_.cost[j];
    const auto st = iterate(phase2);
    refresh_basic_values();
    return finish(st);
  }

 private:
  void build() {
    total_ = n_ + m_;
    lo_.assign(total_, 0.0);
    hi_.assign(total_, 0.0);
    x_.assign(total_, 0.0);
    state_.assign(total_, State::at_lower);
    for (std::size_t j = 0; j < n_; ++j) {
      lo_[j] = p_.col_lower[j];
      hi_[j] = p_.col_upper[j];
      if (std::isfinite(lo_[j])) {
        x_[j] = lo_[j];
        state_[j] = State::at_lower;
      } else if (std::isfinite(hi_[j])) {
        x_[j] = hi_[j];
        state_[j] = State::at_upper;
      } else {
        x_[j] = 0.0;
        state_[j] = State::free_zero;
      }
    }
    Eigen::VectorXd xs(static_cast<Eigen::Index>(n_));
    for (std::size_t j = 0; j < n_; ++j) xs(static_cast<Eigen::Index>(j)) = x_[j];
    const Eigen::VectorXd act = p_.a * xs;

    double scale = 1.0;
    struct ArtRow {
      std::size_t row;
      double sigma;
    };
    std::vector<ArtRow> art_rows;
    basis_.assign(m_, 0);
    std::vector<double> row_sign(m_, -1.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t r = n_ + i;
      lo_[r] = p_.row_lower[i];
      hi_[r] = p_.row_upper[i];
      const double ai = act(static_cast<Eigen::Index>(i));
      if (std::isfinite(lo_[r])) scale = std::max(scale, std::abs(lo_[r]));
      if (std::isfinite(hi_[r])) scale = std::max(scale, std::abs(hi_[r]));
      if (ai >= lo_[r] - opt_.feasibility_tolerance && ai <= hi_[r] + opt_.feasibility_tolerance) {
        basis_[i] = r;
        state_[r] = State::basic;
        x_[r] = ai;
      } else {
        const bool below = ai < lo_[r];
        const double bound = below ? lo_[r] : hi_[r];
        x_[r] = bound;
        state_[r] = below ? State::at_lower : State::at_upper;
        // a_i x - r_i + sigma * art = 0 with art = |act - bound| >= 0.
        const double sigma = below ? 1.0 : -1.0;
        art_rows.push_back({i, sigma});
        row_sign[i] = sigma;
      }
    }
    phase1_tolerance_ = 1e-9 * scale * static_cast<double>(std::max<std::size_t>(1, art_rows.size()));
    phase1_tolerance_ = std::max(phase1_tolerance_, 1e-7);

    const std::size_t n_art = art_rows.size();
    const std::size_t first_art = total_;
    total_ += n_art;
    lo_.resize(total_, 0.0);
    hi_.resize(total_, kInfinity);
    x_.resize(total_, 0.0);
    state_.resize(total_, State::basic);

    t_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(total_));
    t_.leftCols(static_cast<Eigen::Index>(n_)) = p_.a;
    for (std::size_t i = 0; i < m_; ++i) t_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n_ + i)) = -1.0;
    for (std::size_t k = 0; k < n_art; ++k) {
      const auto [row, sigma] = art_rows[k];
      const std::size_t col = first_art + k;
      t_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = sigma;
      basis_[row] = col;
      x_[col] = std::abs(act(static_cast<Eigen::Index>(row)) - x_[n_ + row]);
      artificials_.push_back(col);
    }
    // B is diagonal (entries -1 or sigma); scale rows to form B^{-1} A.
    for (std::size_t i = 0; i < m_; ++i) t_.row(static_cast<Eigen::Index>(i)) /= row_sign[i];

    max_iterations_ = opt_.max_iterations > 0 ? opt_.max_iterations : 200 * (m_ + n_) + 10000;
  }

  // x_B = -T_N x_N for every row; removes accumulated drift.
  void refresh_basic_values() {
    Eigen::VectorXd xn = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total_));
    for (std::size_t j = 0; j < total_; ++j) {
      if (state_[j] != State::basic) xn(static_cast<Eigen::Index>(j)) = x_[j];
    }
    const Eigen::VectorXd xb = -(t_ * xn);
    for (std::size_t r = 0; r < m_; ++r) x_[basis_[r]] = xb(static_cast<Eigen::Index>(r));
  }

  Status iterate(const std::vector<double>& cost) {
    Eigen::RowVectorXd c(static_cast<Eigen::Index>(total_));
    for (std::size_t j = 0; j < total_; ++j) c(static_cast<Eigen::Index>(j)) = cost[j];
    Eigen::RowVectorXd cb(static_cast<Eigen::Index>(m_));
    for (std::size_t r = 0; r < m_; ++r) cb(static_cast<Eigen::Index>(r)) = cost[basis_[r]];
    d_ = c - cb * t_;

    std::size_t degenerate_run = 0;
    bool bland = false;
    std::size_t since_refresh = 0;
    while (true) {
      if (iterations_ >= max_iterations_) return Status::iteration_limit;

      // Pricing.
      std::size_t q = total_;
      double best = 0.0;
      double dir = 0.0;
      for (std::size_t j = 0; j < total_; ++j) {
        const auto s = state_[j];
        if (s == State::basic || hi_[j] - lo_[j] <= 0.0) continue;
        const double dj = d_(static_cast<Eigen::Index>(j));
        double candidate_dir = 0.0;
        if ((s == State::at_lower || s == State::free_zero) && dj < -opt_.optimality_tolerance) candidate_dir = 1.0;
        if ((s == State::at_upper || s == State::free_zero) && dj > opt_.optimality_tolerance) candidate_dir = -1.0;
        if (candidate_dir == 0.0) continue;
        if (bland) {
          q = j;
          dir = candidate_dir;
          break;
        }
        if (std::abs(dj) > best) {
          best = std::abs(dj);
          q = j;
          dir = candidate_dir;
        }
      }
      if (q == total_) return Status::optimal;

      // Harris ratio test: pass 1 finds the step allowed with bounds relaxed
      // by the feasibility tolerance; pass 2 picks the largest pivot within it.
      const auto qi = static_cast<Eigen::Index>(q);
      const double tol = opt_.feasibility_tolerance;
      double relaxed = kInfinity;
      for (std::size_t r = 0; r < m_; ++r) {
        const double alpha = t_(static_cast<Eigen::Index>(r), qi);
        if (std::abs(alpha) <= opt_.pivot_tolerance) continue;
        const double rate = -alpha * dir;
        const auto v = basis_[r];
        double limit = kInfinity;
        if (rate < 0.0 && std::isfinite(lo_[v])) limit = (x_[v] - lo_[v] + tol) / -rate;
        if (rate > 0.0 && std::isfinite(hi_[v])) limit = (hi_[v] - x_[v] + tol) / rate;
        relaxed = std::min(relaxed, limit);
      }
      std::size_t leave = m_;
      double step = kInfinity;
      double pivot_mag = 0.0;
      for (std::size_t r = 0; r < m_; ++r) {
        const double alpha = t_(static_cast<Eigen::Index>(r), qi);
        if (std::abs(alpha) <= opt_.pivot_tolerance) continue;
        const double rate = -alpha * dir;
        const auto v = basis_[r];
        double limit = kInfinity;
        if (rate < 0.0 && std::isfinite(lo_[v])) limit = (x_[v] - lo_[v]) / -rate;
        if (rate > 0.0 && std::isfinite(hi_[v])) limit = (hi_[v] - x_[v]) / rate;
        if (!(limit <= relaxed)) continue;
        limit = std::max(0.0, limit);
        const bool better = bland ? (leave == m_ || limit < step || (limit == step && v < basis_[leave]))
                                  : (std::abs(alpha) > pivot_mag);
        if (better) {
          leave = r;
          step = limit;
          pivot_mag = std::abs(alpha);
        }
      }
      const double span = hi_[q] - lo_[q];
      const bool flip = std::isfinite(span) && span <= step;
      if (flip) step = span;
      if (!std::isfinite(step)) return Status::unbounded;

      ++iterations_;
      if (step <= 1e-12) {
        if (++degenerate_run > 50) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }

      // Move the entering variable and every basic variable.
      x_[q] += dir * step;
      if (step != 0.0) {
        for (std::size_t r = 0; r < m_; ++r) x_[basis_[r]] -= t_(static_cast<Eigen::Index>(r), qi) * dir * step;
      }

      if (flip) {
        state_[q] = dir > 0 ? State::at_upper : State::at_lower;
        x_[q] = dir > 0 ? hi_[q] : lo_[q];
        continue;
      }

      const auto out = basis_[leave];
      const double rate = -t_(static_cast<Eigen::Index>(leave), qi) * dir;
      if (rate < 0.0) {
        state_[out] = State::at_lower;
        x_[out] = lo_[out];
      } else {
        state_[out] = State::at_upper;
        x_[out] = hi_[out];
      }
      pivot(leave, q);
      basis_[leave] = q;
      state_[q] = State::basic;

      if (++since_refresh >= 100) {
        refresh_basic_values();
        since_refresh = 0;
      }
    }
  }

  void pivot(std::size_t r, std::size_t q) {
    const auto ri = static_cast<Eigen::Index>(r);
    const auto qi = static_cast<Eigen::Index>(q);
    t_.row(ri) /= t_(ri, qi);
    Eigen::VectorXd col = t_.col(qi);
    col(ri) = 0.0;
    const Eigen::RowVectorXd prow = t_.row(ri);
    t_.noalias() -= col * prow;
    t_.col(qi).setZero();
    t_(ri, qi) = 1.0;
    const double dq = d_(qi);
    d_.noalias() -= dq * prow;
    d_(qi) = 0.0;
  }

  Solution finish(Status status) {
    Solution sol;
    sol.status = status;
    sol.iterations = iterations_;
    sol.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
    if (status == Status::optimal) {
      // Snap structurals onto their bounds when round-off leaves them a hair outside.
      for (std::size_t j = 0; j < n_; ++j) sol.x[j] = std::clamp(sol.x[j], lo_[j], hi_[j]);
    }
    Eigen::VectorXd xs(static_cast<Eigen::Index>(n_));
    for (std::size_t j = 0; j < n_; ++j) xs(static_cast<Eigen::Index>(j)) = sol.x[j];
    const Eigen::VectorXd act = p_.a * xs;
    sol.row_activity.assign(act.data(), act.data() + act.size());
    sol.objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) sol.objective += p_.cost[j] * sol.x[j];
    sol.row_duals.assign(m_, 0.0);
    sol.reduced_costs.assign(n_, 0.0);
    if (status == Status::optimal) {
      for (std::size_t i = 0; i < m_; ++i) {
        if (state_[n_ + i] != State::basic) sol.row_duals[i] = d_(static_cast<Eigen::Index>(n_ + i));
      }
      for (std::size_t j = 0; j < n_; ++j) {
        if (state_[j] != State::basic) sol.reduced_costs[j] = d_(static_cast<Eigen::Index>(j));
      }
    }
    return sol;
  }

  const Problem& p_;
  const DenseSimplex::Options& opt_;
  std::size_t n_ = 0, m_ = 0, total_ = 0;
  Eigen::MatrixXd t_;
  Eigen::RowVectorXd d_;
  std::vector<double> lo_, hi_, x_;
  std::vector<State> state_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> artificials_;
  double phase1_tolerance_ = 1e-7;
  std::size_t iterations_ = 0;
  std::size_t max_iterations_ = 0;
};

}  // namespace

Solution DenseSimplex::solve(const Problem& problem) const {
  problem.validate();
  Tableau tableau(problem, options_);
  return tableau.run();
}

}  // namespace gridline::lp
