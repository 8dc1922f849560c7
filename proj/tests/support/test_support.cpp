#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

namespace gridline::test {

std::filesystem::path fixture_dir() { return GRIDLINE_FIXTURE_DIR; }
std::filesystem::path fixture(const std::string& name) { return fixture_dir() / name; }
std::vector<std::string> fixture_cases() { return {"three_bus", "five_bus", "thirty_bus"}; }

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("gridline_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Network make_network(int buses, const std::vector<LineSpec>& lines, const std::vector<GenSpec>& gens) {
  std::vector<Bus> b;
  for (int i = 1; i <= buses; ++i) b.push_back({i, 30.0 + 0.07 * i, -97.0 + 0.05 * (i % 3) + 0.01 * i, 138.0});
  std::vector<Branch> br;
  BranchId id = 1;
  for (const auto& l : lines) {
    Branch x;
    x.id = id++;
    x.from_bus = l.from;
    x.to_bus = l.to;
    x.reactance_pu = l.x;
    x.rating_mva = l.rating;
    x.length_derived = true;
    br.push_back(x);
  }
  std::vector<Generator> g;
  GenId gid = 1;
  for (const auto& s : gens) {
    Generator gen;
    gen.id = gid++;
    gen.bus = s.bus;
    gen.fuel = s.fuel;
    gen.p_max_mw = s.p_max;
    gen.cost_curve = {{s.p_max, s.cost}};
    g.push_back(gen);
  }
  return Network(std::move(b), std::move(br), std::move(g));
}

HourData make_hour(const Network& network, const std::vector<std::pair<BusId, double>>& loads) {
  HourData h;
  h.demand = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(network.bus_count()));
  for (const auto& [bus, mw] : loads) h.demand(static_cast<Eigen::Index>(network.bus_index(bus))) += mw;
  h.availability.resize(static_cast<Eigen::Index>(network.generator_count()));
  for (std::size_t g = 0; g < network.generator_count(); ++g) {
    h.availability(static_cast<Eigen::Index>(g)) = network.generators()[g].p_max_mw;
  }
  return h;
}

Eigen::VectorXd dc_flows(const Network& network, const Eigen::VectorXd& injection, BusId slack,
                         const std::vector<bool>& removed) {
  const auto n = static_cast<Eigen::Index>(network.bus_count());
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  const auto& branches = network.branches();
  for (std::size_t k = 0; k < branches.size(); ++k) {
    if (!removed.empty() && removed[k]) continue;
    const auto f = static_cast<Eigen::Index>(network.bus_index(branches[k].from_bus));
    const auto t = static_cast<Eigen::Index>(network.bus_index(branches[k].to_bus));
    const double y = 1.0 / branches[k].reactance_pu;
    B(f, f) += y;
    B(t, t) += y;
    B(f, t) -= y;
    B(t, f) -= y;
  }
  const auto s = static_cast<Eigen::Index>(network.bus_index(slack));
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i != s) keep.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXd Br(m, m);
  Eigen::VectorXd pr(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    pr(i) = injection(keep[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < m; ++j) Br(i, j) = B(keep[static_cast<std::size_t>(i)], keep[static_cast<std::size_t>(j)]);
  }
  const Eigen::VectorXd theta_r = Br.colPivHouseholderQr().solve(pr);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) theta(keep[static_cast<std::size_t>(i)]) = theta_r(i);
  Eigen::VectorXd flows = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(branches.size()));
  for (std::size_t k = 0; k < branches.size(); ++k) {
    if (!removed.empty() && removed[k]) continue;
    const auto f = static_cast<Eigen::Index>(network.bus_index(branches[k].from_bus));
    const auto t = static_cast<Eigen::Index>(network.bus_index(branches[k].to_bus));
    flows(static_cast<Eigen::Index>(k)) = (theta(f) - theta(t)) / branches[k].reactance_pu;
  }
  return flows;
}

std::vector<bool> bridges(const Network& network) {
  const auto n = network.bus_count();
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(n);  // (neighbour, edge)
  const auto& branches = network.branches();
  for (std::size_t k = 0; k < branches.size(); ++k) {
    const auto f = network.bus_index(branches[k].from_bus);
    const auto t = network.bus_index(branches[k].to_bus);
    adj[f].push_back({t, k});
    adj[t].push_back({f, k});
  }
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<bool> out(branches.size(), false);
  int timer = 0;
  std::function<void(std::size_t, std::size_t)> dfs = [&](std::size_t u, std::size_t parent_edge) {
    disc[u] = low[u] = timer++;
    for (const auto& [v, e] : adj[u]) {
      if (e == parent_edge) continue;
      if (disc[v] < 0) {
        dfs(v, e);
        low[u] = std::min(low[u], low[v]);
        if (low[v] > disc[u]) out[e] = true;
      } else {
        low[u] = std::min(low[u], disc[v]);
      }
    }
  };
  for (std::size_t u = 0; u < n; ++u) {
    if (disc[u] < 0) dfs(u, static_cast<std::size_t>(-1));
  }
  return out;
}

double ref_k_angle(double phi) {
  return 1.194 - std::cos(phi) + 0.194 * std::cos(2 * phi) + 0.368 * std::sin(2 * phi);
}

double ref_eta_t(double ta_k, double tc_c, double ta_slr_c) {
  const double tc = tc_c + 273.15, ta_slr = ta_slr_c + 273.15;
  return std::sqrt((tc - ta_k) / (tc - ta_slr));
}

double ref_eta_v(double v, double phi, double d, double v_slr, double phi_slr, double rho, double mu) {
  if (v < 0.01) return 1.0;
  // Reduce both angles to the attack angle in [0, pi/2].
  auto fold = [](double a) {
    a = std::fmod(std::fabs(a), std::numbers::pi);
    return a > std::numbers::pi / 2 ? std::numbers::pi - a : a;
  };
  const double k = ref_k_angle(fold(phi)) / ref_k_angle(fold(phi_slr));
  const double reynolds = rho / mu * d * v;
  return std::sqrt(k) * std::pow(v / v_slr, 0.26) * std::max(1.0, 0.566 * std::pow(reynolds, 0.04));
}

double ref_distance_km(double lat1, double lon1, double lat2, double lon2) {
  constexpr double deg = std::numbers::pi / 180.0;
  const double p1 = lat1 * deg, p2 = lat2 * deg, dl = (lon2 - lon1) * deg;
  const double a = std::cos(p2) * std::sin(dl);
  const double b = std::cos(p1) * std::sin(p2) - std::sin(p1) * std::cos(p2) * std::cos(dl);
  const double c = std::sin(p1) * std::sin(p2) + std::cos(p1) * std::cos(p2) * std::cos(dl);
  return 6378.137 * std::atan2(std::hypot(a, b), c);
}

std::optional<double> brute_force_lp(const lp::Problem& p) {
  const auto n = p.columns();
  // Every finite bound as a hyperplane: coefficients . x = value.
  std::vector<Eigen::RowVectorXd> planes;
  std::vector<double> values;
  auto add = [&](const Eigen::RowVectorXd& a, double v) {
    if (std::isfinite(v)) {
      planes.push_back(a);
      values.push_back(v);
    }
  };
  for (std::size_t j = 0; j < n; ++j) {
    Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(n));
    e(static_cast<Eigen::Index>(j)) = 1.0;
    add(e, p.col_lower[j]);
    add(e, p.col_upper[j]);
  }
  for (std::size_t i = 0; i < p.rows(); ++i) {
    add(p.a.row(static_cast<Eigen::Index>(i)), p.row_lower[i]);
    if (p.row_upper[i] != p.row_lower[i]) add(p.a.row(static_cast<Eigen::Index>(i)), p.row_upper[i]);
  }
  auto feasible = [&](const Eigen::VectorXd& x) {
    constexpr double tol = 1e-7;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = x(static_cast<Eigen::Index>(j));
      if (v < p.col_lower[j] - tol || v > p.col_upper[j] + tol) return false;
    }
    for (std::size_t i = 0; i < p.rows(); ++i) {
      const double v = p.a.row(static_cast<Eigen::Index>(i)).dot(x);
      if (v < p.row_lower[i] - tol || v > p.row_upper[i] + tol) return false;
    }
    return true;
  };
  std::optional<double> best;
  const auto m = planes.size();
  std::vector<std::size_t> pick(n);
  std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t depth, std::size_t start) {
    if (depth == n) {
      Eigen::MatrixXd A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      Eigen::VectorXd b(static_cast<Eigen::Index>(n));
      for (std::size_t k = 0; k < n; ++k) {
        A.row(static_cast<Eigen::Index>(k)) = planes[pick[k]];
        b(static_cast<Eigen::Index>(k)) = values[pick[k]];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      if (lu.rank() < static_cast<Eigen::Index>(n)) return;
      const Eigen::VectorXd x = lu.solve(b);
      if (!feasible(x)) return;
      double obj = 0.0;
      for (std::size_t j = 0; j < n; ++j) obj += p.cost[j] * x(static_cast<Eigen::Index>(j));
      if (!best || obj < *best) best = obj;
      return;
    }
    for (std::size_t k = start; k < m; ++k) {
      pick[depth] = k;
      choose(depth + 1, k + 1);
    }
  };
  choose(0, 0);
  return best;
}

Eigen::VectorXd injections(const Network& network, const Eigen::VectorXd& p_gen, const Eigen::VectorXd& demand) {
  Eigen::VectorXd inj = -demand;
  for (std::size_t g = 0; g < network.generator_count(); ++g) {
    inj(static_cast<Eigen::Index>(network.bus_index(network.generators()[g].bus))) += p_gen(static_cast<Eigen::Index>(g));
  }
  return inj;
}

DispatchResult full_enumeration_scopf(const Network& network, const SensitivityFactors& factors, const HourData& hour,
                                      const std::vector<double>& normal, const std::vector<double>& contingency,
                                      double penalty, const lp::Solver& solver, DispatchProblem* problem_out) {
  auto problem = make_dispatch_problem(network, hour);
  problem.penalty_price = penalty;
  add_base_rows(problem, factors, normal, false);
  const auto L = network.branch_count();
  for (std::size_t b = 0; b < L; ++b) {
    for (std::size_t c = 0; c < L; ++c) {
      if (b == c || factors.radial[c]) continue;
      problem.flow_rows.push_back(contingency_row(factors, b, c, contingency[b], true));
    }
  }
  auto result = solve_penalized_dcopf(problem, factors, solver);
  if (problem_out) *problem_out = std::move(problem);
  return result;
}

double max_n1_overload(const Network& network, const Eigen::VectorXd& injection, BusId slack,
                       const std::vector<double>& contingency_limits) {
  const auto radial = bridges(network);
  double worst = 0.0;
  for (std::size_t c = 0; c < network.branch_count(); ++c) {
    if (radial[c]) continue;
    std::vector<bool> removed(network.branch_count(), false);
    removed[c] = true;
    const auto flows = dc_flows(network, injection, slack, removed);
    for (std::size_t b = 0; b < network.branch_count(); ++b) {
      if (b == c) continue;
      worst = std::max(worst, std::abs(flows(static_cast<Eigen::Index>(b))) - contingency_limits[b]);
    }
  }
  return worst;
}

}  // namespace gridline::test
