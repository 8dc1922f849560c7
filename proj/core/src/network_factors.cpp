#include "gridline/network_factors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>

#include <Eigen/LU>

#include "gridline/csv.hpp"
#include "gridline/error.hpp"

namespace gridline {

namespace {

bool connected(const Network& net) {
  const auto n = net.bus_count();
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& br : net.branches()) {
    const auto f = net.bus_index(br.from_bus), t = net.bus_index(br.to_bus);
    adj[f].push_back(t);
    adj[t].push_back(f);
  }
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> q;
  q.push(0);
  seen[0] = true;
  std::size_t count = 1;
  while (!q.empty()) {
    const auto u = q.front();
    q.pop();
    for (auto v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        q.push(v);
      }
    }
  }
  return count == n;
}

}  // namespace

std::vector<BranchId> SensitivityFactors::radial_branch_ids(const Network& network) const {
  std::vector<BranchId> ids;
  for (std::size_t c = 0; c < radial.size(); ++c) {
    if (radial[c]) ids.push_back(network.branches()[c].id);
  }
  return ids;
}

BusId default_slack_bus(const Network& network) {
  std::optional<BusId> best;
  for (const auto& g : network.generators()) {
    if (!best || g.bus < *best) best = g.bus;
  }
  if (best) return *best;
  BusId lowest = network.buses().front().id;
  for (const auto& b : network.buses()) lowest = std::min(lowest, b.id);
  return lowest;
}

Eigen::MatrixXd compute_ptdf(const Network& network, BusId slack_bus) {
  const auto n_bus = static_cast<Eigen::Index>(network.bus_count());
  const auto n_br = static_cast<Eigen::Index>(network.branch_count());
  const auto slack = static_cast<Eigen::Index>(network.bus_index(slack_bus));
  if (!connected(network)) throw DomainError("network is disconnected; PTDF undefined");

  // Branch-bus incidence scaled by susceptance, and the nodal B matrix.
  Eigen::MatrixXd bf = Eigen::MatrixXd::Zero(n_br, n_bus);
  Eigen::MatrixXd bbus = Eigen::MatrixXd::Zero(n_bus, n_bus);
  for (Eigen::Index k = 0; k < n_br; ++k) {
    const auto& br = network.branches()[static_cast<std::size_t>(k)];
    const auto f = static_cast<Eigen::Index>(network.bus_index(br.from_bus));
    const auto t = static_cast<Eigen::Index>(network.bus_index(br.to_bus));
    const double b = 1.0 / br.reactance_pu;
    bf(k, f) += b;
    bf(k, t) -= b;
    bbus(f, f) += b;
    bbus(t, t) += b;
    bbus(f, t) -= b;
    bbus(t, f) -= b;
  }
  if (n_bus == 1) return Eigen::MatrixXd::Zero(n_br, 1);

  // Drop the slack row/column.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n_bus; ++i) {
    if (i != slack) keep.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXd bred(m, m);
  Eigen::MatrixXd bf_red(n_br, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    bf_red.col(i) = bf.col(keep[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < m; ++j) bred(i, j) = bbus(keep[static_cast<std::size_t>(i)], keep[static_cast<std::size_t>(j)]);
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(bred);
  if (!lu.isInvertible()) throw DomainError("reduced susceptance matrix is singular");

  // PTDF_red = Bf_red * Bred^{-1}, i.e. solve Bred^T X^T = Bf_red^T.
  const Eigen::MatrixXd ptdf_red = lu.solve(bf_red.transpose()).transpose();
  Eigen::MatrixXd ptdf = Eigen::MatrixXd::Zero(n_br, n_bus);
  for (Eigen::Index i = 0; i < m; ++i) ptdf.col(keep[static_cast<std::size_t>(i)]) = ptdf_red.col(i);
  return ptdf;
}

std::pair<Eigen::MatrixXd, std::vector<bool>> compute_lodf(const Eigen::MatrixXd& ptdf, const Network& network) {
  const auto n_br = static_cast<Eigen::Index>(network.branch_count());
  if (ptdf.rows() != n_br || ptdf.cols() != static_cast<Eigen::Index>(network.bus_count())) {
    throw DomainError("PTDF dimensions do not match the network");
  }
  // ptdf_m(b, c) = PTDF_b * m_c: flow on b per unit transfer from c's from-bus to its to-bus.
  Eigen::MatrixXd ptdf_m(n_br, n_br);
  for (Eigen::Index c = 0; c < n_br; ++c) {
    const auto& br = network.branches()[static_cast<std::size_t>(c)];
    const auto f = static_cast<Eigen::Index>(network.bus_index(br.from_bus));
    const auto t = static_cast<Eigen::Index>(network.bus_index(br.to_bus));
    ptdf_m.col(c) = ptdf.col(f) - ptdf.col(t);
  }
  Eigen::MatrixXd lodf = Eigen::MatrixXd::Zero(n_br, n_br);
  std::vector<bool> radial(static_cast<std::size_t>(n_br), false);
  for (Eigen::Index c = 0; c < n_br; ++c) {
    const double denom = 1.0 - ptdf_m(c, c);
    if (std::abs(denom) < kRadialTolerance) {
      radial[static_cast<std::size_t>(c)] = true;
    } else {
      lodf.col(c) = ptdf_m.col(c) / denom;
    }
    lodf(c, c) = -1.0;
  }
  return {std::move(lodf), std::move(radial)};
}

SensitivityFactors compute_factors(const Network& network, std::optional<BusId> slack_bus) {
  SensitivityFactors f;
  f.slack_bus = slack_bus.value_or(default_slack_bus(network));
  f.ptdf = compute_ptdf(network, f.slack_bus);
  std::tie(f.lodf, f.radial) = compute_lodf(f.ptdf, network);
  return f;
}

void write_ptdf_csv(std::ostream& out, const Network& network, const SensitivityFactors& factors) {
  out << "branch_id";
  for (const auto& b : network.buses()) out << ",bus_" << b.id;
  out << '\n';
  for (Eigen::Index r = 0; r < factors.ptdf.rows(); ++r) {
    out << network.branches()[static_cast<std::size_t>(r)].id;
    for (Eigen::Index c = 0; c < factors.ptdf.cols(); ++c) out << ',' << csv::format_number(factors.ptdf(r, c));
    out << '\n';
  }
}

void write_lodf_csv(std::ostream& out, const Network& network, const SensitivityFactors& factors) {
  out << "branch_id";
  for (const auto& br : network.branches()) out << ",outage_" << br.id;
  out << '\n';
  for (Eigen::Index r = 0; r < factors.lodf.rows(); ++r) {
    out << network.branches()[static_cast<std::size_t>(r)].id;
    for (Eigen::Index c = 0; c < factors.lodf.cols(); ++c) {
      out << ',' << (factors.radial[static_cast<std::size_t>(c)] && r != c ? std::string{} : csv::format_number(factors.lodf(r, c)));
    }
    out << '\n';
  }
}

}  // namespace gridline
