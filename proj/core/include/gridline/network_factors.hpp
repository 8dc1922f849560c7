#pragma once

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "gridline/grid_model.hpp"

namespace gridline {

/// Radial test on the LODF denominator 1 - PTDF_c * m_c.
inline constexpr double kRadialTolerance = 1e-6;

/// DC sensitivities for one network and slack choice.
struct SensitivityFactors {
  Eigen::MatrixXd ptdf;     ///< branches x buses; MW of branch flow per MW injected, withdrawn at slack
  Eigen::MatrixXd lodf;     ///< branches (monitored) x branches (outaged)
  BusId slack_bus = 0;
  /// radial[c] is true when losing branch c islands the network. Columns of
  /// radial branches in `lodf` are zero apart from the -1 diagonal and must
  /// not be used.
  std::vector<bool> radial;

  std::vector<BranchId> radial_branch_ids(const Network& network) const;
};

/// Lowest-numbered bus hosting a generator, else the lowest-numbered bus.
BusId default_slack_bus(const Network& network);

/// Branch-flow sensitivities from the reduced nodal susceptance matrix.
/// Throws DomainError when the network is disconnected or the reduced matrix
/// is singular.
Eigen::MatrixXd compute_ptdf(const Network& network, BusId slack_bus);

/// LODF_{b,c} = PTDF_b m_c / (1 - PTDF_c m_c) with m_c the injection pattern
/// of branch c (+1 at from-bus, -1 at to-bus); diagonal -1.
std::pair<Eigen::MatrixXd, std::vector<bool>> compute_lodf(const Eigen::MatrixXd& ptdf, const Network& network);

SensitivityFactors compute_factors(const Network& network, std::optional<BusId> slack_bus = std::nullopt);

/// Debug dump: header `branch_id,<bus or branch ids...>` then one row per
/// monitored branch.
void write_ptdf_csv(std::ostream& out, const Network& network, const SensitivityFactors& factors);
void write_lodf_csv(std::ostream& out, const Network& network, const SensitivityFactors& factors);

}  // namespace gridline
