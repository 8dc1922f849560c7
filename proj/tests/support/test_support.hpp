#pragma once

// Independent reference implementations and small builders shared by the
// unit and acceptance tests. Nothing here calls into the code it checks
// unless the name says so.

#include <filesystem>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "gridline/dispatch.hpp"
#include "gridline/grid_model.hpp"
#include "gridline/lp.hpp"
#include "gridline/network_factors.hpp"
#include "gridline/rating.hpp"

namespace gridline::test {

std::filesystem::path fixture_dir();
std::filesystem::path fixture(const std::string& name);
std::vector<std::string> fixture_cases();

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);
std::string read_file(const std::filesystem::path& path);

// ---- builders --------------------------------------------------------------

struct LineSpec {
  BusId from;
  BusId to;
  double x;
  double rating = 100.0;
};
struct GenSpec {
  BusId bus;
  double p_max;
  double cost;
  Fuel fuel = Fuel::natural_gas;
};

/// Buses 1..n at distinct Texas coordinates, 138 kV; branches and generators
/// numbered from 1 in the order given.
Network make_network(int buses, const std::vector<LineSpec>& lines, const std::vector<GenSpec>& gens);

HourData make_hour(const Network& network, const std::vector<std::pair<BusId, double>>& loads);

// ---- DC power flow oracle --------------------------------------------------

/// Branch flows from a direct nodal solve B theta = p with theta_slack = 0,
/// skipping the branches flagged in `removed`. `injection` must sum to zero
/// over each island; the network minus `removed` must be connected.
Eigen::VectorXd dc_flows(const Network& network, const Eigen::VectorXd& injection, BusId slack,
                         const std::vector<bool>& removed = {});

/// Bridge edges of the bus-branch multigraph (Tarjan, lowlink on edge ids).
std::vector<bool> bridges(const Network& network);

// ---- scalar formula oracles -----------------------------------------------

double ref_k_angle(double phi);
double ref_eta_t(double ta_k, double tc_c, double ta_slr_c);
double ref_eta_v(double v, double phi, double d, double v_slr, double phi_slr, double rho, double mu);

/// Spherical distance by the Vincenty special case on R = 6378.137 km.
double ref_distance_km(double lat1, double lon1, double lat2, double lon2);

// ---- optimisation oracles --------------------------------------------------

/// Exhaustive vertex enumeration for min c'x over a bounded polytope with at
/// most ~5 columns. Returns nullopt when no vertex is feasible.
std::optional<double> brute_force_lp(const lp::Problem& problem);

/// SC-DCOPF with every (b, c) post-contingency row present from the start.
DispatchResult full_enumeration_scopf(const Network& network, const SensitivityFactors& factors, const HourData& hour,
                                      const std::vector<double>& normal, const std::vector<double>& contingency,
                                      double penalty, const lp::Solver& solver, DispatchProblem* problem_out = nullptr);

/// Largest post-contingency overload (MW above limit) over every non-radial
/// outage, by removing the branch and re-solving the DC flow.
double max_n1_overload(const Network& network, const Eigen::VectorXd& injection, BusId slack,
                       const std::vector<double>& contingency_limits);

Eigen::VectorXd injections(const Network& network, const Eigen::VectorXd& p_gen, const Eigen::VectorXd& demand);

}  // namespace gridline::test
