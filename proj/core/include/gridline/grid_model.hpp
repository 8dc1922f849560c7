#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "gridline/time.hpp"

namespace gridline {

using BusId = std::int64_t;
using BranchId = std::int64_t;
using GenId = std::int64_t;

enum class BranchKind { line, transformer };
enum class Fuel { solar, wind, natural_gas, coal, nuclear, hydro, other };

std::string_view to_string(BranchKind kind);
std::string_view to_string(Fuel fuel);
/// Accepts the enumerator names above (case-insensitive); also "gas"/"ng".
Fuel parse_fuel(std::string_view text);
BranchKind parse_branch_kind(std::string_view text);

struct Bus {
  BusId id = 0;
  double latitude = 0.0;   // degrees
  double longitude = 0.0;  // degrees
  double base_kv = 0.0;    // line-to-line
};

struct Branch {
  BranchId id = 0;
  BusId from_bus = 0;
  BusId to_bus = 0;
  double reactance_pu = 0.0;
  double rating_mva = 0.0;
  BranchKind kind = BranchKind::line;
  /// Always populated once inside a Network; derived from the endpoint
  /// great-circle distance when the input left it blank.
  double length_km = 0.0;
  bool length_derived = false;
  std::optional<double> diameter_m;
};

struct CostSegment {
  double capacity_mw = 0.0;
  double marginal_cost = 0.0;  // $/MWh
};

struct Generator {
  GenId id = 0;
  BusId bus = 0;
  Fuel fuel = Fuel::other;
  double p_min_mw = 0.0;
  double p_max_mw = 0.0;
  /// Convex piecewise-linear offer: marginal costs nondecreasing, capacities
  /// summing to p_max_mw.
  std::vector<CostSegment> cost_curve;

  /// Total $/h at output `p` (clamped to [0, p_max]).
  double cost_at(double p) const;
  bool is_variable_renewable() const { return fuel == Fuel::solar || fuel == Fuel::wind; }
};

/// Validated, immutable network. Construction checks every invariant of the
/// data model and derives missing branch lengths; failures raise InputError.
class Network {
 public:
  Network(std::vector<Bus> buses, std::vector<Branch> branches, std::vector<Generator> generators);

  const std::vector<Bus>& buses() const noexcept { return buses_; }
  const std::vector<Branch>& branches() const noexcept { return branches_; }
  const std::vector<Generator>& generators() const noexcept { return generators_; }

  std::size_t bus_count() const noexcept { return buses_.size(); }
  std::size_t branch_count() const noexcept { return branches_.size(); }
  std::size_t generator_count() const noexcept { return generators_.size(); }

  /// Positional index of an id; throws DomainError if unknown.
  std::size_t bus_index(BusId id) const;
  std::size_t branch_index(BranchId id) const;
  std::size_t generator_index(GenId id) const;
  std::optional<std::size_t> find_bus(BusId id) const;
  std::optional<std::size_t> find_generator(GenId id) const;

 private:
  std::vector<Bus> buses_;
  std::vector<Branch> branches_;
  std::vector<Generator> generators_;
  std::unordered_map<BusId, std::size_t> bus_pos_;
  std::unordered_map<BranchId, std::size_t> branch_pos_;
  std::unordered_map<GenId, std::size_t> gen_pos_;
};

/// Demand and availability aligned to a contiguous run of hours.
struct HourlySeries {
  std::vector<HourStamp> hours;
  Eigen::MatrixXd demand;        ///< hours x buses, MW (network bus order)
  Eigen::MatrixXd availability;  ///< hours x generators, MW upper bound

  std::optional<std::size_t> find_hour(HourStamp hour) const;
};

struct SeriesOptions {
  /// Availability above p_max is clamped instead of rejected.
  bool clamp_availability = false;
};

/// Reads bus.csv, branch.csv and gen.csv from `case_directory`.
Network load_network(const std::filesystem::path& case_directory);

/// Writes bus.csv, branch.csv and gen.csv (lengths always written).
void write_network(const Network& network, const std::filesystem::path& case_directory);

/// Reads demand.csv (required) and availability.csv (optional). Buses without
/// demand rows get zero demand; generators without availability rows get
/// their static p_max.
HourlySeries load_hourly_series(const std::filesystem::path& case_directory, const Network& network,
                                const SeriesOptions& options = {});

}  // namespace gridline
