#include "gridline/grid_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <string>

#include "gridline/csv.hpp"
#include "gridline/error.hpp"
#include "gridline/geospatial.hpp"

namespace gridline {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Value-level checks shared by the CSV loader (which knows file and row) and
// the Network constructor (which does not). Returns an empty string when ok.
std::string check_bus(const Bus& b) {
  if (!(std::abs(b.latitude) <= 90.0)) return "latitude out of range";
  if (!(std::abs(b.longitude) <= 180.0)) return "longitude out of range";
  if (!(b.base_kv > 0.0)) return "base_kv must be positive";
  return {};
}

std::string check_branch(const Branch& br) {
  if (br.from_bus == br.to_bus) return "from_bus equals to_bus";
  if (!(br.reactance_pu > 0.0)) return "nonpositive reactance";
  if (!(br.rating_mva > 0.0)) return "nonpositive rating";
  if (!br.length_derived && !(br.length_km >= 0.0)) return "negative length";
  if (br.diameter_m && !(*br.diameter_m > 0.0)) return "nonpositive diameter";
  return {};
}

std::string check_generator(const Generator& g) {
  if (!(g.p_min_mw >= 0.0)) return "p_min must be nonnegative";
  if (!(g.p_max_mw >= g.p_min_mw)) return "p_max below p_min";
  if (g.cost_curve.empty()) return "cost curve needs at least one segment";
  double total = 0.0;
  for (std::size_t k = 0; k < g.cost_curve.size(); ++k) {
    const auto& seg = g.cost_curve[k];
    if (!(seg.capacity_mw > 0.0)) return "segment " + std::to_string(k + 1) + " capacity must be positive";
    if (k > 0 && seg.marginal_cost < g.cost_curve[k - 1].marginal_cost) {
      return "marginal costs must be nondecreasing (segment " + std::to_string(k + 1) + ")";
    }
    total += seg.capacity_mw;
  }
  if (std::abs(total - g.p_max_mw) > 1e-6 * std::max(1.0, g.p_max_mw)) {
    return "segment capacities sum to " + csv::format_number(total) + ", expected p_max " + csv::format_number(g.p_max_mw);
  }
  return {};
}

void fill_length(Branch& br, const Bus& from, const Bus& to) {
  if (br.length_derived) {
    br.length_km = geo::great_circle_km(from.latitude, from.longitude, to.latitude, to.longitude);
  }
}

}  // namespace

std::string_view to_string(BranchKind kind) { return kind == BranchKind::line ? "line" : "transformer"; }

std::string_view to_string(Fuel fuel) {
  switch (fuel) {
    case Fuel::solar: return "solar";
    case Fuel::wind: return "wind";
    case Fuel::natural_gas: return "natural_gas";
    case Fuel::coal: return "coal";
    case Fuel::nuclear: return "nuclear";
    case Fuel::hydro: return "hydro";
    case Fuel::other: return "other";
  }
  return "other";
}

Fuel parse_fuel(std::string_view text) {
  const auto s = lower(text);
  if (s == "solar") return Fuel::solar;
  if (s == "wind") return Fuel::wind;
  if (s == "natural_gas" || s == "gas" || s == "ng") return Fuel::natural_gas;
  if (s == "coal") return Fuel::coal;
  if (s == "nuclear") return Fuel::nuclear;
  if (s == "hydro") return Fuel::hydro;
  if (s == "other") return Fuel::other;
  throw DomainError("unknown fuel '" + std::string(text) + "'");
}

BranchKind parse_branch_kind(std::string_view text) {
  const auto s = lower(text);
  if (s == "line") return BranchKind::line;
  if (s == "transformer" || s == "xfmr") return BranchKind::transformer;
  throw DomainError("unknown branch kind '" + std::string(text) + "'");
}

double Generator::cost_at(double p) const {
  double remaining = std::clamp(p, 0.0, p_max_mw);
  double cost = 0.0;
  for (const auto& seg : cost_curve) {
    const double used = std::min(remaining, seg.capacity_mw);
    cost += used * seg.marginal_cost;
    remaining -= used;
    if (remaining <= 0.0) break;
  }
  return cost;
}

Network::Network(std::vector<Bus> buses, std::vector<Branch> branches, std::vector<Generator> generators)
    : buses_(std::move(buses)), branches_(std::move(branches)), generators_(std::move(generators)) {
  const std::string src = "network";
  if (buses_.empty()) throw InputError(src, 0, "network has no buses");
  for (std::size_t i = 0; i < buses_.size(); ++i) {
    if (auto msg = check_bus(buses_[i]); !msg.empty()) {
      throw InputError(src, 0, "bus " + std::to_string(buses_[i].id) + ": " + msg);
    }
    if (!bus_pos_.emplace(buses_[i].id, i).second) {
      throw InputError(src, 0, "duplicate bus id " + std::to_string(buses_[i].id));
    }
  }
  for (std::size_t i = 0; i < branches_.size(); ++i) {
    auto& br = branches_[i];
    if (auto msg = check_branch(br); !msg.empty()) {
      throw InputError(src, 0, "branch " + std::to_string(br.id) + ": " + msg);
    }
    if (!branch_pos_.emplace(br.id, i).second) {
      throw InputError(src, 0, "duplicate branch id " + std::to_string(br.id));
    }
    const auto f = bus_pos_.find(br.from_bus);
    const auto t = bus_pos_.find(br.to_bus);
    if (f == bus_pos_.end() || t == bus_pos_.end()) {
      throw InputError(src, 0, "branch " + std::to_string(br.id) + " references an unknown bus");
    }
    fill_length(br, buses_[f->second], buses_[t->second]);
  }
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    const auto& g = generators_[i];
    if (auto msg = check_generator(g); !msg.empty()) {
      throw InputError(src, 0, "generator " + std::to_string(g.id) + ": " + msg);
    }
    if (!gen_pos_.emplace(g.id, i).second) {
      throw InputError(src, 0, "duplicate generator id " + std::to_string(g.id));
    }
    if (!bus_pos_.contains(g.bus)) {
      throw InputError(src, 0, "generator " + std::to_string(g.id) + " references an unknown bus");
    }
  }
}

std::optional<std::size_t> Network::find_bus(BusId id) const {
  if (auto it = bus_pos_.find(id); it != bus_pos_.end()) return it->second;
  return std::nullopt;
}

std::optional<std::size_t> Network::find_generator(GenId id) const {
  if (auto it = gen_pos_.find(id); it != gen_pos_.end()) return it->second;
  return std::nullopt;
}

std::size_t Network::bus_index(BusId id) const {
  if (auto i = find_bus(id)) return *i;
  throw DomainError("unknown bus id " + std::to_string(id));
}

std::size_t Network::branch_index(BranchId id) const {
  if (auto it = branch_pos_.find(id); it != branch_pos_.end()) return it->second;
  throw DomainError("unknown branch id " + std::to_string(id));
}

std::size_t Network::generator_index(GenId id) const {
  if (auto i = find_generator(id)) return *i;
  throw DomainError("unknown generator id " + std::to_string(id));
}

std::optional<std::size_t> HourlySeries::find_hour(HourStamp hour) const {
  if (hours.empty() || hour < hours.front() || hour > hours.back()) return std::nullopt;
  return static_cast<std::size_t>(hour.value - hours.front().value);
}

Network load_network(const std::filesystem::path& dir) {
  const auto bus_t = csv::Table::read(dir / "bus.csv");
  const auto br_t = csv::Table::read(dir / "branch.csv");
  const auto gen_t = csv::Table::read(dir / "gen.csv");

  std::vector<Bus> buses;
  std::set<BusId> bus_ids;
  {
    const auto c_id = bus_t.require_column("id"), c_lat = bus_t.require_column("lat"),
               c_lon = bus_t.require_column("lon"), c_kv = bus_t.require_column("base_kv");
    for (std::size_t i = 0; i < bus_t.size(); ++i) {
      Bus b{bus_t.integer(i, c_id), bus_t.number(i, c_lat), bus_t.number(i, c_lon), bus_t.number(i, c_kv)};
      if (auto msg = check_bus(b); !msg.empty()) throw InputError(bus_t.source(), bus_t.line_of(i), msg);
      if (!bus_ids.insert(b.id).second) {
        throw InputError(bus_t.source(), bus_t.line_of(i), "duplicate bus id " + std::to_string(b.id));
      }
      buses.push_back(b);
    }
  }

  std::vector<Branch> branches;
  {
    std::set<BranchId> ids;
    const auto c_id = br_t.require_column("id"), c_f = br_t.require_column("from_bus"),
               c_t = br_t.require_column("to_bus"), c_x = br_t.require_column("reactance_pu"),
               c_r = br_t.require_column("rating_mva"), c_k = br_t.require_column("kind");
    const auto c_len = br_t.column("length_km");
    const auto c_d = br_t.column("diameter_m");
    for (std::size_t i = 0; i < br_t.size(); ++i) {
      const auto line = br_t.line_of(i);
      Branch br;
      br.id = br_t.integer(i, c_id);
      br.from_bus = br_t.integer(i, c_f);
      br.to_bus = br_t.integer(i, c_t);
      br.reactance_pu = br_t.number(i, c_x);
      br.rating_mva = br_t.number(i, c_r);
      try {
        br.kind = parse_branch_kind(br_t.text(i, c_k));
      } catch (const DomainError& e) {
        throw InputError(br_t.source(), line, e.what());
      }
      const auto len = c_len ? br_t.optional_number(i, *c_len) : std::nullopt;
      br.length_derived = !len.has_value();
      br.length_km = len.value_or(0.0);
      if (c_d) br.diameter_m = br_t.optional_number(i, *c_d);
      if (!bus_ids.contains(br.from_bus) || !bus_ids.contains(br.to_bus)) {
        const auto missing = bus_ids.contains(br.from_bus) ? br.to_bus : br.from_bus;
        throw InputError(br_t.source(), line, "dangling reference to bus " + std::to_string(missing));
      }
      if (auto msg = check_branch(br); !msg.empty()) throw InputError(br_t.source(), line, msg);
      if (!ids.insert(br.id).second) throw InputError(br_t.source(), line, "duplicate branch id " + std::to_string(br.id));
      branches.push_back(br);
    }
  }

  std::vector<Generator> gens;
  {
    std::set<GenId> ids;
    const auto c_id = gen_t.require_column("id"), c_bus = gen_t.require_column("bus"),
               c_fuel = gen_t.require_column("fuel"), c_min = gen_t.require_column("p_min_mw"),
               c_max = gen_t.require_column("p_max_mw");
    std::vector<std::pair<std::size_t, std::size_t>> seg_cols;
    for (int k = 1;; ++k) {
      const auto mw = gen_t.column("seg" + std::to_string(k) + "_mw");
      const auto cost = gen_t.column("seg" + std::to_string(k) + "_cost");
      if (!mw || !cost) break;
      seg_cols.emplace_back(*mw, *cost);
    }
    if (seg_cols.empty()) throw InputError(gen_t.source(), 0, "no seg1_mw/seg1_cost columns");
    for (std::size_t i = 0; i < gen_t.size(); ++i) {
      const auto line = gen_t.line_of(i);
      Generator g;
      g.id = gen_t.integer(i, c_id);
      g.bus = gen_t.integer(i, c_bus);
      try {
        g.fuel = parse_fuel(gen_t.text(i, c_fuel));
      } catch (const DomainError& e) {
        throw InputError(gen_t.source(), line, e.what());
      }
      g.p_min_mw = gen_t.optional_number(i, c_min).value_or(0.0);
      g.p_max_mw = gen_t.number(i, c_max);
      for (const auto& [cm, cc] : seg_cols) {
        const auto mw = gen_t.optional_number(i, cm);
        const auto cost = gen_t.optional_number(i, cc);
        if (!mw && !cost) continue;
        if (!mw || !cost) throw InputError(gen_t.source(), line, "incomplete cost segment");
        g.cost_curve.push_back({*mw, *cost});
      }
      if (!bus_ids.contains(g.bus)) {
        throw InputError(gen_t.source(), line, "dangling reference to bus " + std::to_string(g.bus));
      }
      if (auto msg = check_generator(g); !msg.empty()) throw InputError(gen_t.source(), line, msg);
      if (!ids.insert(g.id).second) throw InputError(gen_t.source(), line, "duplicate generator id " + std::to_string(g.id));
      gens.push_back(std::move(g));
    }
  }

  return Network(std::move(buses), std::move(branches), std::move(gens));
}

void write_network(const Network& network, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw InputError((dir / name).string(), 0, "cannot open for writing");
    return out;
  };
  using csv::format_number;
  {
    auto out = open("bus.csv");
    out << "id,lat,lon,base_kv\n";
    for (const auto& b : network.buses()) {
      out << b.id << ',' << format_number(b.latitude) << ',' << format_number(b.longitude) << ','
          << format_number(b.base_kv) << '\n';
    }
  }
  {
    auto out = open("branch.csv");
    out << "id,from_bus,to_bus,reactance_pu,rating_mva,kind,length_km,diameter_m\n";
    for (const auto& br : network.branches()) {
      out << br.id << ',' << br.from_bus << ',' << br.to_bus << ',' << format_number(br.reactance_pu) << ','
          << format_number(br.rating_mva) << ',' << to_string(br.kind) << ',' << format_number(br.length_km) << ','
          << (br.diameter_m ? format_number(*br.diameter_m) : std::string{}) << '\n';
    }
  }
  {
    std::size_t max_segments = 1;
    for (const auto& g : network.generators()) max_segments = std::max(max_segments, g.cost_curve.size());
    auto out = open("gen.csv");
    out << "id,bus,fuel,p_min_mw,p_max_mw";
    for (std::size_t k = 1; k <= max_segments; ++k) out << ",seg" << k << "_mw,seg" << k << "_cost";
    out << '\n';
    for (const auto& g : network.generators()) {
      out << g.id << ',' << g.bus << ',' << to_string(g.fuel) << ',' << format_number(g.p_min_mw) << ','
          << format_number(g.p_max_mw);
      for (std::size_t k = 0; k < max_segments; ++k) {
        if (k < g.cost_curve.size()) {
          out << ',' << format_number(g.cost_curve[k].capacity_mw) << ',' << format_number(g.cost_curve[k].marginal_cost);
        } else {
          out << ",,";
        }
      }
      out << '\n';
    }
  }
}

namespace {

// Collects (hour, entity index, value) triples from a time,id,mw table and
// checks per-row validity. Entity lookup returns nullopt for unknown ids.
struct SeriesRows {
  std::map<std::pair<std::int64_t, std::size_t>, std::pair<double, std::size_t>> values;  // -> (mw, line)
  std::set<std::int64_t> hours;
  std::map<std::size_t, std::set<std::int64_t>> hours_by_entity;
};

template <typename Lookup>
SeriesRows read_series(const csv::Table& t, const char* id_column, const char* entity, Lookup lookup) {
  SeriesRows rows;
  const auto c_time = t.require_column("time"), c_id = t.require_column(id_column), c_mw = t.require_column("mw");
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto line = t.line_of(i);
    HourStamp hour;
    try {
      hour = parse_hour(t.text(i, c_time));
    } catch (const DomainError& e) {
      throw InputError(t.source(), line, e.what());
    }
    const auto id = t.integer(i, c_id);
    const auto idx = lookup(id);
    if (!idx) throw InputError(t.source(), line, "unknown " + std::string(entity) + " id " + std::to_string(id));
    const double mw = t.number(i, c_mw);
    if (mw < 0.0) throw InputError(t.source(), line, "negative value");
    if (!rows.values.emplace(std::pair{hour.value, *idx}, std::pair{mw, line}).second) {
      throw InputError(t.source(), line, "duplicate row for " + std::string(entity) + " " + std::to_string(id));
    }
    rows.hours.insert(hour.value);
    rows.hours_by_entity[*idx].insert(hour.value);
  }
  return rows;
}

}  // namespace

HourlySeries load_hourly_series(const std::filesystem::path& dir, const Network& network, const SeriesOptions& options) {
  const auto demand_t = csv::Table::read(dir / "demand.csv");
  const auto demand_rows =
      read_series(demand_t, "bus_id", "bus", [&](std::int64_t id) { return network.find_bus(id); });
  if (demand_rows.hours.empty()) throw InputError(demand_t.source(), 0, "no demand rows");

  const std::int64_t first = *demand_rows.hours.begin();
  const std::int64_t last = *demand_rows.hours.rbegin();
  if (static_cast<std::int64_t>(demand_rows.hours.size()) != last - first + 1) {
    std::int64_t expected = first;
    for (auto h : demand_rows.hours) {
      if (h != expected) break;
      ++expected;
    }
    throw InputError(demand_t.source(), 0, "hours are not contiguous: missing " + format_hour(HourStamp{expected}));
  }
  for (const auto& [bus, hs] : demand_rows.hours_by_entity) {
    if (hs.size() != demand_rows.hours.size()) {
      throw InputError(demand_t.source(), 0,
                       "bus " + std::to_string(network.buses()[bus].id) + " does not cover every hour");
    }
  }

  HourlySeries series;
  const auto n_hours = static_cast<std::size_t>(last - first + 1);
  for (std::int64_t h = first; h <= last; ++h) series.hours.push_back(HourStamp{h});
  series.demand = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_hours), static_cast<Eigen::Index>(network.bus_count()));
  for (const auto& [key, value] : demand_rows.values) {
    series.demand(key.first - first, static_cast<Eigen::Index>(key.second)) = value.first;
  }

  series.availability.resize(static_cast<Eigen::Index>(n_hours), static_cast<Eigen::Index>(network.generator_count()));
  for (std::size_t g = 0; g < network.generator_count(); ++g) {
    series.availability.col(static_cast<Eigen::Index>(g)).setConstant(network.generators()[g].p_max_mw);
  }

  const auto avail_path = dir / "availability.csv";
  if (std::filesystem::exists(avail_path)) {
    const auto avail_t = csv::Table::read(avail_path);
    const auto avail_rows =
        read_series(avail_t, "gen_id", "generator", [&](std::int64_t id) { return network.find_generator(id); });
    for (const auto& [g, hs] : avail_rows.hours_by_entity) {
      if (hs.size() != n_hours || *hs.begin() != first || *hs.rbegin() != last) {
        throw InputError(avail_t.source(), 0,
                         "generator " + std::to_string(network.generators()[g].id) +
                             " availability does not cover exactly the demand hours");
      }
    }
    for (const auto& [key, entry] : avail_rows.values) {
      const auto& gen = network.generators()[key.second];
      const auto [mw, line] = entry;
      double value = mw;
      if (value > gen.p_max_mw + 1e-9) {
        if (!options.clamp_availability) {
          throw InputError(avail_t.source(), line,
                           "availability " + csv::format_number(mw) + " exceeds p_max " +
                               csv::format_number(gen.p_max_mw) + " for generator " + std::to_string(gen.id) + " at " +
                               format_hour(HourStamp{key.first}));
        }
        value = gen.p_max_mw;
      }
      series.availability(key.first - first, static_cast<Eigen::Index>(key.second)) = std::min(value, gen.p_max_mw);
    }
  }
  return series;
}

}  // namespace gridline
