#include "gridline/weather.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "gridline/csv.hpp"
#include "gridline/error.hpp"
#include "gridline/geospatial.hpp"

namespace gridline {

WeatherGrid::WeatherGrid(std::vector<GeoCell> cells, HourStamp first_hour, std::vector<bool> present,
                         Eigen::MatrixXd temperature_k, Eigen::MatrixXd wind_u, Eigen::MatrixXd wind_v)
    : cells_(std::move(cells)),
      first_(first_hour),
      present_(std::move(present)),
      temperature_(std::move(temperature_k)),
      wind_u_(std::move(wind_u)),
      wind_v_(std::move(wind_v)) {
  if (cells_.empty()) throw DomainError("weather grid has no cells");
  if (present_.empty()) throw DomainError("weather grid has no hours");
  const auto rows = static_cast<Eigen::Index>(present_.size());
  const auto cols = static_cast<Eigen::Index>(cells_.size());
  for (const auto* m : {&temperature_, &wind_u_, &wind_v_}) {
    if (m->rows() != rows || m->cols() != cols) throw DomainError("weather arrays are not dimension-consistent");
  }
  for (Eigen::Index h = 0; h < rows; ++h) {
    if (!present_[static_cast<std::size_t>(h)]) continue;
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!(temperature_(h, c) > 150.0) || !std::isfinite(temperature_(h, c)) || !std::isfinite(wind_u_(h, c)) ||
          !std::isfinite(wind_v_(h, c))) {
        throw DomainError("weather value out of range at " + format_hour(HourStamp{first_.value + h}));
      }
    }
  }
}

std::size_t WeatherGrid::row_of(HourStamp hour) const {
  if (!covers(hour)) {
    throw DomainError("hour " + format_hour(hour) + " outside weather range " + format_hour(first_hour()) + ".." +
                      format_hour(last_hour()));
  }
  return static_cast<std::size_t>(hour.value - first_.value);
}

bool WeatherGrid::present(HourStamp hour) const { return present_[row_of(hour)]; }

std::size_t WeatherGrid::nearest_cell(double latitude, double longitude) const {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const double d = geo::great_circle_km(latitude, longitude, cells_[i].latitude, cells_[i].longitude);
    // Distances within a micrometre count as ties so round-off cannot
    // override the lowest-index rule.
    if (d < best_d - 1e-9) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

std::optional<WeatherSample> WeatherGrid::sample_cell(HourStamp hour, std::size_t cell) const {
  const auto h = row_of(hour);
  if (!present_[h]) return std::nullopt;
  const auto r = static_cast<Eigen::Index>(h);
  const auto c = static_cast<Eigen::Index>(cell);
  return WeatherSample{temperature_(r, c), wind_u_(r, c), wind_v_(r, c), cell};
}

WeatherGrid load_weather(const std::filesystem::path& file) {
  const auto t = csv::Table::read(file);
  const auto c_time = t.require_column("time"), c_lat = t.require_column("lat"), c_lon = t.require_column("lon"),
             c_t = t.require_column("temp_k"), c_u = t.require_column("wind_u_ms"), c_v = t.require_column("wind_v_ms");
  if (t.size() == 0) throw InputError(t.source(), 0, "no weather rows");

  struct Row {
    double temp, u, v;
    std::size_t line;
  };
  std::vector<GeoCell> cells;
  std::map<std::pair<double, double>, std::size_t> cell_pos;
  std::map<std::int64_t, std::map<std::size_t, Row>> by_hour;

  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto line = t.line_of(i);
    HourStamp hour;
    try {
      hour = parse_hour(t.text(i, c_time));
    } catch (const DomainError& e) {
      throw InputError(t.source(), line, e.what());
    }
    const double lat = t.number(i, c_lat), lon = t.number(i, c_lon);
    auto [it, inserted] = cell_pos.emplace(std::pair{lat, lon}, cells.size());
    if (inserted) cells.push_back({lat, lon});
    const Row row{t.number(i, c_t), t.number(i, c_u), t.number(i, c_v), line};
    if (!(row.temp > 150.0)) throw InputError(t.source(), line, "temperature must exceed 150 K");
    if (!by_hour[hour.value].emplace(it->second, row).second) {
      throw InputError(t.source(), line, "duplicate row for this hour and cell");
    }
  }

  for (const auto& [hour, rows] : by_hour) {
    if (rows.size() != cells.size()) {
      throw InputError(t.source(), 0,
                       "inconsistent cell set at " + format_hour(HourStamp{hour}) + ": " + std::to_string(rows.size()) +
                           " of " + std::to_string(cells.size()) + " cells");
    }
  }

  const std::int64_t first = by_hour.begin()->first;
  const std::int64_t last = by_hour.rbegin()->first;
  const auto n_hours = static_cast<Eigen::Index>(last - first + 1);
  const auto n_cells = static_cast<Eigen::Index>(cells.size());
  Eigen::MatrixXd temp = Eigen::MatrixXd::Zero(n_hours, n_cells);
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n_hours, n_cells);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n_hours, n_cells);
  std::vector<bool> present(static_cast<std::size_t>(n_hours), false);
  for (const auto& [hour, rows] : by_hour) {
    const auto h = static_cast<Eigen::Index>(hour - first);
    present[static_cast<std::size_t>(h)] = true;
    for (const auto& [c, row] : rows) {
      const auto ci = static_cast<Eigen::Index>(c);
      temp(h, ci) = row.temp;
      u(h, ci) = row.u;
      v(h, ci) = row.v;
    }
  }
  return WeatherGrid(std::move(cells), HourStamp{first}, std::move(present), std::move(temp), std::move(u), std::move(v));
}

}  // namespace gridline
