#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "gridline/time.hpp"

namespace gridline {

struct GeoCell {
  double latitude = 0.0;
  double longitude = 0.0;
};

struct WeatherSample {
  double ambient_temp_k = 0.0;
  double wind_u = 0.0;  ///< eastward, m/s
  double wind_v = 0.0;  ///< northward, m/s
  std::size_t cell_index = 0;
};

/// Hourly gridded temperature and 80 m wind. Hours span the contiguous range
/// between the first and last timestamp seen; hours with no rows are kept
/// with `present(h) == false` and are never sampled.
class WeatherGrid {
 public:
  WeatherGrid(std::vector<GeoCell> cells, HourStamp first_hour, std::vector<bool> present,
              Eigen::MatrixXd temperature_k, Eigen::MatrixXd wind_u, Eigen::MatrixXd wind_v);

  const std::vector<GeoCell>& cells() const noexcept { return cells_; }
  std::size_t cell_count() const noexcept { return cells_.size(); }
  std::size_t hour_count() const noexcept { return present_.size(); }
  HourStamp first_hour() const noexcept { return first_; }
  HourStamp last_hour() const noexcept { return HourStamp{first_.value + static_cast<std::int64_t>(present_.size()) - 1}; }
  bool covers(HourStamp hour) const noexcept { return hour >= first_hour() && hour <= last_hour(); }
  /// Throws DomainError when `hour` is outside the grid range.
  bool present(HourStamp hour) const;

  /// Cell minimising great-circle distance; ties go to the lowest index.
  std::size_t nearest_cell(double latitude, double longitude) const;

  /// Sample of `cell` at `hour`, or nullopt when the hour is missing.
  /// Throws DomainError for hours outside the grid range.
  std::optional<WeatherSample> sample_cell(HourStamp hour, std::size_t cell) const;
  std::optional<WeatherSample> sample(HourStamp hour, double latitude, double longitude) const {
    return sample_cell(hour, nearest_cell(latitude, longitude));
  }

 private:
  std::size_t row_of(HourStamp hour) const;

  std::vector<GeoCell> cells_;
  HourStamp first_;
  std::vector<bool> present_;
  Eigen::MatrixXd temperature_;  // hours x cells
  Eigen::MatrixXd wind_u_;
  Eigen::MatrixXd wind_v_;
};

/// Reads `time,lat,lon,temp_k,wind_u_ms,wind_v_ms`. Every present hour must
/// list the same cell set; cell order follows first appearance.
WeatherGrid load_weather(const std::filesystem::path& file);

}  // namespace gridline
