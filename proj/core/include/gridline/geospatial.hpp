#pragma once

#include <optional>

namespace gridline::geo {

/// WGS-84 semi-major axis, metres.
inline constexpr double kSemiMajorAxis = 6378137.0;
/// WGS-84 flattening.
inline constexpr double kFlattening = 1.0 / 298.257223563;
/// UTM central scale factor.
inline constexpr double kUtmScale = 0.9996;

/// A UTM easting/northing pair in metres together with its zone.
struct PlanarPoint {
  double x = 0.0;  ///< easting
  double y = 0.0;  ///< northing
  int zone = 0;
};

/// Standard 6-degree zone containing `longitude` (no Norway/Svalbard
/// exceptions). Longitude 180 maps to zone 60.
int utm_zone(double longitude);

/// Projects onto the WGS-84 Universal Transverse Mercator grid.
///
/// Uses the Krueger series to sixth order in the third flattening, accurate
/// to well under a millimetre within a zone and still sub-metre several
/// degrees outside it. When `forced_zone` is given the point is projected
/// into that zone even if it lies elsewhere, so both ends of a branch can
/// share one plane. Southern-hemisphere northings carry the 10,000 km false
/// northing.
///
/// Throws DomainError for |latitude| >= 84 or a zone outside [1, 60].
PlanarPoint to_utm(double latitude, double longitude, std::optional<int> forced_zone = std::nullopt);

/// Bearing of the segment `from -> to` measured counter-clockwise from grid
/// east, in (-pi, pi]. Throws DomainError for coincident points or points in
/// different zones.
double conductor_angle(const PlanarPoint& from, const PlanarPoint& to);

struct Wind {
  double angle = 0.0;  ///< direction of the velocity vector, (-pi, pi]
  double speed = 0.0;  ///< m/s
};

/// Direction and speed of a horizontal wind vector with eastward component
/// `u` and northward component `v`. Throws DomainError for the zero vector;
/// callers treat that case as calm.
Wind wind_angle(double u, double v);

/// Great-circle (haversine) distance in km on a sphere of radius equal to the
/// WGS-84 semi-major axis.
double great_circle_km(double lat1, double lon1, double lat2, double lon2);

}  // namespace gridline::geo
