#include "gridline/geospatial.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "gridline/error.hpp"

namespace gridline::geo {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kFalseEasting = 500000.0;
constexpr double kFalseNorthingSouth = 10000000.0;

struct KruegerSeries {
  double rectifying_radius;  // A in Karney (2011)
  double eccentricity;
  std::array<double, 6> alpha;
};

KruegerSeries make_series() {
  const double n = kFlattening / (2.0 - kFlattening);
  const double n2 = n * n, n3 = n2 * n, n4 = n3 * n, n5 = n4 * n, n6 = n5 * n;
  KruegerSeries s{};
  s.rectifying_radius = kSemiMajorAxis / (1.0 + n) * (1.0 + n2 / 4.0 + n4 / 64.0 + n6 / 256.0);
  s.eccentricity = std::sqrt(kFlattening * (2.0 - kFlattening));
  s.alpha = {
      n / 2.0 - 2.0 * n2 / 3.0 + 5.0 * n3 / 16.0 + 41.0 * n4 / 180.0 - 127.0 * n5 / 288.0 + 7891.0 * n6 / 37800.0,
      13.0 * n2 / 48.0 - 3.0 * n3 / 5.0 + 557.0 * n4 / 1440.0 + 281.0 * n5 / 630.0 - 1983433.0 * n6 / 1935360.0,
      61.0 * n3 / 240.0 - 103.0 * n4 / 140.0 + 15061.0 * n5 / 26880.0 + 167603.0 * n6 / 181440.0,
      49561.0 * n4 / 161280.0 - 179.0 * n5 / 168.0 + 6601661.0 * n6 / 7257600.0,
      34729.0 * n5 / 80640.0 - 3418889.0 * n6 / 1995840.0,
      212378941.0 * n6 / 319334400.0,
  };
  return s;
}

// atan2 can return -pi for a negative-zero ordinate; fold it onto +pi.
double half_open_angle(double a) { return a <= -std::numbers::pi ? std::numbers::pi : a; }

const KruegerSeries& series() {
  static const KruegerSeries s = make_series();
  return s;
}

}  // namespace

int utm_zone(double longitude) {
  if (!(longitude >= -180.0 && longitude <= 180.0)) {
    throw DomainError("longitude out of range: " + std::to_string(longitude));
  }
  const int zone = static_cast<int>(std::floor((longitude + 180.0) / 6.0)) + 1;
  return zone > 60 ? 60 : zone;
}

PlanarPoint to_utm(double latitude, double longitude, std::optional<int> forced_zone) {
  if (!std::isfinite(latitude) || std::abs(latitude) >= 84.0) {
    throw DomainError("latitude outside the UTM domain: " + std::to_string(latitude));
  }
  const int zone = forced_zone ? *forced_zone : utm_zone(longitude);
  if (zone < 1 || zone > 60) throw DomainError("UTM zone out of range: " + std::to_string(zone));

  const auto& s = series();
  const double central_meridian = (6.0 * zone - 183.0) * kDeg;
  double lambda = longitude * kDeg - central_meridian;
  lambda = std::remainder(lambda, 2.0 * std::numbers::pi);
  const double phi = latitude * kDeg;

  // Conformal latitude via its tangent.
  const double sin_phi = std::sin(phi);
  const double t = std::sinh(std::atanh(sin_phi) - s.eccentricity * std::atanh(s.eccentricity * sin_phi));
  const double xi_prime = std::atan2(t, std::cos(lambda));
  const double eta_prime = std::atanh(std::sin(lambda) / std::sqrt(1.0 + t * t));

  double xi = xi_prime;
  double eta = eta_prime;
  for (int j = 1; j <= 6; ++j) {
    const double a = s.alpha[j - 1];
    xi += a * std::sin(2.0 * j * xi_prime) * std::cosh(2.0 * j * eta_prime);
    eta += a * std::cos(2.0 * j * xi_prime) * std::sinh(2.0 * j * eta_prime);
  }

  PlanarPoint p;
  p.zone = zone;
  p.x = kFalseEasting + kUtmScale * s.rectifying_radius * eta;
  p.y = kUtmScale * s.rectifying_radius * xi + (latitude < 0.0 ? kFalseNorthingSouth : 0.0);
  return p;
}

double conductor_angle(const PlanarPoint& from, const PlanarPoint& to) {
  if (from.zone != to.zone) throw DomainError("conductor_angle: endpoints projected into different zones");
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  if (dx == 0.0 && dy == 0.0) throw DomainError("conductor_angle: coincident endpoints");
  return half_open_angle(std::atan2(dy, dx));
}

Wind wind_angle(double u, double v) {
  if (u == 0.0 && v == 0.0) throw DomainError("wind_angle: zero wind vector");
  return Wind{half_open_angle(std::atan2(v, u)), std::hypot(u, v)};
}

double great_circle_km(double lat1, double lon1, double lat2, double lon2) {
  const double p1 = lat1 * kDeg, p2 = lat2 * kDeg;
  const double dp = p2 - p1;
  const double dl = (lon2 - lon1) * kDeg;
  const double h = std::sin(dp / 2) * std::sin(dp / 2) + std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
  return 2.0 * (kSemiMajorAxis / 1000.0) * std::asin(std::min(1.0, std::sqrt(h)));
}

}  // namespace gridline::geo
