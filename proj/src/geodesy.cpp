#include "foaloc/geodesy.hpp"

#include <numbers>
#include <stdexcept>

namespace foaloc {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
}  // namespace

Vec3 geodetic_to_ecef(const GeodeticPoint& p, const EarthModel& earth) {
    if (p.lon_deg < -180.0 || p.lon_deg > 180.0)
        throw std::domain_error("longitude out of range [-180, 180]");
    if (p.lat_deg < -90.0 || p.lat_deg > 90.0)
        throw std::domain_error("latitude out of range [-90, 90]");
    const double rho = earth.radius_m + p.alt_m;
    if (rho < 0.0)
        throw std::domain_error("altitude below the center of the earth");
    const double lon = p.lon_deg * kDegToRad;
    const double lat = p.lat_deg * kDegToRad;
    const double clat = std::cos(lat);
    return {rho * clat * std::cos(lon), rho * clat * std::sin(lon), rho * std::sin(lat)};
}

GeodeticPoint ecef_to_geodetic(const Vec3& v, const EarthModel& earth) {
    const double rho = norm(v);
    if (rho == 0.0)
        throw std::domain_error("zero vector has no geodetic representation");
    const double horizontal = std::hypot(v.x, v.y);
    GeodeticPoint p;
    p.lon_deg = horizontal == 0.0 ? 0.0 : std::atan2(v.y, v.x) * kRadToDeg;
    if (p.lon_deg == -180.0) p.lon_deg = 180.0;  // keep longitude in (-180, 180]
    p.lat_deg = std::atan2(v.z, horizontal) * kRadToDeg;
    p.alt_m = rho - earth.radius_m;
    return p;
}

Vec3 unit_vector_between(const Vec3& from, const Vec3& to) {
    const Vec3 d = to - from;
    const double len = norm(d);
    if (len == 0.0)
        throw std::domain_error("unit vector between coincident points is undefined");
    return d / len;
}

}  // namespace foaloc
