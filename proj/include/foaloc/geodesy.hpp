#pragma once

#include <cmath>

namespace foaloc {

/// Cartesian vector in the earth-centered frame. Meters for positions,
/// meters per second for velocities.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
inline Vec3 operator*(const Vec3& v, double s) { return s * v; }
inline Vec3 operator/(const Vec3& v, double s) { return {v.x / s, v.y / s, v.z / s}; }
inline Vec3 operator-(const Vec3& v) { return {-v.x, -v.y, -v.z}; }
inline bool operator==(const Vec3& a, const Vec3& b) { return a.x == b.x && a.y == b.y && a.z == b.z; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm_squared(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(norm_squared(v)); }

/// Geographic position on or above the sphere.
struct GeodeticPoint {
    double lon_deg = 0.0;  // longitude, degrees, [-180, 180]
    double lat_deg = 0.0;  // latitude, degrees, [-90, 90]
    double alt_m = 0.0;    // altitude above the sphere, meters
};

/// Spherical earth plus signal propagation speed.
struct EarthModel {
    double radius_m = 6'371'000.0;
    double c_mps = 299'792'458.0;
};

/// Converts a geodetic point to earth-centered Cartesian coordinates.
/// The result has norm radius + alt. Throws std::domain_error when the
/// angles are outside their ranges or the altitude is below -radius.
Vec3 geodetic_to_ecef(const GeodeticPoint& p, const EarthModel& earth = {});

/// Inverse of geodetic_to_ecef. Longitude is reported in (-180, 180] and
/// canonicalized to 0 at the poles. Throws std::domain_error for the zero
/// vector.
GeodeticPoint ecef_to_geodetic(const Vec3& v, const EarthModel& earth = {});

/// Unit vector pointing from `from` toward `to`. Throws std::domain_error
/// when the points coincide.
Vec3 unit_vector_between(const Vec3& from, const Vec3& to);

}  // namespace foaloc
