#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "foaloc/geodesy.hpp"

using namespace foaloc;

namespace {
constexpr double kR = 6'371'000.0;
}

TEST_CASE("vector algebra behaves componentwise") {
    const Vec3 a{1.0, -2.0, 3.0};
    const Vec3 b{4.0, 5.0, -6.0};
    CHECK(a + b == Vec3{5.0, 3.0, -3.0});
    CHECK(a - b == Vec3{-3.0, -7.0, 9.0});
    CHECK(2.0 * a == Vec3{2.0, -4.0, 6.0});
    CHECK(a * 2.0 == Vec3{2.0, -4.0, 6.0});
    CHECK(a / 2.0 == Vec3{0.5, -1.0, 1.5});
    CHECK(-a == Vec3{-1.0, 2.0, -3.0});
    CHECK(dot(a, b) == doctest::Approx(-24.0));
    CHECK(norm_squared(a) == doctest::Approx(14.0));
    CHECK(norm(a) == doctest::Approx(std::sqrt(14.0)));
}

TEST_CASE("cardinal geodetic points map to the expected axes") {
    const Vec3 origin = geodetic_to_ecef({0.0, 0.0, 0.0});
    CHECK(origin.x == doctest::Approx(kR));
    CHECK(origin.y == 0.0);  // sin(0) is exact
    CHECK(origin.z == 0.0);

    const Vec3 east = geodetic_to_ecef({90.0, 0.0, 0.0});
    CHECK(east.y == doctest::Approx(kR));
    CHECK(std::abs(east.x) < 1e-6);

    const Vec3 pole = geodetic_to_ecef({0.0, 90.0, 0.0});
    CHECK(pole.z == doctest::Approx(kR));
    CHECK(std::abs(pole.x) < 1e-6);
    CHECK(std::abs(pole.y) < 1e-6);

    const Vec3 far = geodetic_to_ecef({180.0, 0.0, 1000.0});
    CHECK(far.x == doctest::Approx(-(kR + 1000.0)));
    CHECK(std::abs(far.z) < 1e-6);
}

TEST_CASE("altitude adds radially") {
    const Vec3 v = geodetic_to_ecef({45.0, 45.0, 23'000e3});
    CHECK(norm(v) == doctest::Approx(kR + 23'000e3));
    const Vec3 surface = geodetic_to_ecef({45.0, 45.0, 0.0});
    // Same direction, different radius.
    CHECK(dot(v, surface) / (norm(v) * norm(surface)) == doctest::Approx(1.0));
}

TEST_CASE("geodetic round trip is tight across the globe") {
    for (double lon : {-179.5, -90.0, -10.0, 0.0, 30.0, 120.0, 180.0}) {
        for (double lat : {-89.0, -45.0, -5.0, 0.0, 20.0, 60.0, 89.0}) {
            for (double alt : {0.0, 1234.5, 35'786e3}) {
                const GeodeticPoint p{lon, lat, alt};
                const GeodeticPoint q = ecef_to_geodetic(geodetic_to_ecef(p));
                CAPTURE(lon);
                CAPTURE(lat);
                CAPTURE(alt);
                CHECK(q.lon_deg == doctest::Approx(lon).epsilon(1e-12));
                CHECK(q.lat_deg == doctest::Approx(lat).epsilon(1e-12));
                CHECK(q.alt_m == doctest::Approx(alt).scale(kR).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("longitude is canonicalized at the poles and the date line") {
    const GeodeticPoint north = ecef_to_geodetic({0.0, 0.0, kR});
    CHECK(north.lat_deg == doctest::Approx(90.0));
    CHECK(north.lon_deg == 0.0);

    const GeodeticPoint south = ecef_to_geodetic({0.0, 0.0, -2.0 * kR});
    CHECK(south.lat_deg == doctest::Approx(-90.0));
    CHECK(south.lon_deg == 0.0);
    CHECK(south.alt_m == doctest::Approx(kR));

    // -180 and +180 name the same meridian.  A round trip through ECEF
    // stays on it (rounding may land a hair to either side), and a point
    // exactly on the -x axis reports the canonical +180.
    const GeodeticPoint wrapped = ecef_to_geodetic(geodetic_to_ecef({-180.0, 10.0, 0.0}));
    CHECK(std::abs(wrapped.lon_deg) == doctest::Approx(180.0));
    CHECK(wrapped.lat_deg == doctest::Approx(10.0));
    const GeodeticPoint snapped = ecef_to_geodetic({-kR, -0.0, 0.0});
    CHECK(snapped.lon_deg == 180.0);
}

TEST_CASE("out-of-range geodetic inputs are rejected") {
    CHECK_THROWS_AS(geodetic_to_ecef({181.0, 0.0, 0.0}), std::domain_error);
    CHECK_THROWS_AS(geodetic_to_ecef({-181.0, 0.0, 0.0}), std::domain_error);
    CHECK_THROWS_AS(geodetic_to_ecef({0.0, 95.0, 0.0}), std::domain_error);
    CHECK_THROWS_AS(geodetic_to_ecef({0.0, -95.0, 0.0}), std::domain_error);
    CHECK_THROWS_AS(geodetic_to_ecef({0.0, 0.0, -kR - 1.0}), std::domain_error);
    CHECK_THROWS_AS(ecef_to_geodetic({0.0, 0.0, 0.0}), std::domain_error);
}

TEST_CASE("unit vectors between points have unit norm and point the right way") {
    const Vec3 from{kR, 0.0, 0.0};
    const Vec3 to{kR, 1000.0, 0.0};
    const Vec3 k = unit_vector_between(from, to);
    CHECK(norm(k) == doctest::Approx(1.0));
    CHECK(k.y == doctest::Approx(1.0));
    CHECK_THROWS_AS(unit_vector_between(from, from), std::domain_error);
}
