#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "foaloc/solver.hpp"

using namespace foaloc;

namespace {

Scenario zero_error_scenario() {
    Scenario sc;
    sc.e_p_m = 0.0;
    sc.e_v_mps = 0.0;
    sc.osc_error_bound_hz = 0.0;
    sc.freq_noise_hz = 0.0;
    return sc;
}

ResidualSystem make_system(const Scenario& sc, const std::vector<std::size_t>& selection,
                           std::uint64_t seed = 1) {
    Rng rng(seed);
    const auto ms = synthesize(sc, rng);
    const auto cal = calibrate_all(ms, sc);
    return build_system(cal, selection, geodetic_to_ecef(sc.gateway), sc.f_u_hz, EarthModel{},
                        sc.method, sc.mode);
}

std::vector<std::size_t> spread_selection(std::size_t count, std::size_t available) {
    std::vector<std::size_t> sel(count);
    for (std::size_t i = 0; i < count; ++i) sel[i] = i * (available - 1) / (count - 1);
    return sel;
}

}  // namespace

TEST_CASE("residuals vanish at the true emitter when nothing is perturbed") {
    for (const Mode mode : {Mode::Gateway, Mode::Onboard}) {
        Scenario sc = zero_error_scenario();
        sc.mode = mode;
        const ResidualSystem sys = make_system(sc, spread_selection(6, sc.n_samples));
        const Vec3 u_true = geodetic_to_ecef(sc.interferer_true);
        for (const auto& obs : sys.observations) {
            CAPTURE(mode == Mode::Gateway ? "gateway" : "onboard");
            // Observables are stored as doubles near 1.1e10 Hz, so the
            // zero residual is recovered only to microhertz quantization.
            CHECK(std::abs(residual(u_true, obs, sys)) <= 5e-6);
        }
    }
}

TEST_CASE("oscillator drift shifts residuals by the carrier-ratio leak") {
    // Calibration scales the reference mismatch by f_u / f_r, but an
    // oscillator offset D enters both signals identically, so the scaled
    // correction overshoots: the residual at the truth becomes
    // -D * (1 + b) * (f_u / f_r - 1).
    Scenario sc = zero_error_scenario();
    sc.osc_error_bound_hz = 50.0;
    const ResidualSystem sys = make_system(sc, spread_selection(8, sc.n_samples), 77);
    const Vec3 u_true = geodetic_to_ecef(sc.interferer_true);
    const Vec3 gateway = geodetic_to_ecef(sc.gateway);
    for (const auto& obs : sys.observations) {
        const double drift = obs.sample.f_T_true - obs.sample.f_T_assumed;
        const Vec3 k_sg = unit_vector_between(obs.sample.pos_dl_true, gateway);
        const double b = dot(obs.sample.vel_dl_true, k_sg) / sys.earth.c_mps;
        const double predicted = -drift * (1.0 + b) * (sc.f_u_hz / sc.f_r_hz - 1.0);
        CHECK(std::abs(residual(u_true, obs, sys) - predicted) <= 2e-5);
    }
}

TEST_CASE("direction-derivative columns are orthogonal to the line of sight") {
    Scenario sc;
    const ResidualSystem sys = make_system(sc, spread_selection(6, sc.n_samples));
    const Vec3 u = geodetic_to_ecef({25.0, 10.0, 0.0});
    for (const auto& obs : sys.observations) {
        const ResidualTerms t = residual_terms(u, obs, sys);
        CHECK(norm(t.k_us) == doctest::Approx(1.0));
        // a_m = (e_m - k * k_m) / g, the m-th column of (I - kk^T) / g.
        const Vec3 col = t.a1 * t.g + t.k_us * t.k_us.x;
        CHECK(col.x == doctest::Approx(1.0));
        CHECK(std::abs(col.y) < 1e-12);
        CHECK(std::abs(col.z) < 1e-12);
        for (const Vec3& a : {t.a1, t.a2, t.a3}) {
            CHECK(std::abs(dot(a, t.k_us)) * t.g < 1e-12);
        }
    }
}

TEST_CASE("analytic jacobian rows match central finite differences") {
    Scenario sc;  // full error budget exercises eta and erroneous fields
    const ResidualSystem sys = make_system(sc, spread_selection(6, sc.n_samples), 5);
    Rng rng(42);
    const double h = 0.1;
    for (int point = 0; point < 10; ++point) {
        const double lon = uniform_symmetric(rng, 180.0);
        const double lat = std::asin(uniform_symmetric(rng, 1.0)) * 180.0 / std::numbers::pi;
        const Vec3 u = geodetic_to_ecef({lon, lat, 0.0});
        const std::vector<Vec3> analytic = jacobian_matrix(sys, u);
        double num = 0.0, den = 0.0;
        for (int axis = 0; axis < 3; ++axis) {
            Vec3 e{0.0, 0.0, 0.0};
            (axis == 0 ? e.x : axis == 1 ? e.y : e.z) = h;
            const auto plus = residual_vector(sys, u + e);
            const auto minus = residual_vector(sys, u - e);
            // Frequency rows only: the quadratic constraint row loses its
            // significant digits to cancellation at this step size.
            for (std::size_t r = 0; r < sys.rows(); ++r) {
                const double fd = (plus[r] - minus[r]) / (2.0 * h);
                const double an = axis == 0   ? analytic[r].x
                                  : axis == 1 ? analytic[r].y
                                              : analytic[r].z;
                num += (fd - an) * (fd - an);
                den += an * an;
            }
        }
        CAPTURE(lon);
        CAPTURE(lat);
        CHECK(std::sqrt(num) <= 1e-6 * std::sqrt(den));
    }
}

TEST_CASE("difference systems are literal differences of the absolute ones") {
    Scenario sc;
    sc.method = Method::Fdoa;
    const ResidualSystem fdoa = make_system(sc, spread_selection(7, sc.n_samples), 3);
    ResidualSystem foa = fdoa;
    foa.method = Method::Foa;
    CHECK(fdoa.rows() == 6);
    CHECK(foa.rows() == 7);

    const Vec3 u = geodetic_to_ecef({28.0, 17.0, 0.0});
    const auto rf = residual_vector(foa, u);
    const auto rd = residual_vector(fdoa, u);
    REQUIRE(rd.size() == 7);  // 6 difference rows + constraint
    for (std::size_t i = 0; i + 1 < rf.size() - 1; ++i)
        CHECK(rd[i] == rf[i + 1] - rf[i]);

    const auto jf = jacobian_matrix(foa, u);
    const auto jd = jacobian_matrix(fdoa, u);
    for (std::size_t i = 0; i + 1 < jf.size() - 1; ++i)
        CHECK(jd[i] == jf[i + 1] - jf[i]);
}

TEST_CASE("the stacked system ends with the scaled surface constraint") {
    Scenario sc;
    const ResidualSystem sys = make_system(sc, spread_selection(6, sc.n_samples));
    const double r = sys.earth.radius_m;
    const Vec3 u = geodetic_to_ecef({25.0, 10.0, 100e3});  // 100 km off the surface
    const auto res = residual_vector(sys, u);
    REQUIRE(res.size() == 7);
    CHECK(res.back() == doctest::Approx((norm_squared(u) - r * r) / r));
    const auto jac = jacobian_matrix(sys, u);
    CHECK(jac.back() == 2.0 / r * u);
}

TEST_CASE("random observation selections are ascending, unique and reproducible") {
    Rng a(10), b(10);
    const auto s1 = random_selection(6, 40, a);
    const auto s2 = random_selection(6, 40, b);
    CHECK(s1 == s2);
    REQUIRE(s1.size() == 6);
    for (std::size_t i = 0; i < s1.size(); ++i) {
        CHECK(s1[i] < 40);
        if (i > 0) CHECK(s1[i] > s1[i - 1]);
    }
    const auto everything = random_selection(5, 5, a);
    CHECK(everything == std::vector<std::size_t>{0, 1, 2, 3, 4});
    CHECK_THROWS_AS(random_selection(7, 6, a), std::invalid_argument);
}

TEST_CASE("system assembly validates selections") {
    Scenario sc;
    Rng rng(1);
    const auto cal = calibrate_all(synthesize(sc, rng), sc);
    const Vec3 gw = geodetic_to_ecef(sc.gateway);

    CHECK_THROWS_AS(build_system(cal, std::vector<std::size_t>{0}, gw, sc.f_u_hz, {},
                                 Method::Foa, Mode::Gateway),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_system(cal, std::vector<std::size_t>{0, 1}, gw, sc.f_u_hz, {},
                                 Method::Fdoa, Mode::Gateway),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_system(cal, std::vector<std::size_t>{3, 3}, gw, sc.f_u_hz, {},
                                 Method::Foa, Mode::Gateway),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_system(cal, std::vector<std::size_t>{5, 2}, gw, sc.f_u_hz, {},
                                 Method::Foa, Mode::Gateway),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_system(cal, std::vector<std::size_t>{0, 40}, gw, sc.f_u_hz, {},
                                 Method::Foa, Mode::Gateway),
                    std::invalid_argument);

    const ResidualSystem ok = build_system(cal, {0, 10, 39}, gw, sc.f_u_hz, {}, Method::Foa,
                                           Mode::Gateway);
    CHECK(ok.observations.size() == 3);
    CHECK(ok.observations[1].sample.pos_ul_true == cal[10].sample.pos_ul_true);
}

TEST_CASE("counted assembly draws only when it must") {
    Scenario sc;
    Rng rng(1);
    const auto cal = calibrate_all(synthesize(sc, rng), sc);
    const Vec3 gw = geodetic_to_ecef(sc.gateway);

    SUBCASE("selecting every observation leaves the engine untouched") {
        Rng a(2), b(2);
        const auto sys = build_system(cal, cal.size(), a, gw, sc.f_u_hz, {}, Method::Foa,
                                      Mode::Gateway);
        CHECK(sys.observations.size() == cal.size());
        CHECK(a() == b());
    }
    SUBCASE("difference systems take one extra observation") {
        Rng a(2);
        const auto sys = build_system(cal, 6, a, gw, sc.f_u_hz, {}, Method::Fdoa,
                                      Mode::Gateway);
        CHECK(sys.observations.size() == 7);
        CHECK(sys.rows() == 6);
    }
    SUBCASE("asking for more equations than observations fails") {
        Rng a(2);
        CHECK_THROWS_AS(build_system(cal, cal.size(), a, gw, sc.f_u_hz, {}, Method::Fdoa,
                                     Mode::Gateway),
                        std::invalid_argument);
        CHECK_THROWS_AS(build_system(cal, 1, a, gw, sc.f_u_hz, {}, Method::Foa, Mode::Gateway),
                        std::invalid_argument);
    }
}

TEST_CASE("the default start is the subsatellite point of the first observation") {
    Scenario sc;
    const ResidualSystem sys = make_system(sc, {4, 9, 14, 19, 24, 29});
    const Vec3& sat = sys.observations.front().sample.pos_ul_err;
    const Vec3 guess = initial_guess(sys);
    CHECK(guess == sat * (sys.earth.radius_m / norm(sat)));
    CHECK(norm(guess) == doctest::Approx(sys.earth.radius_m));
}

TEST_CASE("solver configuration is validated") {
    Scenario sc;
    const ResidualSystem sys = make_system(sc, spread_selection(6, sc.n_samples));
    SolverConfig cfg;
    cfg.epsilon = 0.0;
    CHECK_THROWS_AS(newton_solve(sys, cfg), std::invalid_argument);
    cfg = SolverConfig{};
    cfg.damping = 0.0;
    CHECK_THROWS_AS(newton_solve(sys, cfg), std::invalid_argument);
    cfg = SolverConfig{};
    cfg.damping = 1.5;
    CHECK_THROWS_AS(newton_solve(sys, cfg), std::invalid_argument);
    cfg = SolverConfig{};
    cfg.max_iter = 0;
    CHECK_THROWS_AS(newton_solve(sys, cfg), std::invalid_argument);
}

TEST_CASE("starting at the truth finishes immediately") {
    Scenario sc = zero_error_scenario();
    const ResidualSystem sys = make_system(sc, spread_selection(6, sc.n_samples));
    SolverConfig cfg;
    cfg.initial_guess = geodetic_to_ecef(sc.interferer_true);
    const LocationEstimate est = newton_solve(sys, cfg);
    CHECK(est.converged);
    CHECK(est.iterations <= 2);
    CHECK(norm(est.u_hat - geodetic_to_ecef(sc.interferer_true)) < 1e-2);
}

TEST_CASE("a clean system is solved to sub-meter accuracy from a coarse start") {
    for (const Method method : {Method::Foa, Method::Fdoa}) {
        Scenario sc = zero_error_scenario();
        sc.method = method;
        const std::size_t picks = method == Method::Foa ? 6 : 7;
        const ResidualSystem sys = make_system(sc, spread_selection(picks, sc.n_samples));
        SolverConfig cfg;
        cfg.initial_guess = geodetic_to_ecef({25.0, 15.0, 0.0});  // ~750 km off
        const LocationEstimate est = newton_solve(sys, cfg);
        CAPTURE(to_string(method));
        CHECK(est.converged);
        CHECK(est.iterations <= 25);
        CHECK(norm(est.u_hat - geodetic_to_ecef(sc.interferer_true)) < 1.0);
        // The estimate honors the surface constraint.
        CHECK(std::abs(norm_squared(est.u_hat) / (sys.earth.radius_m * sys.earth.radius_m) -
                       1.0) < 1e-9);
    }
}

TEST_CASE("a motionless satellite leaves the geometry singular") {
    Scenario sc = zero_error_scenario();
    Rng rng(1);
    auto ms = synthesize(sc, rng);
    for (auto& m : ms) {
        m.sample.vel_ul_true = {0.0, 0.0, 0.0};
        m.sample.vel_ul_err = {0.0, 0.0, 0.0};
    }
    const auto cal = calibrate_all(ms, sc);
    const ResidualSystem sys = build_system(cal, {0, 8, 16, 24, 32, 39},
                                            geodetic_to_ecef(sc.gateway), sc.f_u_hz, {},
                                            Method::Foa, Mode::Gateway);
    CHECK_THROWS_AS(newton_solve(sys), singular_geometry_error);
}

TEST_CASE("solving rejects systems with too few observations") {
    Scenario sc;
    ResidualSystem sys = make_system(sc, {0, 1, 2});
    sys.observations.resize(1);
    CHECK_THROWS_AS(newton_solve(sys), std::invalid_argument);
}
