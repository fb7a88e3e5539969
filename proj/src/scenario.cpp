#include "foaloc/scenario.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace foaloc {

namespace {

constexpr double kPathSpanDeg = 20.0;      // equatorial sweep, degrees of longitude
constexpr double kGeoCircleRadiusM = 50e3; // drift circle around the nominal GEO point

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& value, const std::string& where, const std::string& key) {
    double out = 0.0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc{} || res.ptr != last)
        throw scenario_error(where + ": invalid number '" + value + "' for key '" + key + "'");
    return out;
}

std::uint64_t parse_uint(const std::string& value, const std::string& where, const std::string& key) {
    std::uint64_t out = 0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc{} || res.ptr != last)
        throw scenario_error(where + ": invalid integer '" + value + "' for key '" + key + "'");
    return out;
}

GeodeticPoint parse_point(const std::string& value, const std::string& where, const std::string& key) {
    std::array<double, 3> parts{};
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
        const auto comma = value.find(',', start);
        const bool last_part = i == 2;
        if (last_part != (comma == std::string::npos))
            throw scenario_error(where + ": key '" + key + "' wants 'lon,lat,alt_m', got '" + value + "'");
        const std::string part = trim(value.substr(start, comma == std::string::npos
                                                              ? std::string::npos
                                                              : comma - start));
        parts[static_cast<std::size_t>(i)] = parse_double(part, where, key);
        start = comma + 1;
    }
    return {parts[0], parts[1], parts[2]};
}

bool parse_bool(const std::string& value, const std::string& where, const std::string& key) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw scenario_error(where + ": invalid flag '" + value + "' for key '" + key + "'");
}

void validate_point(const GeodeticPoint& p, const std::string& what) {
    try {
        geodetic_to_ecef(p);
    } catch (const std::domain_error& e) {
        throw scenario_error("invalid " + what + " position: " + e.what());
    }
}

}  // namespace

std::string to_string(OrbitKind k) {
    switch (k) {
        case OrbitKind::Leo: return "leo";
        case OrbitKind::Meo: return "meo";
        case OrbitKind::RetroGeo: return "retro_geo";
        case OrbitKind::Geo: return "geo";
    }
    return "?";
}

std::string to_string(Mode m) { return m == Mode::Gateway ? "gateway" : "onboard"; }
std::string to_string(Method m) { return m == Method::Foa ? "foa" : "fdoa"; }

double uniform_symmetric(Rng& rng, double bound) {
    const double u = std::generate_canonical<double, 53>(rng);
    return (2.0 * u - 1.0) * bound;
}

std::vector<SatelliteSample> build_trajectory(const Scenario& s, const EarthModel& earth) {
    if (s.n_samples < 2)
        throw scenario_error("trajectory needs at least 2 samples");
    if (s.altitude_m <= 0.0)
        throw scenario_error("orbit altitude must be positive");
    if (s.speed_mps <= 0.0)
        throw scenario_error("satellite speed must be positive");

    std::vector<SatelliteSample> out(s.n_samples);
    const double n = static_cast<double>(s.n_samples);

    if (s.orbit_kind == OrbitKind::Geo) {
        const Vec3 center = geodetic_to_ecef({0.0, 0.0, s.altitude_m}, earth);
        // Tangent plane at the nominal point above (0, 0) is spanned by the
        // +y and +z axes.
        for (std::size_t i = 0; i < s.n_samples; ++i) {
            const double theta = 2.0 * std::numbers::pi * static_cast<double>(i) / n;
            SatelliteSample& sm = out[i];
            sm.pos_ul_true = center + kGeoCircleRadiusM * Vec3{0.0, std::cos(theta), std::sin(theta)};
            sm.vel_ul_true = s.speed_mps * Vec3{0.0, -std::sin(theta), std::cos(theta)};
        }
    } else {
        const double direction = s.orbit_kind == OrbitKind::RetroGeo ? -1.0 : 1.0;
        for (std::size_t i = 0; i < s.n_samples; ++i) {
            const double lon_deg = kPathSpanDeg * static_cast<double>(i) / n;
            const double lon = lon_deg * std::numbers::pi / 180.0;
            SatelliteSample& sm = out[i];
            sm.pos_ul_true = geodetic_to_ecef({lon_deg, 0.0, s.altitude_m}, earth);
            sm.vel_ul_true = direction * s.speed_mps * Vec3{-std::sin(lon), std::cos(lon), 0.0};
        }
    }

    for (SatelliteSample& sm : out) {
        sm.pos_dl_true = sm.pos_ul_true;
        sm.vel_dl_true = sm.vel_ul_true;
        sm.pos_ul_err = sm.pos_ul_true;
        sm.vel_ul_err = sm.vel_ul_true;
        sm.pos_dl_err = sm.pos_dl_true;
        sm.vel_dl_err = sm.vel_dl_true;
        sm.f_T_true = s.f_T_nominal_hz;
        sm.f_T_assumed = s.f_T_nominal_hz;
    }
    return out;
}

SatelliteSample perturb(const SatelliteSample& truth, double e_p, double e_v,
                        double osc_bound, Rng& rng, bool split) {
    SatelliteSample out = truth;
    const Vec3 dp{uniform_symmetric(rng, e_p), uniform_symmetric(rng, e_p), uniform_symmetric(rng, e_p)};
    const Vec3 dv{uniform_symmetric(rng, e_v), uniform_symmetric(rng, e_v), uniform_symmetric(rng, e_v)};
    out.pos_ul_err = truth.pos_ul_true + dp;
    out.vel_ul_err = truth.vel_ul_true + dv;
    if (split) {
        const Vec3 dp2{uniform_symmetric(rng, e_p), uniform_symmetric(rng, e_p), uniform_symmetric(rng, e_p)};
        const Vec3 dv2{uniform_symmetric(rng, e_v), uniform_symmetric(rng, e_v), uniform_symmetric(rng, e_v)};
        out.pos_dl_err = truth.pos_dl_true + dp2;
        out.vel_dl_err = truth.vel_dl_true + dv2;
    } else {
        out.pos_dl_err = truth.pos_dl_true + dp;
        out.vel_dl_err = truth.vel_dl_true + dv;
    }
    out.f_T_true = truth.f_T_assumed + uniform_symmetric(rng, osc_bound);
    return out;
}

void ScenarioConfig::assign(const std::string& key, const std::string& value, const std::string& where) {
    if (key == "orbit_kind") {
        if (value == "leo") s_.orbit_kind = OrbitKind::Leo;
        else if (value == "meo") s_.orbit_kind = OrbitKind::Meo;
        else if (value == "retro_geo") s_.orbit_kind = OrbitKind::RetroGeo;
        else if (value == "geo") s_.orbit_kind = OrbitKind::Geo;
        else throw scenario_error(where + ": unknown orbit kind '" + value + "'");
    } else if (key == "altitude_km") {
        s_.altitude_m = parse_double(value, where, key) * 1e3;
        altitude_set_ = true;
    } else if (key == "speed_mps") {
        s_.speed_mps = parse_double(value, where, key);
        speed_set_ = true;
    } else if (key == "n_samples") {
        s_.n_samples = static_cast<std::size_t>(parse_uint(value, where, key));
    } else if (key == "uplink_freq_ghz") {
        s_.f_u_hz = parse_double(value, where, key) * 1e9;
    } else if (key == "reference_freq_ghz") {
        s_.f_r_hz = parse_double(value, where, key) * 1e9;
    } else if (key == "oscillator_freq_ghz") {
        s_.f_T_nominal_hz = parse_double(value, where, key) * 1e9;
    } else if (key == "oscillator_error_hz") {
        s_.osc_error_bound_hz = parse_double(value, where, key);
    } else if (key == "position_error_m") {
        s_.e_p_m = parse_double(value, where, key);
    } else if (key == "velocity_error_mps") {
        s_.e_v_mps = parse_double(value, where, key);
    } else if (key == "freq_noise_hz") {
        s_.freq_noise_hz = parse_double(value, where, key);
    } else if (key == "split_ul_dl") {
        s_.split_ul_dl = parse_bool(value, where, key);
    } else if (key == "gateway") {
        s_.gateway = parse_point(value, where, key);
    } else if (key == "reference") {
        s_.reference = parse_point(value, where, key);
    } else if (key == "interferer") {
        s_.interferer_true = parse_point(value, where, key);
    } else if (key == "mode") {
        if (value == "gateway") s_.mode = Mode::Gateway;
        else if (value == "onboard") s_.mode = Mode::Onboard;
        else throw scenario_error(where + ": unknown mode '" + value + "'");
    } else if (key == "method") {
        if (value == "foa") s_.method = Method::Foa;
        else if (value == "fdoa") s_.method = Method::Fdoa;
        else throw scenario_error(where + ": unknown method '" + value + "'");
    } else if (key == "equations") {
        s_.equations = static_cast<std::size_t>(parse_uint(value, where, key));
    } else if (key == "seed") {
        s_.seed = parse_uint(value, where, key);
    } else if (key == "trials") {
        s_.trials = static_cast<std::size_t>(parse_uint(value, where, key));
    } else {
        throw scenario_error(where + ": unknown key '" + key + "'");
    }
}

ScenarioConfig ScenarioConfig::from_text(const std::string& text, const std::string& name) {
    ScenarioConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const std::string where = name + ":" + std::to_string(line_no);
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw scenario_error(where + ": expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty() || value.empty())
            throw scenario_error(where + ": expected 'key = value'");
        cfg.assign(key, value, where);
    }
    return cfg;
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw scenario_error("cannot read scenario file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_text(buffer.str(), path);
}

Scenario ScenarioConfig::finalize() const {
    Scenario s = s_;
    const bool geo_family = s.orbit_kind == OrbitKind::Geo || s.orbit_kind == OrbitKind::RetroGeo;
    if (!altitude_set_ && geo_family) s.altitude_m = 35'786e3;
    if (!speed_set_) {
        if (s.orbit_kind == OrbitKind::Geo) s.speed_mps = 3.63;
        else if (s.orbit_kind == OrbitKind::RetroGeo)
            throw scenario_error("speed_mps is required for orbit_kind retro_geo");
    }

    if (s.n_samples < 2)
        throw scenario_error("n_samples must be at least 2");
    if (s.altitude_m <= 0.0)
        throw scenario_error("altitude_km must be positive");
    if (s.speed_mps <= 0.0)
        throw scenario_error("speed_mps must be positive");
    if (s.f_u_hz <= 0.0 || s.f_r_hz <= 0.0 || s.f_T_nominal_hz < 0.0)
        throw scenario_error("frequencies must be positive");
    if (s.f_u_hz == s.f_r_hz)
        throw scenario_error("uplink and reference frequencies must differ");
    if (s.osc_error_bound_hz < 0.0 || s.e_p_m < 0.0 || s.e_v_mps < 0.0 || s.freq_noise_hz < 0.0)
        throw scenario_error("error bounds must be non-negative");
    if (s.equations < 2)
        throw scenario_error("equations must be at least 2");
    if (s.trials < 1)
        throw scenario_error("trials must be at least 1");
    validate_point(s.gateway, "gateway");
    validate_point(s.reference, "reference");
    validate_point(s.interferer_true, "interferer");
    return s;
}

Scenario load_scenario(const std::string& path) {
    return ScenarioConfig::from_file(path).finalize();
}

}  // namespace foaloc
