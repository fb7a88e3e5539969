#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "foaloc/geodesy.hpp"

namespace foaloc {

using Rng = std::mt19937_64;

enum class OrbitKind { Leo, Meo, RetroGeo, Geo };
enum class Mode { Gateway, Onboard };
enum class Method { Foa, Fdoa };

std::string to_string(OrbitKind k);
std::string to_string(Mode m);
std::string to_string(Method m);

/// One satellite state at a sampling epoch: the true kinematics used to
/// synthesize signals, and the erroneous kinematics the gateway believes.
/// Uplink fields describe the state while the interference is sampled,
/// downlink fields the state while it is forwarded to the ground.
struct SatelliteSample {
    Vec3 pos_ul_true, vel_ul_true;
    Vec3 pos_dl_true, vel_dl_true;
    Vec3 pos_ul_err, vel_ul_err;
    Vec3 pos_dl_err, vel_dl_err;
    double f_T_true = 0.0;     // oscillator frequency actually applied, Hz
    double f_T_assumed = 0.0;  // oscillator frequency the gateway assumes, Hz
};

/// Full experiment description. Defaults reproduce the MEO satellite with
/// a 30 GHz interferer, 29 GHz reference and 18 GHz down-conversion chain.
struct Scenario {
    OrbitKind orbit_kind = OrbitKind::Meo;
    double altitude_m = 23'000e3;       // orbit altitude, meters
    double speed_mps = 1544.0;          // satellite speed along the path
    std::size_t n_samples = 40;         // sampling epochs along the path
    double f_u_hz = 30e9;               // interference uplink frequency
    double f_r_hz = 29e9;               // reference uplink frequency
    double f_T_nominal_hz = 18e9;       // nominal down-conversion frequency
    double osc_error_bound_hz = 50.0;   // oscillator drift bound, Hz
    double e_p_m = 10.0;                // per-component position error bound
    double e_v_mps = 0.1;               // per-component velocity error bound
    double freq_noise_hz = 0.0;         // additive measurement noise bound
    bool split_ul_dl = false;           // draw uplink/downlink errors separately
    GeodeticPoint gateway{5.0, 14.0, 0.0};
    GeodeticPoint interferer_true{30.0, 20.0, 0.0};
    GeodeticPoint reference{20.0, 20.0, 0.0};
    Mode mode = Mode::Gateway;
    Method method = Method::Foa;
    std::size_t equations = 6;          // location equations per localization
    std::uint64_t seed = 0;
    std::size_t trials = 500;
};

/// Raised for malformed scenario files and inconsistent scenario values.
class scenario_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Uniform draw from [-bound, bound]. A zero bound returns exactly 0 and
/// still consumes one engine draw, so draw sequences stay aligned across
/// configurations that differ only in bounds.
double uniform_symmetric(Rng& rng, double bound);

/// Deterministic satellite path. LEO/MEO/RETRO_GEO scenarios sweep the
/// equator from longitude 0 to 20 degrees at fixed altitude, sampled at
/// n_samples equal steps, velocity tangent east (west for RETRO_GEO). GEO
/// scenarios distribute the samples over a 50 km circle in the tangent
/// plane above (0, 0), velocity tangent to the circle. Erroneous fields
/// start equal to the true fields and both oscillator fields equal the
/// nominal frequency.
std::vector<SatelliteSample> build_trajectory(const Scenario& s, const EarthModel& earth = {});

/// Applies per-component uniform ephemeris errors and one oscillator draw
/// to a truth sample. Draw order: position (x, y, z), velocity (x, y, z),
/// the downlink pair again when split is set, then the oscillator. With
/// split unset the uplink draws are reused for the downlink state, which
/// models a single ephemeris entry per epoch.
SatelliteSample perturb(const SatelliteSample& truth, double e_p, double e_v,
                        double osc_bound, Rng& rng, bool split = false);

/// Incremental scenario assembly from key = value assignments. Files and
/// command-line overrides share the same key vocabulary; later assignments
/// win. finalize() applies orbit-dependent defaults and validates.
class ScenarioConfig {
  public:
    /// Parses one key = value assignment. `where` prefixes error messages
    /// (for example "meo.cfg:12").
    void assign(const std::string& key, const std::string& value, const std::string& where);

    /// Parses a whole file's worth of text. Lines hold key = value pairs,
    /// '#' starts a comment, blank lines are skipped.
    static ScenarioConfig from_text(const std::string& text, const std::string& name);
    static ScenarioConfig from_file(const std::string& path);

    Scenario finalize() const;

  private:
    Scenario s_;
    bool altitude_set_ = false;
    bool speed_set_ = false;
};

/// Loads and validates a scenario file. Unspecified keys keep the defaults
/// above (per-orbit altitude and speed defaults applied last).
Scenario load_scenario(const std::string& path);

}  // namespace foaloc
