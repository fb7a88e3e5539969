#include "foaloc/measurement.hpp"

#include <cmath>
#include <stdexcept>

namespace foaloc {

double uplink_frequency(double f_emit, const Vec3& v, const Vec3& k, double c) {
    if (std::abs(norm(k) - 1.0) > 1e-9)
        throw std::domain_error("direction vector must have unit length");
    const long double shift = static_cast<long double>(dot(v, k)) / c;
    return static_cast<double>(f_emit * (1.0L + shift));
}

double downconvert(double f, double f_T) {
    const double out = f - f_T;
    if (out <= 0.0)
        throw std::domain_error("down-converted frequency must stay positive");
    return out;
}

double relay_frequency(double f_emit, double f_osc, const Vec3& emitter,
                       const Vec3& pos_ul, const Vec3& vel_ul,
                       const Vec3& pos_dl, const Vec3& vel_dl,
                       const Vec3& gateway, double c) {
    const Vec3 k_up = unit_vector_between(pos_ul, emitter);
    const Vec3 k_down = unit_vector_between(pos_dl, gateway);
    const long double up = static_cast<long double>(dot(vel_ul, k_up)) / c;
    const long double down = static_cast<long double>(dot(vel_dl, k_down)) / c;
    const long double at_satellite =
        static_cast<long double>(f_emit) * (1.0L + up) - static_cast<long double>(f_osc);
    if (at_satellite <= 0.0L)
        throw std::domain_error("down-converted frequency must stay positive");
    return static_cast<double>(at_satellite * (1.0L + down));
}

double gateway_frequency(double f_emit, const Vec3& emitter, const SatelliteSample& s,
                         const Vec3& gateway, const EarthModel& earth) {
    return relay_frequency(f_emit, s.f_T_true, emitter, s.pos_ul_true, s.vel_ul_true,
                           s.pos_dl_true, s.vel_dl_true, gateway, earth.c_mps);
}

std::vector<Measurement> synthesize(const Scenario& s, Rng& rng, const EarthModel& earth) {
    const Vec3 interferer = geodetic_to_ecef(s.interferer_true, earth);
    const Vec3 reference = geodetic_to_ecef(s.reference, earth);
    const Vec3 gateway = geodetic_to_ecef(s.gateway, earth);

    std::vector<Measurement> out;
    out.reserve(s.n_samples);
    for (const SatelliteSample& truth : build_trajectory(s, earth)) {
        Measurement m;
        m.sample = perturb(truth, s.e_p_m, s.e_v_mps, s.osc_error_bound_hz, rng, s.split_ul_dl);
        if (s.mode == Mode::Gateway) {
            m.f_ug = gateway_frequency(s.f_u_hz, interferer, m.sample, gateway, earth);
            m.f_rg = gateway_frequency(s.f_r_hz, reference, m.sample, gateway, earth);
        } else {
            m.f_ug = uplink_frequency(s.f_u_hz, m.sample.vel_ul_true,
                                      unit_vector_between(m.sample.pos_ul_true, interferer),
                                      earth.c_mps);
            m.f_rg = uplink_frequency(s.f_r_hz, m.sample.vel_ul_true,
                                      unit_vector_between(m.sample.pos_ul_true, reference),
                                      earth.c_mps);
        }
        m.f_ug += uniform_symmetric(rng, s.freq_noise_hz);
        m.f_rg += uniform_symmetric(rng, s.freq_noise_hz);
        out.push_back(m);
    }
    return out;
}

}  // namespace foaloc
