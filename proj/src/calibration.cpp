#include "foaloc/calibration.hpp"

#include <stdexcept>

namespace foaloc {

double expected_reference_frequency(const SatelliteSample& s, const Vec3& reference,
                                    const Vec3& gateway, double f_r,
                                    const EarthModel& earth) {
    return relay_frequency(f_r, s.f_T_assumed, reference, s.pos_ul_err, s.vel_ul_err,
                           s.pos_dl_err, s.vel_dl_err, gateway, earth.c_mps);
}

double mismatch(double f_rg, double f_rg_expected, double f_u, double f_r) {
    if (f_r == 0.0)
        throw std::domain_error("reference frequency must be non-zero");
    return (f_u / f_r) * (f_rg - f_rg_expected);
}

CalibratedObservation calibrate_and_reduce(const Measurement& m, const Vec3& gateway,
                                           const Scenario& sc, const EarthModel& earth) {
    CalibratedObservation out;
    out.sample = m.sample;
    if (sc.mode == Mode::Gateway) {
        const Vec3 reference = geodetic_to_ecef(sc.reference, earth);
        const double expected = expected_reference_frequency(m.sample, reference, gateway,
                                                             sc.f_r_hz, earth);
        out.delta = mismatch(m.f_rg, expected, sc.f_u_hz, sc.f_r_hz);
        out.f_calibrated = m.f_ug - out.delta;
        const Vec3 k_down = unit_vector_between(m.sample.pos_dl_err, gateway);
        const long double down = static_cast<long double>(dot(m.sample.vel_dl_err, k_down)) /
                                 earth.c_mps;
        // The nominal down-converted carrier f_u - f_T_assumed is removed
        // both directly and through its assumed downlink Doppler shift.
        const long double carrier = static_cast<long double>(sc.f_u_hz) -
                                    static_cast<long double>(m.sample.f_T_assumed);
        out.f_reduced = static_cast<double>(static_cast<long double>(out.f_calibrated) -
                                            carrier - carrier * down);
    } else {
        const Vec3 reference = geodetic_to_ecef(sc.reference, earth);
        const double expected = uplink_frequency(
            sc.f_r_hz, m.sample.vel_ul_err,
            unit_vector_between(m.sample.pos_ul_err, reference), earth.c_mps);
        out.delta = mismatch(m.f_rg, expected, sc.f_u_hz, sc.f_r_hz);
        out.f_calibrated = m.f_ug - out.delta;
        out.f_reduced = static_cast<double>(static_cast<long double>(out.f_calibrated) -
                                            static_cast<long double>(sc.f_u_hz));
    }
    return out;
}

std::vector<CalibratedObservation> calibrate_all(const std::vector<Measurement>& ms,
                                                 const Scenario& sc, const EarthModel& earth) {
    const Vec3 gateway = geodetic_to_ecef(sc.gateway, earth);
    std::vector<CalibratedObservation> out;
    out.reserve(ms.size());
    for (const Measurement& m : ms)
        out.push_back(calibrate_and_reduce(m, gateway, sc, earth));
    return out;
}

}  // namespace foaloc
