#pragma once

#include <vector>

#include "foaloc/measurement.hpp"

namespace foaloc {

/// A measurement after reference calibration. delta is the scaled
/// reference mismatch, f_calibrated the corrected interference observable
/// and f_reduced the part of it explained only by the unknown emitter
/// position (nominal carrier, assumed oscillator and assumed downlink
/// Doppler already removed).
struct CalibratedObservation {
    double delta = 0.0;
    double f_calibrated = 0.0;
    double f_reduced = 0.0;
    SatelliteSample sample;
};

/// Reference observable the gateway predicts from its own (erroneous)
/// knowledge: erroneous satellite kinematics and the assumed oscillator
/// frequency, with the reference transmitter position known exactly.
double expected_reference_frequency(const SatelliteSample& s, const Vec3& reference,
                                    const Vec3& gateway, double f_r,
                                    const EarthModel& earth = {});

/// Reference mismatch scaled from the reference to the interference
/// carrier: (f_u / f_r) * (f_rg - f_rg_expected). Throws std::domain_error
/// when f_r is zero.
double mismatch(double f_rg, double f_rg_expected, double f_u, double f_r);

/// Calibrates one measurement against the reference signal and reduces it
/// to the emitter-position-dependent part. Gateway mode removes the
/// nominal down-converted carrier and the assumed downlink Doppler term;
/// onboard mode predicts the reference at the satellite and removes only
/// the carrier.
CalibratedObservation calibrate_and_reduce(const Measurement& m, const Vec3& gateway,
                                           const Scenario& sc, const EarthModel& earth = {});

/// Calibrates a whole synthesized set.
std::vector<CalibratedObservation> calibrate_all(const std::vector<Measurement>& ms,
                                                 const Scenario& sc,
                                                 const EarthModel& earth = {});

}  // namespace foaloc
