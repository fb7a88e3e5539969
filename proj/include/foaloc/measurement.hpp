#pragma once

#include <vector>

#include "foaloc/geodesy.hpp"
#include "foaloc/scenario.hpp"

namespace foaloc {

/// One sampling epoch's synthesized observables together with the
/// satellite state that produced them. In gateway mode the frequencies are
/// what the gateway measures after the transparent relay; in onboard mode
/// they are the frequencies received at the satellite itself.
struct Measurement {
    double f_ug = 0.0;  // interference observable, Hz
    double f_rg = 0.0;  // reference observable, Hz
    SatelliteSample sample;
};

/// Doppler-shifted frequency received by a platform moving with velocity
/// v while the emitter is stationary: f_emit * (1 + dot(v, k) / c), where
/// k is the unit vector from the receiver toward the emitter. Throws
/// std::domain_error unless k has unit length within 1e-9.
double uplink_frequency(double f_emit, const Vec3& v, const Vec3& k, double c);

/// Down-conversion by the onboard oscillator. Throws std::domain_error
/// when the result would be non-positive.
double downconvert(double f, double f_T);

/// Frequency of an emitter's signal after the relay chain: uplink Doppler
/// shift, down-conversion by f_osc, and downlink Doppler shift toward the
/// gateway. The product form keeps the second-order cross term between the
/// two Doppler factors. Internal arithmetic runs in extended precision so
/// the sub-millihertz Doppler structure survives the 1e10 Hz carrier
/// magnitudes.
double relay_frequency(double f_emit, double f_osc, const Vec3& emitter,
                       const Vec3& pos_ul, const Vec3& vel_ul,
                       const Vec3& pos_dl, const Vec3& vel_dl,
                       const Vec3& gateway, double c);

/// Gateway-observed frequency of an emitter, computed from a sample's true
/// kinematics and true oscillator frequency.
double gateway_frequency(double f_emit, const Vec3& emitter, const SatelliteSample& s,
                         const Vec3& gateway, const EarthModel& earth = {});

/// Synthesizes the full measurement set for a scenario: builds the
/// trajectory, perturbs every sample (position, velocity, oscillator),
/// then evaluates the interference and reference observables from the true
/// fields. Gateway mode relays both signals to the gateway; onboard mode
/// records the satellite-received frequencies without down-conversion.
/// When freq_noise_hz is non-zero a uniform draw in [-bound, bound] is
/// added to each observable (two draws per sample, made even when the
/// bound is zero so draw sequences stay aligned).
std::vector<Measurement> synthesize(const Scenario& s, Rng& rng, const EarthModel& earth = {});

}  // namespace foaloc
