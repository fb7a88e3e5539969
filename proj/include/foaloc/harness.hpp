#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "foaloc/solver.hpp"

namespace foaloc {

enum class SweepKind { None, EquationCount, Velocity, ErrorBounds };

/// A Monte-Carlo study: one scenario, an optional swept parameter, and the
/// trial budget. `values` carries equation counts or velocities; error
/// sweeps use (position bound, velocity bound) pairs instead.
struct ExperimentConfig {
    Scenario scenario;
    SweepKind sweep = SweepKind::None;
    std::vector<double> values;
    std::vector<std::pair<double, double>> error_values;
    std::size_t trials = 500;
    std::uint64_t seed = 0;

    static ExperimentConfig from_scenario(const Scenario& sc) {
        ExperimentConfig cfg;
        cfg.scenario = sc;
        cfg.trials = sc.trials;
        cfg.seed = sc.seed;
        return cfg;
    }
};

/// One aggregated report row. sweep_value2 is only meaningful for error
/// sweeps, where a sweep point is an (e_p, e_v) pair. rmse_m is only
/// meaningful when has_rmse is set (at least one trial converged).
struct RmseRow {
    std::string sweep_param;
    double sweep_value = 0.0;
    double sweep_value2 = 0.0;
    bool has_value2 = false;
    Method method = Method::Foa;
    Mode mode = Mode::Gateway;
    std::size_t trials_total = 0;
    std::size_t trials_converged = 0;
    double rmse_m = 0.0;
    bool has_rmse = false;
};

struct RmseReport {
    std::vector<RmseRow> rows;
};

/// One localization attempt. error_m compares against the scenario's true
/// interferer position; diverged trials keep their last estimate so the
/// error stays reportable, but only converged trials enter RMSE figures.
struct TrialOutcome {
    LocationEstimate estimate;
    GeodeticPoint estimate_geo;
    double error_m = 0.0;
    bool converged = false;
};

/// Per-trial record for detail CSV output.
struct TrialDetail {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    GeodeticPoint estimate;
    double error_m = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Per-trial generator seed as a pure function of the master seed and the
/// trial's coordinates, so trial order and parallel execution cannot
/// change results and matched studies can share noise realizations.
std::uint64_t derive_trial_seed(std::uint64_t master, std::uint64_t sweep_index,
                                std::uint64_t trial_index);

/// Runs a single synthesize -> calibrate -> select -> solve chain.
///
/// Near-planar satellite tracks cannot distinguish an emitter from its
/// mirror image across the track plane, so the iteration is started from
/// the spherical midpoint between the subsatellite point and the gateway:
/// the gateway knows which side of the track it serves, and the start
/// biases the solver into that hemisphere's basin. An estimate that puts
/// the satellite below the local horizon is retried once from the
/// mirrored (antipodal) start; if that also fails the trial is flagged as
/// diverged. Solver errors are absorbed into the flag, never rethrown.
TrialOutcome run_trial(const Scenario& sc, std::size_t n_equations, Rng& rng,
                       const EarthModel& earth = {});

/// Monte-Carlo RMSE over the configured sweep. RMSE at each point is
/// sqrt(mean(error^2)) over converged trials; diverged trials are counted
/// in trials_total only. When `detail` is given, one record per trial is
/// appended in run order.
RmseReport run_monte_carlo(const ExperimentConfig& cfg,
                           std::vector<TrialDetail>* detail = nullptr);

/// Same sweep evaluated for every (method, mode) combination with
/// identical per-trial seeds, so rows are directly comparable.
RmseReport compare_methods(const ExperimentConfig& cfg);

/// Error-budget probe: the base scenario, then a tenfold position-error
/// inflation, then a tenfold velocity-error inflation, all with identical
/// per-trial seeds. Rows pair each inflated run with the base run under
/// sweep_param "position_error_m" and "velocity_error_mps".
RmseReport sensitivity_study(const ExperimentConfig& cfg);

/// Result of an iterative reference-selection run on one noise
/// realization. Vectors hold one entry per round; round_reference is the
/// reference transmitter the round was calibrated against.
struct RefinementResult {
    LocationEstimate estimate;
    std::vector<double> round_error_m;
    std::vector<bool> round_converged;
    std::vector<GeodeticPoint> round_reference;
};

/// Localizes `rounds` times on one fixed noise realization. The first
/// round calibrates against the scenario's reference; every later round
/// re-measures the reference signal from the pool transmitter nearest the
/// previous estimate and recalibrates. Perturbations and the observation
/// selection are drawn once, so with a single-element pool equal to the
/// scenario reference the result matches run_trial exactly. Throws
/// std::invalid_argument for zero rounds or an empty pool.
RefinementResult iterative_reference_refinement(const Scenario& sc,
                                                const std::vector<GeodeticPoint>& pool,
                                                std::size_t rounds, std::size_t n_equations,
                                                Rng& rng, const EarthModel& earth = {});

/// Monte-Carlo wrapper around the refinement: one report row per round.
RmseReport refinement_report(const ExperimentConfig& cfg,
                             const std::vector<GeodeticPoint>& pool, std::size_t rounds);

/// Writes the aggregated report as CSV with columns sweep_param,
/// sweep_value, method, mode, trials_total, trials_converged, rmse_m.
/// Numbers use shortest round-trip formatting with '.' as the decimal
/// separator; an absent RMSE is an empty cell. Output is byte-stable for
/// identical inputs.
void write_report_csv(const RmseReport& report, std::ostream& out);

/// Writes per-trial records as CSV with columns trial, seed, est_lon_deg,
/// est_lat_deg, error_m, iterations, converged.
void write_detail_csv(const std::vector<TrialDetail>& details, std::ostream& out);

}  // namespace foaloc
