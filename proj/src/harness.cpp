#include "foaloc/harness.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace foaloc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_number(std::uint64_t v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

bool satellite_visible(const Vec3& u, const ResidualSystem& sys) {
    const Vec3& s = sys.observations.front().sample.pos_ul_err;
    return dot(u, s - u) > 0.0;
}

/// Start between the subsatellite point and the gateway, on the sphere.
/// Off the track plane whenever the gateway is, which keeps the iteration
/// out of the mirror-image basin on the gateway's far side.
Vec3 biased_start(const ResidualSystem& sys) {
    const Vec3 sub = initial_guess(sys);
    const Vec3 mid = sub + sys.earth.radius_m * (sys.gateway / norm(sys.gateway));
    const double len = norm(mid);
    if (len < 1.0) return sub;  // antipodal corner case: keep the subsatellite start
    return mid * (sys.earth.radius_m / len);
}

/// Solves and applies the hemisphere policy: a converged estimate from
/// which the satellite sits below the horizon is re-solved once from the
/// antipodal start before the trial is given up as diverged.
LocationEstimate solve_with_retry(const ResidualSystem& sys) {
    SolverConfig cfg;
    cfg.initial_guess = biased_start(sys);
    LocationEstimate est;
    try {
        est = newton_solve(sys, cfg);
    } catch (const singular_geometry_error&) {
        est.u_hat = initial_guess(sys);
        est.converged = false;
        return est;
    }
    if (!est.converged || satellite_visible(est.u_hat, sys))
        return est;

    SolverConfig mirrored;
    const double len = norm(est.u_hat);
    if (len > 0.0) {
        mirrored.initial_guess = est.u_hat * (-sys.earth.radius_m / len);
        try {
            const LocationEstimate second = newton_solve(sys, mirrored);
            if (second.converged && satellite_visible(second.u_hat, sys))
                return second;
        } catch (const singular_geometry_error&) {
        }
    }
    est.converged = false;
    return est;
}

TrialOutcome finish_outcome(const LocationEstimate& est, const Vec3& u_true,
                            const EarthModel& earth) {
    TrialOutcome out;
    out.estimate = est;
    out.converged = est.converged;
    out.error_m = norm(est.u_hat - u_true);
    out.estimate_geo = norm(est.u_hat) > 0.0 ? ecef_to_geodetic(est.u_hat, earth)
                                             : GeodeticPoint{0.0, 0.0, -earth.radius_m};
    return out;
}

struct PointAccumulator {
    std::size_t total = 0;
    std::size_t converged = 0;
    double sum_sq = 0.0;

    void add(const TrialOutcome& o) {
        ++total;
        if (o.converged) {
            ++converged;
            sum_sq += o.error_m * o.error_m;
        }
    }

    void fill(RmseRow& row) const {
        row.trials_total = total;
        row.trials_converged = converged;
        if (converged > 0) {
            row.rmse_m = std::sqrt(sum_sq / static_cast<double>(converged));
            row.has_rmse = true;
        }
    }
};

RmseRow run_point(const Scenario& sc, std::size_t n_equations, std::size_t trials,
                  std::uint64_t master_seed, std::uint64_t point_index,
                  std::vector<TrialDetail>* detail) {
    PointAccumulator acc;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::uint64_t seed = derive_trial_seed(master_seed, point_index, t);
        Rng rng(seed);
        const TrialOutcome o = run_trial(sc, n_equations, rng);
        acc.add(o);
        if (detail) {
            detail->push_back({t, seed, o.estimate_geo, o.error_m, o.estimate.iterations,
                               o.converged});
        }
    }
    RmseRow row;
    row.method = sc.method;
    row.mode = sc.mode;
    acc.fill(row);
    return row;
}

}  // namespace

std::uint64_t derive_trial_seed(std::uint64_t master, std::uint64_t sweep_index,
                                std::uint64_t trial_index) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ splitmix64(sweep_index + 1));
    h = splitmix64(h ^ splitmix64(trial_index + 1));
    return h;
}

TrialOutcome run_trial(const Scenario& sc, std::size_t n_equations, Rng& rng,
                       const EarthModel& earth) {
    const Vec3 u_true = geodetic_to_ecef(sc.interferer_true, earth);
    const Vec3 gateway = geodetic_to_ecef(sc.gateway, earth);
    const std::vector<Measurement> ms = synthesize(sc, rng, earth);
    const std::vector<CalibratedObservation> obs = calibrate_all(ms, sc, earth);
    const ResidualSystem sys = build_system(obs, n_equations, rng, gateway, sc.f_u_hz, earth,
                                            sc.method, sc.mode);
    return finish_outcome(solve_with_retry(sys), u_true, earth);
}

RmseReport run_monte_carlo(const ExperimentConfig& cfg, std::vector<TrialDetail>* detail) {
    if (cfg.trials < 1)
        throw std::invalid_argument("at least one trial is required");

    RmseReport report;
    switch (cfg.sweep) {
        case SweepKind::None: {
            RmseRow row = run_point(cfg.scenario, cfg.scenario.equations, cfg.trials, cfg.seed,
                                    0, detail);
            row.sweep_param = "equations";
            row.sweep_value = static_cast<double>(cfg.scenario.equations);
            report.rows.push_back(row);
            break;
        }
        case SweepKind::EquationCount: {
            if (cfg.values.empty())
                throw std::invalid_argument("equation-count sweep needs values");
            for (std::size_t i = 0; i < cfg.values.size(); ++i) {
                const double v = cfg.values[i];
                const auto n = static_cast<std::size_t>(v);
                if (static_cast<double>(n) != v || n < 2)
                    throw std::invalid_argument("equation counts must be integers >= 2");
                RmseRow row = run_point(cfg.scenario, n, cfg.trials, cfg.seed, i, detail);
                row.sweep_param = "equations";
                row.sweep_value = v;
                report.rows.push_back(row);
            }
            break;
        }
        case SweepKind::Velocity: {
            if (cfg.values.empty())
                throw std::invalid_argument("velocity sweep needs values");
            for (std::size_t i = 0; i < cfg.values.size(); ++i) {
                Scenario sc = cfg.scenario;
                sc.speed_mps = cfg.values[i];
                RmseRow row = run_point(sc, sc.equations, cfg.trials, cfg.seed, i, detail);
                row.sweep_param = "velocity_mps";
                row.sweep_value = cfg.values[i];
                report.rows.push_back(row);
            }
            break;
        }
        case SweepKind::ErrorBounds: {
            if (cfg.error_values.empty())
                throw std::invalid_argument("error sweep needs (e_p, e_v) pairs");
            for (std::size_t i = 0; i < cfg.error_values.size(); ++i) {
                Scenario sc = cfg.scenario;
                sc.e_p_m = cfg.error_values[i].first;
                sc.e_v_mps = cfg.error_values[i].second;
                RmseRow row = run_point(sc, sc.equations, cfg.trials, cfg.seed, i, detail);
                row.sweep_param = "error_bounds";
                row.sweep_value = sc.e_p_m;
                row.sweep_value2 = sc.e_v_mps;
                row.has_value2 = true;
                report.rows.push_back(row);
            }
            break;
        }
    }
    return report;
}

RmseReport compare_methods(const ExperimentConfig& cfg) {
    RmseReport report;
    for (const Method method : {Method::Foa, Method::Fdoa}) {
        for (const Mode mode : {Mode::Gateway, Mode::Onboard}) {
            ExperimentConfig variant = cfg;
            variant.scenario.method = method;
            variant.scenario.mode = mode;
            const RmseReport part = run_monte_carlo(variant);
            report.rows.insert(report.rows.end(), part.rows.begin(), part.rows.end());
        }
    }
    return report;
}

RmseReport sensitivity_study(const ExperimentConfig& cfg) {
    const Scenario& base = cfg.scenario;

    Scenario pos_inflated = base;
    pos_inflated.e_p_m = 10.0 * base.e_p_m;
    Scenario vel_inflated = base;
    vel_inflated.e_v_mps = 10.0 * base.e_v_mps;

    RmseRow base_row = run_point(base, base.equations, cfg.trials, cfg.seed, 0, nullptr);
    RmseRow pos_row = run_point(pos_inflated, base.equations, cfg.trials, cfg.seed, 0, nullptr);
    RmseRow vel_row = run_point(vel_inflated, base.equations, cfg.trials, cfg.seed, 0, nullptr);

    RmseReport report;
    base_row.sweep_param = "position_error_m";
    base_row.sweep_value = base.e_p_m;
    report.rows.push_back(base_row);
    pos_row.sweep_param = "position_error_m";
    pos_row.sweep_value = pos_inflated.e_p_m;
    report.rows.push_back(pos_row);
    base_row.sweep_param = "velocity_error_mps";
    base_row.sweep_value = base.e_v_mps;
    report.rows.push_back(base_row);
    vel_row.sweep_param = "velocity_error_mps";
    vel_row.sweep_value = vel_inflated.e_v_mps;
    report.rows.push_back(vel_row);
    return report;
}

RefinementResult iterative_reference_refinement(const Scenario& sc,
                                                const std::vector<GeodeticPoint>& pool,
                                                std::size_t rounds, std::size_t n_equations,
                                                Rng& rng, const EarthModel& earth) {
    if (rounds == 0)
        throw std::invalid_argument("refinement needs at least one round");
    if (pool.empty())
        throw std::invalid_argument("reference pool must not be empty");

    const Vec3 u_true = geodetic_to_ecef(sc.interferer_true, earth);
    const Vec3 gateway = geodetic_to_ecef(sc.gateway, earth);
    std::vector<Measurement> ms = synthesize(sc, rng, earth);

    // The same noise realization serves every round: the additive
    // measurement noise is recovered once so the reference observable can
    // be re-synthesized against other pool transmitters.
    const auto reference_observable = [&](const GeodeticPoint& ref, const SatelliteSample& smp) {
        const Vec3 ref_ecef = geodetic_to_ecef(ref, earth);
        if (sc.mode == Mode::Gateway)
            return gateway_frequency(sc.f_r_hz, ref_ecef, smp, gateway, earth);
        return uplink_frequency(sc.f_r_hz, smp.vel_ul_true,
                                unit_vector_between(smp.pos_ul_true, ref_ecef), earth.c_mps);
    };
    std::vector<double> reference_noise(ms.size());
    for (std::size_t i = 0; i < ms.size(); ++i)
        reference_noise[i] = ms[i].f_rg - reference_observable(sc.reference, ms[i].sample);

    const std::size_t count = n_equations + (sc.method == Method::Fdoa ? 1 : 0);
    std::vector<std::size_t> selection;
    if (count == ms.size()) {
        selection.resize(count);
        for (std::size_t i = 0; i < count; ++i) selection[i] = i;
    } else {
        selection = random_selection(count, ms.size(), rng);
    }

    RefinementResult result;
    GeodeticPoint reference = sc.reference;
    for (std::size_t round = 0; round < rounds; ++round) {
        Scenario round_sc = sc;
        round_sc.reference = reference;
        if (round > 0) {
            for (std::size_t i = 0; i < ms.size(); ++i)
                ms[i].f_rg = reference_observable(reference, ms[i].sample) + reference_noise[i];
        }
        const std::vector<CalibratedObservation> obs = calibrate_all(ms, round_sc, earth);
        const ResidualSystem sys = build_system(obs, selection, gateway, sc.f_u_hz, earth,
                                                sc.method, sc.mode);
        const LocationEstimate est = solve_with_retry(sys);
        result.estimate = est;
        result.round_error_m.push_back(norm(est.u_hat - u_true));
        result.round_converged.push_back(est.converged);
        result.round_reference.push_back(reference);

        double best = std::numeric_limits<double>::infinity();
        for (const GeodeticPoint& candidate : pool) {
            const double d = norm(geodetic_to_ecef(candidate, earth) - est.u_hat);
            if (d < best) {
                best = d;
                reference = candidate;
            }
        }
    }
    return result;
}

RmseReport refinement_report(const ExperimentConfig& cfg,
                             const std::vector<GeodeticPoint>& pool, std::size_t rounds) {
    std::vector<PointAccumulator> acc(rounds);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        Rng rng(derive_trial_seed(cfg.seed, 0, t));
        const RefinementResult res = iterative_reference_refinement(
            cfg.scenario, pool, rounds, cfg.scenario.equations, rng);
        for (std::size_t r = 0; r < rounds; ++r) {
            TrialOutcome o;
            o.converged = res.round_converged[r];
            o.error_m = res.round_error_m[r];
            acc[r].add(o);
        }
    }
    RmseReport report;
    for (std::size_t r = 0; r < rounds; ++r) {
        RmseRow row;
        row.sweep_param = "round";
        row.sweep_value = static_cast<double>(r + 1);
        row.method = cfg.scenario.method;
        row.mode = cfg.scenario.mode;
        acc[r].fill(row);
        report.rows.push_back(row);
    }
    return report;
}

void write_report_csv(const RmseReport& report, std::ostream& out) {
    out << "sweep_param,sweep_value,method,mode,trials_total,trials_converged,rmse_m\n";
    for (const RmseRow& row : report.rows) {
        out << row.sweep_param << ',' << format_number(row.sweep_value);
        if (row.has_value2) out << '/' << format_number(row.sweep_value2);
        out << ',' << to_string(row.method) << ',' << to_string(row.mode) << ','
            << format_number(static_cast<std::uint64_t>(row.trials_total)) << ','
            << format_number(static_cast<std::uint64_t>(row.trials_converged)) << ',';
        if (row.has_rmse) out << format_number(row.rmse_m);
        out << '\n';
    }
}

void write_detail_csv(const std::vector<TrialDetail>& details, std::ostream& out) {
    out << "trial,seed,est_lon_deg,est_lat_deg,error_m,iterations,converged\n";
    for (const TrialDetail& d : details) {
        out << format_number(static_cast<std::uint64_t>(d.trial)) << ','
            << format_number(d.seed) << ',' << format_number(d.estimate.lon_deg) << ','
            << format_number(d.estimate.lat_deg) << ',' << format_number(d.error_m) << ','
            << format_number(static_cast<std::uint64_t>(d.iterations)) << ','
            << (d.converged ? "true" : "false") << '\n';
    }
}

}  // namespace foaloc
