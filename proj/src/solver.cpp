#include "foaloc/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>
#include <string>

namespace foaloc {

namespace {

double row_norm(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

}  // namespace

ResidualTerms residual_terms(const Vec3& u, const CalibratedObservation& obs,
                             const ResidualSystem& sys) {
    ResidualTerms t;
    const Vec3 d = u - obs.sample.pos_ul_err;
    t.g = norm(d);
    if (t.g == 0.0)
        throw std::domain_error("candidate position coincides with the satellite");
    t.k_us = d / t.g;
    t.k_sg = unit_vector_between(obs.sample.pos_dl_err, sys.gateway);
    t.eta = sys.mode == Mode::Gateway
                ? 1.0 + dot(obs.sample.vel_dl_err, t.k_sg) / sys.earth.c_mps
                : 1.0;
    const Vec3& k = t.k_us;
    t.a1 = {(1.0 - k.x * k.x) / t.g, -k.x * k.y / t.g, -k.x * k.z / t.g};
    t.a2 = {-k.y * k.x / t.g, (1.0 - k.y * k.y) / t.g, -k.y * k.z / t.g};
    t.a3 = {-k.z * k.x / t.g, -k.z * k.y / t.g, (1.0 - k.z * k.z) / t.g};
    return t;
}

double residual(const Vec3& u, const CalibratedObservation& obs, const ResidualSystem& sys) {
    const ResidualTerms t = residual_terms(u, obs, sys);
    const long double radial = static_cast<long double>(dot(obs.sample.vel_ul_err, t.k_us)) /
                               sys.earth.c_mps;
    return static_cast<double>(static_cast<long double>(sys.f_u) * radial * t.eta -
                               static_cast<long double>(obs.f_reduced));
}

Vec3 jacobian_row(const Vec3& u, const CalibratedObservation& obs, const ResidualSystem& sys) {
    const ResidualTerms t = residual_terms(u, obs, sys);
    const double scale = sys.f_u / sys.earth.c_mps * t.eta;
    const Vec3& v = obs.sample.vel_ul_err;
    return {scale * dot(v, t.a1), scale * dot(v, t.a2), scale * dot(v, t.a3)};
}

std::vector<double> residual_vector(const ResidualSystem& sys, const Vec3& u) {
    std::vector<double> rows;
    rows.reserve(sys.rows() + 1);
    if (sys.method == Method::Foa) {
        for (const CalibratedObservation& obs : sys.observations)
            rows.push_back(residual(u, obs, sys));
    } else {
        std::vector<double> foa;
        foa.reserve(sys.observations.size());
        for (const CalibratedObservation& obs : sys.observations)
            foa.push_back(residual(u, obs, sys));
        for (std::size_t i = 0; i + 1 < foa.size(); ++i)
            rows.push_back(foa[i + 1] - foa[i]);
    }
    const double r = sys.earth.radius_m;
    rows.push_back((norm_squared(u) - r * r) / r);
    return rows;
}

std::vector<Vec3> jacobian_matrix(const ResidualSystem& sys, const Vec3& u) {
    std::vector<Vec3> rows;
    rows.reserve(sys.rows() + 1);
    if (sys.method == Method::Foa) {
        for (const CalibratedObservation& obs : sys.observations)
            rows.push_back(jacobian_row(u, obs, sys));
    } else {
        std::vector<Vec3> foa;
        foa.reserve(sys.observations.size());
        for (const CalibratedObservation& obs : sys.observations)
            foa.push_back(jacobian_row(u, obs, sys));
        for (std::size_t i = 0; i + 1 < foa.size(); ++i)
            rows.push_back(foa[i + 1] - foa[i]);
    }
    const double r = sys.earth.radius_m;
    rows.push_back(2.0 / r * u);
    return rows;
}

std::vector<std::size_t> random_selection(std::size_t count, std::size_t available, Rng& rng) {
    if (count > available)
        throw std::invalid_argument("cannot select " + std::to_string(count) + " of " +
                                    std::to_string(available) + " observations");
    std::vector<std::size_t> indices(available);
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    std::vector<std::size_t> out;
    out.reserve(count);
    std::sample(indices.begin(), indices.end(), std::back_inserter(out), count, rng);
    return out;
}

ResidualSystem build_system(const std::vector<CalibratedObservation>& all,
                            const std::vector<std::size_t>& selection, const Vec3& gateway,
                            double f_u, const EarthModel& earth, Method method, Mode mode) {
    const std::size_t min_obs = method == Method::Foa ? 2 : 3;
    if (selection.size() < min_obs)
        throw std::invalid_argument("system needs at least 2 equations");
    ResidualSystem sys;
    sys.gateway = gateway;
    sys.f_u = f_u;
    sys.earth = earth;
    sys.method = method;
    sys.mode = mode;
    sys.observations.reserve(selection.size());
    for (std::size_t i = 0; i < selection.size(); ++i) {
        const std::size_t idx = selection[i];
        if (idx >= all.size())
            throw std::invalid_argument("selection index " + std::to_string(idx) +
                                        " out of range");
        if (i > 0 && selection[i] <= selection[i - 1])
            throw std::invalid_argument("selection must be strictly increasing");
        sys.observations.push_back(all[idx]);
    }
    return sys;
}

ResidualSystem build_system(const std::vector<CalibratedObservation>& all,
                            std::size_t n_equations, Rng& rng, const Vec3& gateway,
                            double f_u, const EarthModel& earth, Method method, Mode mode) {
    if (n_equations < 2)
        throw std::invalid_argument("system needs at least 2 equations");
    const std::size_t count = n_equations + (method == Method::Fdoa ? 1 : 0);
    if (count > all.size())
        throw std::invalid_argument("cannot build " + std::to_string(n_equations) + " " +
                                    to_string(method) + " equations from " +
                                    std::to_string(all.size()) + " observations");
    std::vector<std::size_t> selection;
    if (count == all.size()) {
        selection.resize(count);
        std::iota(selection.begin(), selection.end(), std::size_t{0});
    } else {
        selection = random_selection(count, all.size(), rng);
    }
    return build_system(all, selection, gateway, f_u, earth, method, mode);
}

Vec3 initial_guess(const ResidualSystem& sys) {
    if (sys.observations.empty())
        throw std::invalid_argument("cannot guess from an empty system");
    const Vec3& s = sys.observations.front().sample.pos_ul_err;
    const double len = norm(s);
    if (len == 0.0)
        throw std::invalid_argument("satellite position at the earth center");
    return s * (sys.earth.radius_m / len);
}

LocationEstimate newton_solve(const ResidualSystem& sys, const SolverConfig& cfg) {
    if (sys.observations.size() < 2 || sys.rows() < 2)
        throw std::invalid_argument("system needs at least 2 equations");
    if (!(cfg.epsilon > 0.0))
        throw std::invalid_argument("epsilon must be positive");
    if (!(cfg.damping > 0.0) || cfg.damping > 1.0)
        throw std::invalid_argument("damping must be in (0, 1]");
    if (cfg.max_iter == 0)
        throw std::invalid_argument("max_iter must be at least 1");

    constexpr double kDampingFloor = 0x1p-10;
    // The Doppler surfaces are only locally linear: a far start can make
    // the raw least-squares step span thousands of kilometers, where the
    // line search would crawl with microscopic step fractions. The step is
    // therefore capped to a trust length that doubles after clean full
    // steps and shrinks to whatever length the line search accepted.
    constexpr double kTrustInitM = 1'000e3;
    constexpr double kTrustMinM = 1e3;
    constexpr double kTrustMaxM = 4'000e3;
    double trust = kTrustInitM;
    Vec3 u = cfg.initial_guess ? *cfg.initial_guess : initial_guess(sys);

    LocationEstimate est;
    est.u_hat = u;
    const auto n_rows = static_cast<Eigen::Index>(sys.rows() + 1);
    Eigen::MatrixXd jac(n_rows, 3);
    Eigen::VectorXd res(n_rows);

    for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
        const std::vector<double> f = residual_vector(sys, u);
        const std::vector<Vec3> j = jacobian_matrix(sys, u);
        for (Eigen::Index r = 0; r < n_rows; ++r) {
            const auto ur = static_cast<std::size_t>(r);
            res(r) = f[ur];
            jac(r, 0) = j[ur].x;
            jac(r, 1) = j[ur].y;
            jac(r, 2) = j[ur].z;
        }
        const double norm_before = res.norm();

        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(jac);
        if (qr.rank() < 3)
            throw singular_geometry_error("jacobian numerically rank-deficient at iteration " +
                                          std::to_string(it));
        const Eigen::Vector3d du = qr.solve(-res);
        const Vec3 raw_step{du(0), du(1), du(2)};
        const double step_norm = norm(raw_step);
        const bool capped = step_norm > trust;
        const Vec3 step = capped ? raw_step * (trust / step_norm) : raw_step;

        // Trial points are pulled back onto the earth sphere. Steps are
        // tangent to the constraint, so a long step drifts off the sphere
        // quadratically and the constraint row would veto the very travel
        // the frequency rows ask for; the retraction keeps the line search
        // an honest comparison of frequency residuals.
        const auto retract = [&](const Vec3& p) {
            const double len = norm(p);
            return len > 0.0 ? p * (sys.earth.radius_m / len) : p;
        };
        double lambda = cfg.damping;
        Vec3 u_try = retract(u + lambda * step);
        double norm_after = row_norm(residual_vector(sys, u_try));
        while (norm_after > norm_before && lambda > kDampingFloor) {
            lambda *= 0.5;
            u_try = retract(u + lambda * step);
            norm_after = row_norm(residual_vector(sys, u_try));
        }
        if (lambda == cfg.damping) {
            if (capped) trust = std::min(trust * 2.0, kTrustMaxM);
        } else {
            trust = std::max(lambda * norm(step), kTrustMinM);
        }

        est.iterations = it;
        est.final_step_norm = step_norm;
        if (norm_after > 10.0 * norm_before) {
            // No usable damped step; report where the iteration stood.
            est.u_hat = u;
            est.residual_norm = norm_before;
            est.converged = false;
            return est;
        }

        u = u_try;
        est.u_hat = u;
        est.residual_norm = norm_after;
        if (step_norm < cfg.epsilon) {
            est.converged = true;
            break;
        }
    }
    return est;
}

}  // namespace foaloc
