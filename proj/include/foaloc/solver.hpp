#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "foaloc/calibration.hpp"

namespace foaloc {

/// Raised when the linearized system loses numerical rank, which means
/// the selected sampling geometry cannot pin the emitter down.
class singular_geometry_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The equation system for one localization: a set of calibrated
/// observations in trajectory order plus the geometry they were measured
/// against. FOA keeps one equation per observation; FDOA differences
/// consecutive observations, so K observations give K - 1 equations.
struct ResidualSystem {
    std::vector<CalibratedObservation> observations;
    Vec3 gateway;
    double f_u = 0.0;
    EarthModel earth;
    Method method = Method::Foa;
    Mode mode = Mode::Gateway;

    /// Number of frequency equations (the solver appends one more row for
    /// the earth-surface constraint).
    std::size_t rows() const {
        return method == Method::Foa ? observations.size() : observations.size() - 1;
    }
};

/// Geometry terms shared by the residual and its derivatives at a
/// candidate emitter position u. a1..a3 are the columns of the derivative
/// of the uplink direction k_us with respect to u, that is of
/// (I - k k^T) / g; their units are 1/m.
struct ResidualTerms {
    double eta = 1.0;  // 1 + downlink Doppler factor (1 in onboard mode)
    double g = 0.0;    // |u - satellite|, meters
    Vec3 k_us;         // unit vector satellite -> candidate emitter
    Vec3 k_sg;         // unit vector satellite -> gateway
    Vec3 a1, a2, a3;
};

ResidualTerms residual_terms(const Vec3& u, const CalibratedObservation& obs,
                             const ResidualSystem& sys);

/// Frequency residual of one observation at candidate position u:
/// (f_u / c) * dot(v_ul, k_us(u)) * eta - f_reduced. Throws
/// std::domain_error when u coincides with the satellite position.
double residual(const Vec3& u, const CalibratedObservation& obs, const ResidualSystem& sys);

/// Gradient of the frequency residual with respect to u, from the closed
/// forms (f_u / c) * eta * dot(v_ul, a_m).
Vec3 jacobian_row(const Vec3& u, const CalibratedObservation& obs, const ResidualSystem& sys);

/// Stacked residuals of the system at u: the method's frequency rows
/// followed by the earth-surface constraint (|u|^2 - R^2) / R. The 1/R
/// scaling keeps the constraint row commensurate with the Doppler rows.
std::vector<double> residual_vector(const ResidualSystem& sys, const Vec3& u);

/// Row-wise gradient of residual_vector; the last row is 2u / R.
std::vector<Vec3> jacobian_matrix(const ResidualSystem& sys, const Vec3& u);

/// Draws `count` distinct indices out of [0, available) uniformly, in
/// ascending order. Reproducible for a given engine state.
std::vector<std::size_t> random_selection(std::size_t count, std::size_t available, Rng& rng);

/// Assembles a system from an explicit selection of observation indices,
/// which must be strictly increasing. FOA needs at least 2 indices, FDOA
/// at least 3 (differencing consumes one). Throws std::invalid_argument
/// on bad selections.
ResidualSystem build_system(const std::vector<CalibratedObservation>& all,
                            const std::vector<std::size_t>& selection, const Vec3& gateway,
                            double f_u, const EarthModel& earth, Method method, Mode mode);

/// Assembles a system with `n_equations` equations from randomly selected
/// observations (n_equations + 1 observations for FDOA). Selecting every
/// available observation skips the draw entirely.
ResidualSystem build_system(const std::vector<CalibratedObservation>& all,
                            std::size_t n_equations, Rng& rng, const Vec3& gateway,
                            double f_u, const EarthModel& earth, Method method, Mode mode);

struct SolverConfig {
    double epsilon = 0.1;              // stop when |du| drops below this, meters
    std::size_t max_iter = 100;
    double damping = 1.0;              // initial step scale, (0, 1]
    std::optional<Vec3> initial_guess; // defaults to the subsatellite point
};

struct LocationEstimate {
    Vec3 u_hat;
    std::size_t iterations = 0;
    bool converged = false;
    double final_step_norm = 0.0;  // |du| of the last iteration, meters
    double residual_norm = 0.0;    // |f(u_hat)| including the constraint row
};

/// Default start: the first observation's erroneous uplink satellite
/// position projected radially onto the earth sphere.
Vec3 initial_guess(const ResidualSystem& sys);

/// Damped Newton iteration on the frequency rows plus the earth-surface
/// constraint. Each step solves the linearized system in the least-squares
/// sense through a column-pivoted orthogonal decomposition, is capped to
/// an adaptive trust length (far starts otherwise produce steps far
/// outside the linear regime), and is then halved (down to 2^-10 of the
/// configured damping) while it would grow the residual norm; trial
/// points are retracted onto the earth sphere so long tangent steps are
/// judged by the frequency rows alone. The iteration stops once the
/// uncapped |du| < epsilon. A step that would still grow the norm tenfold
/// aborts with converged = false. Throws singular_geometry_error when the
/// Jacobian drops below rank 3.
LocationEstimate newton_solve(const ResidualSystem& sys, const SolverConfig& cfg = {});

}  // namespace foaloc
