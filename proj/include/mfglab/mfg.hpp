#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mfglab/grid_ode.hpp"
#include "mfglab/model.hpp"

namespace mfglab::mfg {

/// Games with a closed-form reduced Hamiltonian.
enum class Game { follow, avoid };

/// follow/avoid families map to their Game; every other family has none.
std::optional<Game> game_of(const CostModel& model);

/// Reduced coordinates: x = 2θ − 1, y = u₁ − u₀.
struct XYState {
    double x = 0.0;
    double y = 0.0;
};

/// Single-player cost-to-go against a fixed mass trajectory.
struct ValuePair {
    TimeGrid grid;
    std::vector<double> u0;
    std::vector<double> u1;

    double difference(std::size_t k) const { return u1[k] - u0[k]; }
};

// --- The map 𝒯 ---------------------------------------------------------------

/// Backward RK4 of −u̇(i) = f(i,θ) − ((u(i)−u(1−i))₊)²/2 − η(u(i)−u(1−i)),
/// u(i,T) = ψ(i,θ_T). θ is read from component 0 of `theta`.
ValuePair solve_best_response(const CostModel& model, const Trajectory& theta);

/// Kolmogorov forward equation for the fraction of players in state 0 under
/// the policy α(i,t) = (u(i,t) − u(1−i,t))₊.
Trajectory forward_population(const CostModel& model, const ValuePair& values, double theta0);

/// 𝒯(θ) = forward_population(solve_best_response(θ), θ₀).
Trajectory apply_T(const CostModel& model, const Trajectory& theta);

/// Constant trajectory θ ≡ value on `grid`, labelled "theta".
Trajectory constant_theta(const TimeGrid& grid, double value);

/// Sup-norm distance between component `c` of two trajectories on the same grid.
double sup_distance(const Trajectory& a, const Trajectory& b, std::size_t c = 0);

struct OrbitReport {
    std::vector<int> kept_iterations;     ///< iteration index of each kept iterate
    std::vector<Trajectory> iterates;     ///< θⁿ at the kept indices
    std::vector<double> residuals;        ///< ‖θⁿ⁺¹ − θⁿ‖∞ per iteration
    double final_residual = 0.0;
    bool converged = false;
    int iterations = 0;
    Trajectory limit;
};

/// Undamped iteration θⁿ⁺¹ = 𝒯(θⁿ). θ₀ stays pinned at the start value. Stops
/// once a successive difference drops below `tol` or after `max_iter` steps.
OrbitReport iterate_T(const CostModel& model, const Trajectory& theta0, int max_iter, double tol, int stride = 100);

// --- Reduced (x, y) dynamics -------------------------------------------------

XYState xy_drift(Game game, double eta, XYState s);
double hamiltonian(Game game, double eta, XYState s);
/// (H_x, H_y).
std::array<double, 2> hamiltonian_gradient(Game game, double eta, XYState s);
/// (H_xx, H_xy, H_yy), with H_yy using the one-sided derivative sgn(0) = 0.
std::array<double, 3> hamiltonian_hessian(Game game, double eta, XYState s);
/// dφ/dt for φ the polar angle of (x, y); undefined at the origin.
double angular_velocity(Game game, double eta, XYState s);

/// ẋ = y − x|y| − 2ηx, ẏ = −δf(x) + y|y|/2 + 2ηy for any cost model, with the
/// terminal target y_T = δψ(x_T).
class ReducedSystem {
public:
    explicit ReducedSystem(const CostModel& model);
    ReducedSystem(Game game, double eta);

    XYState drift(XYState s) const;
    /// Closed-form H for follow/avoid; nullopt otherwise.
    std::optional<double> hamiltonian(XYState s) const;
    double terminal_target(double x_terminal) const;

    double eta() const noexcept { return eta_; }
    std::optional<Game> game() const noexcept { return game_; }

private:
    std::optional<Game> game_;
    std::optional<CostModel> model_;
    double eta_;
};

struct ShootResult {
    Trajectory path;              ///< components x, y
    double hamiltonian_drift;     ///< max_t |H(z_t) − H(z_0)|; NaN without a closed-form H
    bool left_domain = false;     ///< x left [−1, 1] at some node
};

/// Forward RK4 of the reduced dynamics from (x0, y0). Throws NumericalFailure
/// when the state becomes non-finite.
ShootResult shoot(Game game, double eta, double x0, double y0, const TimeGrid& grid);
ShootResult shoot(const ReducedSystem& system, double x0, double y0, const TimeGrid& grid);

// --- Finite-horizon equilibria -----------------------------------------------

struct MfgSolution {
    double y0 = 0.0;
    Trajectory xy;          ///< x, y
    Trajectory theta;       ///< theta
    Trajectory values;      ///< u0, u1
    int winding = 0;        ///< quadrants traversed; 0 for the zero solution
    int sign = 0;           ///< sign of y0
    double fixed_point_residual = 0.0;
    double hamiltonian_drift = 0.0;
    double boundary_mismatch = 0.0;  ///< |y_T − δψ(x_T)|
    double recovery_error = 0.0;     ///< max_t |(u1 − u0) − y|
    bool degenerate = false;         ///< tangent root; multiplicity not resolved
};

struct EnumerationOptions {
    int scan_cells = 2000;
    double y_tolerance = 1e-10;
    /// Half-width of the y0 scan; 0 selects 2·(sup|f|·T + sup|ψ|) + 1.
    double y_max = 0.0;
    bool verify = true;
};

struct EnumerationResult {
    std::vector<MfgSolution> solutions;   ///< sorted by y0
    std::vector<std::string> warnings;
    bool bracket_exhausted = false;
    double y_max = 0.0;
};

/// Shoots y0 over [−Y, Y], isolates sign changes of y_T − δψ(x_T) and refines
/// each by bisection. Every root is turned into an MfgSolution and, when
/// `verify` is set, checked against 𝒯.
EnumerationResult enumerate_equilibria(const CostModel& model, double theta0, const TimeGrid& grid,
                                       const EnumerationOptions& options = {});

/// Recovers (θ, u0, u1) from the reduced path starting at (2θ₀−1, y0) and fills
/// in the diagnostics.
MfgSolution make_solution(const CostModel& model, double theta0, double y0, const TimeGrid& grid, bool verify = true);

/// Quadrant count of a reduced path, ignoring |x|, |y| below `dead_band`.
int winding_number(const Trajectory& xy, double dead_band = 1e-9);

// --- Phase-plane analytics ---------------------------------------------------

/// T_c(η) = (π − arccos 2η)/√(1−4η²), for 0 ≤ η < 1/2.
double critical_horizon(double eta);

/// 1 + 2⌈(T − T_c)√(1−4η²)/π⌉ when η < 1/2 and T > T_c, else 1.
int count_equilibria(double eta, double horizon);

/// Horizons T_c + kπ/√(1−4η²), k ≥ 0, up to `horizon_max`.
std::vector<double> bifurcation_horizons(double eta, double horizon_max);

/// Critical points of H: (0,0) and ±P̄ for follow with η < 1/2, (0,0) otherwise.
std::vector<XYState> equilibrium_points(Game game, double eta);

/// Period of the closed orbit whose peak x equals `amplitude`, measured
/// between successive maxima of x.
double orbit_period(double eta, double amplitude, double dt = 1e-3);

enum class Limit { plus_pbar, minus_pbar, origin };
std::string_view to_string(Limit limit);

struct TransientCandidate {
    double y0 = 0.0;
    Limit limit = Limit::origin;
    double closest_approach = 0.0;  ///< min_t distance to the limit point
};

struct TransientReport {
    double level = 0.0;                      ///< H value of the target contour
    std::vector<double> contour_roots;       ///< all y with H(x0, y) = level
    std::vector<TransientCandidate> candidates;
};

/// Initial values y0 for which the infinite-horizon path from x0 stays in
/// [−1,1] and converges, with the limit of each. Throws NumericalFailure when
/// no contour root is verified.
TransientReport infinite_horizon_transient(Game game, double eta, double x0, double horizon_proxy = 30.0);

}  // namespace mfglab::mfg
