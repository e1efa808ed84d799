#include <algorithm>
#include <cmath>

#include "mfglab/errors.hpp"
#include "mfglab/mfg.hpp"

namespace mfglab::mfg {

namespace {

// Integration stages may step slightly outside [0, 1]; anything further out is
// a caller error.
constexpr double kThetaSlack = 1e-6;

double clamp_theta(double theta) {
    if (!(theta >= -kThetaSlack && theta <= 1.0 + kThetaSlack)) {
        throw InvalidArgument("mass trajectory leaves [0, 1]: θ = " + std::to_string(theta));
    }
    return std::clamp(theta, 0.0, 1.0);
}

double positive(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

ValuePair solve_best_response(const CostModel& model, const Trajectory& theta) {
    const TimeGrid& grid = theta.grid();
    const std::vector<double> th = theta.component(0);
    for (double v : th) clamp_theta(v);
    const double eta = model.eta();

    const Drift drift = [&](double t, std::span<const double> u, std::span<double> du) {
        const double mass = clamp_theta(interpolate_series(grid, th, t));
        const double d0 = u[0] - u[1];
        const double d1 = -d0;
        du[0] = -(model.running_cost(0, mass) - 0.5 * positive(d0) * positive(d0) - eta * d0);
        du[1] = -(model.running_cost(1, mass) - 0.5 * positive(d1) * positive(d1) - eta * d1);
    };

    const double mass_T = clamp_theta(th.back());
    const std::array<double, 2> terminal{model.terminal_cost(0, mass_T), model.terminal_cost(1, mass_T)};
    const Trajectory u = integrate_backward(drift, terminal, grid, {"u0", "u1"});
    return ValuePair{grid, u.component(0), u.component(1)};
}

Trajectory forward_population(const CostModel& model, const ValuePair& values, double theta0) {
    if (!(theta0 >= 0.0 && theta0 <= 1.0)) throw InvalidArgument("forward_population: θ₀ must lie in [0, 1]");
    const TimeGrid& grid = values.grid;
    std::vector<double> diff(grid.size());
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = values.difference(k);
    const double eta = model.eta();

    const Drift drift = [&](double t, std::span<const double> z, std::span<double> dz) {
        const double y = interpolate_series(grid, diff, t);
        dz[0] = (1.0 - z[0]) * (positive(y) + eta) - z[0] * (positive(-y) + eta);
    };
    const std::array<double, 1> init{theta0};
    return integrate_forward(drift, init, grid, {"theta"});
}

Trajectory apply_T(const CostModel& model, const Trajectory& theta) {
    const double theta0 = theta(0, 0);
    return forward_population(model, solve_best_response(model, theta), theta0);
}

Trajectory constant_theta(const TimeGrid& grid, double value) {
    return Trajectory(grid, {"theta"}, std::vector<double>(grid.size(), value));
}

double sup_distance(const Trajectory& a, const Trajectory& b, std::size_t c) {
    if (!(a.grid() == b.grid())) throw InvalidArgument("sup_distance: trajectories live on different grids");
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a(k, c) - b(k, c)));
    return d;
}

OrbitReport iterate_T(const CostModel& model, const Trajectory& theta0, int max_iter, double tol, int stride) {
    if (max_iter < 1) throw InvalidArgument("iterate_T: max_iter must be at least 1");
    if (!(tol > 0.0)) throw InvalidArgument("iterate_T: tol must be positive");
    stride = std::max(stride, 1);

    OrbitReport report{.limit = theta0};
    report.kept_iterations.push_back(0);
    report.iterates.push_back(theta0);

    Trajectory current = theta0;
    for (int n = 1; n <= max_iter; ++n) {
        Trajectory next = apply_T(model, current);
        const double r = sup_distance(next, current);
        report.residuals.push_back(r);
        report.iterations = n;
        report.final_residual = r;
        current = std::move(next);
        const bool done = r < tol;
        if (n % stride == 0 || done || n == max_iter) {
            report.kept_iterations.push_back(n);
            report.iterates.push_back(current);
        }
        if (done) {
            report.converged = true;
            break;
        }
    }
    report.limit = current;
    return report;
}

}  // namespace mfglab::mfg
