#include "mfglab/grid_ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfglab/errors.hpp"

namespace mfglab {

TimeGrid::TimeGrid(double horizon, int n_steps) : horizon_(horizon), n_steps_(n_steps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw InvalidArgument("time grid horizon must be positive and finite");
    }
    if (n_steps < 1) {
        throw InvalidArgument("time grid needs at least one step");
    }
    dt_ = horizon / n_steps;
}

std::vector<double> TimeGrid::nodes() const {
    std::vector<double> out(size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = node(k);
    return out;
}

TimeGrid make_grid(double horizon, int n_steps) {
    if (!(horizon > 0.0)) throw InvalidArgument("make_grid: horizon must be positive");
    if (n_steps < 2) throw InvalidArgument("make_grid: n_steps must be at least 2");
    return TimeGrid(horizon, n_steps);
}

Trajectory::Trajectory(TimeGrid grid, std::vector<std::string> labels)
    : grid_(grid), labels_(std::move(labels)), values_(grid_.size() * labels_.size(), 0.0) {}

Trajectory::Trajectory(TimeGrid grid, std::vector<std::string> labels, std::vector<double> values)
    : grid_(grid), labels_(std::move(labels)), values_(std::move(values)) {
    if (values_.size() != grid_.size() * labels_.size()) {
        throw InvalidArgument("trajectory values do not match grid size times component count");
    }
}

std::vector<double> Trajectory::component(std::size_t c) const {
    std::vector<double> out(size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = (*this)(k, c);
    return out;
}

bool Trajectory::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void rk4_step(const Drift& drift, double t, double h, std::span<double> state, Rk4Workspace& ws) {
    const std::size_t d = state.size();
    if (ws.k1.size() != d) ws.resize(d);
    const double half = 0.5 * h;

    drift(t, state, ws.k1);
    for (std::size_t j = 0; j < d; ++j) ws.tmp[j] = state[j] + half * ws.k1[j];
    drift(t + half, ws.tmp, ws.k2);
    for (std::size_t j = 0; j < d; ++j) ws.tmp[j] = state[j] + half * ws.k2[j];
    drift(t + half, ws.tmp, ws.k3);
    for (std::size_t j = 0; j < d; ++j) ws.tmp[j] = state[j] + h * ws.k3[j];
    drift(t + h, ws.tmp, ws.k4);

    const double w = h / 6.0;
    for (std::size_t j = 0; j < d; ++j) {
        state[j] += w * (ws.k1[j] + 2.0 * ws.k2[j] + 2.0 * ws.k3[j] + ws.k4[j]);
    }
}

namespace {

std::vector<std::string> default_labels(std::size_t d, std::vector<std::string> labels) {
    if (labels.empty()) {
        labels.reserve(d);
        for (std::size_t j = 0; j < d; ++j) labels.push_back("z" + std::to_string(j));
    }
    if (labels.size() != d) throw InvalidArgument("label count does not match state dimension");
    return labels;
}

void require_finite(std::span<const double> z, double t) {
    for (double v : z) {
        if (!std::isfinite(v)) {
            std::ostringstream msg;
            msg << "non-finite state at t = " << t;
            throw NumericalFailure(msg.str(), t);
        }
    }
}

}  // namespace

Trajectory integrate_forward(const Drift& drift, std::span<const double> initial, const TimeGrid& grid,
                             std::vector<std::string> labels) {
    const std::size_t d = initial.size();
    require_finite(initial, 0.0);
    Trajectory out(grid, default_labels(d, std::move(labels)));
    std::vector<double> z(initial.begin(), initial.end());
    std::copy(z.begin(), z.end(), out.at(0).begin());
    Rk4Workspace ws(d);
    for (int k = 0; k < grid.n_steps(); ++k) {
        const double t = grid.node(k);
        rk4_step(drift, t, grid.node(k + 1) - t, z, ws);
        require_finite(z, grid.node(k + 1));
        std::copy(z.begin(), z.end(), out.at(k + 1).begin());
    }
    return out;
}

Trajectory integrate_backward(const Drift& drift, std::span<const double> terminal, const TimeGrid& grid,
                              std::vector<std::string> labels) {
    const std::size_t d = terminal.size();
    require_finite(terminal, grid.horizon());
    Trajectory out(grid, default_labels(d, std::move(labels)));
    std::vector<double> z(terminal.begin(), terminal.end());
    std::copy(z.begin(), z.end(), out.at(grid.size() - 1).begin());
    Rk4Workspace ws(d);
    for (int k = grid.n_steps(); k > 0; --k) {
        const double t = grid.node(k);
        rk4_step(drift, t, grid.node(k - 1) - t, z, ws);
        require_finite(z, grid.node(k - 1));
        std::copy(z.begin(), z.end(), out.at(k - 1).begin());
    }
    return out;
}

namespace {

// Bracketing node index and weight for t in [0, T].
std::pair<std::size_t, double> locate(const TimeGrid& grid, double t) {
    const auto last = static_cast<std::size_t>(grid.n_steps());
    auto k = static_cast<std::size_t>(std::max(0.0, std::floor(t / grid.dt())));
    if (k > last) k = last;
    // Correct the floor for rounding so node times resolve to their own index.
    while (k > 0 && t < grid.node(k)) --k;
    while (k < last && t >= grid.node(k + 1)) ++k;
    if (k == last) return {last - 1, 1.0};
    const double w = (t - grid.node(k)) / (grid.node(k + 1) - grid.node(k));
    return {k, std::clamp(w, 0.0, 1.0)};
}

}  // namespace

std::vector<double> interpolate(const Trajectory& traj, double t) {
    std::vector<double> out(traj.dim());
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = interpolate(traj, c, t);
    return out;
}

double interpolate(const Trajectory& traj, std::size_t component, double t) {
    const TimeGrid& g = traj.grid();
    if (!(t >= 0.0 && t <= g.horizon())) {
        throw InvalidArgument("interpolate: t outside [0, T]");
    }
    const auto [k, w] = locate(g, t);
    if (w == 0.0) return traj(k, component);
    if (w == 1.0) return traj(k + 1, component);
    return (1.0 - w) * traj(k, component) + w * traj(k + 1, component);
}

double interpolate_series(const TimeGrid& grid, std::span<const double> series, double t) {
    t = std::clamp(t, 0.0, grid.horizon());
    const auto [k, w] = locate(grid, t);
    if (w == 0.0) return series[k];
    if (w == 1.0) return series[k + 1];
    return (1.0 - w) * series[k] + w * series[k + 1];
}

}  // namespace mfglab
