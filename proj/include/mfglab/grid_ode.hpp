#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace mfglab {

/// Uniform grid t_k = k*dt on [0, T]; the last node is exactly T.
class TimeGrid {
public:
    TimeGrid(double horizon, int n_steps);

    double horizon() const noexcept { return horizon_; }
    int n_steps() const noexcept { return n_steps_; }
    double dt() const noexcept { return dt_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(n_steps_) + 1; }

    double node(std::size_t k) const noexcept {
        return k == static_cast<std::size_t>(n_steps_) ? horizon_ : static_cast<double>(k) * dt_;
    }
    std::vector<double> nodes() const;

    bool operator==(const TimeGrid& other) const noexcept {
        return horizon_ == other.horizon_ && n_steps_ == other.n_steps_;
    }

private:
    double horizon_;
    int n_steps_;
    double dt_;
};

/// Throws InvalidArgument unless horizon > 0 and n_steps >= 2.
TimeGrid make_grid(double horizon, int n_steps);

/// A d-component real state sampled at every node of a TimeGrid.
class Trajectory {
public:
    Trajectory(TimeGrid grid, std::vector<std::string> labels);
    Trajectory(TimeGrid grid, std::vector<std::string> labels, std::vector<double> values);

    const TimeGrid& grid() const noexcept { return grid_; }
    std::size_t dim() const noexcept { return labels_.size(); }
    std::size_t size() const noexcept { return grid_.size(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    std::span<double> at(std::size_t k) { return {values_.data() + k * dim(), dim()}; }
    std::span<const double> at(std::size_t k) const { return {values_.data() + k * dim(), dim()}; }

    double operator()(std::size_t k, std::size_t c) const { return values_[k * dim() + c]; }
    double& operator()(std::size_t k, std::size_t c) { return values_[k * dim() + c]; }

    std::vector<double> component(std::size_t c) const;
    const std::vector<double>& raw() const noexcept { return values_; }

    bool all_finite() const;

private:
    TimeGrid grid_;
    std::vector<std::string> labels_;
    std::vector<double> values_;
};

/// Right-hand side dz/dt = F(t, z), written into `rate`.
using Drift = std::function<void(double t, std::span<const double> state, std::span<double> rate)>;

/// Scratch storage for rk4_step so repeated steps do not allocate.
struct Rk4Workspace {
    explicit Rk4Workspace(std::size_t dim = 0) { resize(dim); }
    void resize(std::size_t dim) {
        k1.resize(dim); k2.resize(dim); k3.resize(dim); k4.resize(dim); tmp.resize(dim);
    }
    std::vector<double> k1, k2, k3, k4, tmp;
};

/// One classical RK4 step of signed length h, in place. h < 0 steps backward.
void rk4_step(const Drift& drift, double t, double h, std::span<double> state, Rk4Workspace& ws);

/// Fixed-step RK4 from node 0. Throws NumericalFailure on the first non-finite value.
Trajectory integrate_forward(const Drift& drift, std::span<const double> initial, const TimeGrid& grid,
                             std::vector<std::string> labels = {});

/// Fixed-step RK4 from the last node down to node 0. `drift` is dz/dt, as for
/// integrate_forward.
Trajectory integrate_backward(const Drift& drift, std::span<const double> terminal, const TimeGrid& grid,
                              std::vector<std::string> labels = {});

/// Piecewise-linear interpolation; exact at nodes. Throws for t outside [0, T].
std::vector<double> interpolate(const Trajectory& traj, double t);
double interpolate(const Trajectory& traj, std::size_t component, double t);

/// Linear interpolation of a node-sampled scalar series on `grid`, without
/// range checking beyond clamping to [0, T].
double interpolate_series(const TimeGrid& grid, std::span<const double> series, double t);

}  // namespace mfglab
