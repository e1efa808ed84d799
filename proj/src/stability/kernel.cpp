#include <algorithm>
#include <cmath>

#include "mfglab/errors.hpp"
#include "mfglab/stability.hpp"

namespace mfglab::stability {

std::vector<double> KernelMatrix::apply(const std::vector<double>& v) const {
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const double* row = entries.data() + static_cast<std::size_t>(i) * n;
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += row[j] * v[j];
        out[i] = s;
    }
    return out;
}

double zero_traj_kernel(double eta, double t, double u) {
    const double lo = std::min(t, u), hi = std::max(t, u);
    if (eta == 0.0) return lo;
    return std::exp(-2.0 * eta * hi) * std::sinh(2.0 * eta * lo) / (2.0 * eta);
}

KernelMatrix kernel_zero_traj(double eta, double horizon, int n) {
    if (n < 2) throw InvalidArgument("kernel_zero_traj: need n ≥ 2");
    if (!(horizon > 0.0)) throw InvalidArgument("kernel_zero_traj: horizon must be positive");
    if (!(eta >= 0.0)) throw InvalidArgument("kernel_zero_traj: η must be nonnegative");
    KernelMatrix m{.n = n, .horizon = horizon, .entries = std::vector<double>(static_cast<std::size_t>(n) * n)};
    const double w = horizon / n;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double v = zero_traj_kernel(eta, m.node(i), m.node(j)) * w;
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return m;
}

KernelMatrix kernel_nonzero_traj(const mfg::MfgSolution& solution, double eta) {
    if (eta != 0.0) throw UnsupportedCase("kernel_nonzero_traj: the kernel is only derived for η = 0");
    const TimeGrid& grid = solution.xy.grid();
    const int n = grid.n_steps();
    const double dt = grid.dt();

    // C(t) = ∫₀ᵗ |y|, D(s) = ∫₀ˢ e^{2C}(1 − sgn(y)x), both by trapezoid.
    std::vector<double> C(grid.size(), 0.0), D(grid.size(), 0.0), g(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double x = solution.xy(k, 0), y = solution.xy(k, 1);
        if (k > 0) C[k] = C[k - 1] + 0.5 * dt * (std::abs(solution.xy(k - 1, 1)) + std::abs(y));
        const double sgn = y > 0.0 ? 1.0 : (y < 0.0 ? -1.0 : 0.0);
        g[k] = std::exp(2.0 * C[k]) * (1.0 - sgn * x);
        if (k > 0) D[k] = D[k - 1] + 0.5 * dt * (g[k - 1] + g[k]);
    }

    KernelMatrix m{.n = n, .horizon = grid.horizon(), .entries = std::vector<double>(static_cast<std::size_t>(n) * n)};
    const double w = grid.horizon() / n;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double v = std::exp(-C[i + 1] - C[j + 1]) * D[j + 1] * w;
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    for (double v : m.entries) {
        if (!std::isfinite(v)) throw NumericalFailure("kernel_nonzero_traj: non-finite kernel entry");
    }
    return m;
}

std::vector<double> gateaux_difference(const CostModel& model, const mfg::MfgSolution& solution,
                                       const std::vector<double>& direction, double epsilon) {
    const Trajectory& base = solution.theta;
    const std::size_t n = base.grid().size() - 1;
    if (direction.size() != n) throw InvalidArgument("gateaux_difference: direction needs one value per node 1..n");
    if (!(epsilon > 0.0)) throw InvalidArgument("gateaux_difference: ε must be positive");

    Trajectory bumped = base;
    for (std::size_t k = 1; k <= n; ++k) bumped(k, 0) += 0.5 * epsilon * direction[k - 1];
    const Trajectory t0 = mfg::apply_T(model, base);
    const Trajectory t1 = mfg::apply_T(model, bumped);
    std::vector<double> out(n);
    for (std::size_t k = 1; k <= n; ++k) out[k - 1] = 2.0 * (t1(k, 0) - t0(k, 0)) / epsilon;
    return out;
}

}  // namespace mfglab::stability
