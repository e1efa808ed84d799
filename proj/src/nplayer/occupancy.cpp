#include <cmath>
#include <numeric>
#include <string>

#include "mfglab/errors.hpp"
#include "mfglab/nplayer.hpp"

namespace mfglab::nplayer {

double OccupancyDistribution::mean(std::size_t k) const {
    double s = 0.0;
    for (int m = 0; m <= players; ++m) s += m * prob(k, m);
    return s / players;
}

double OccupancyDistribution::variance(std::size_t k) const {
    const double mu = mean(k);
    double s = 0.0;
    for (int m = 0; m <= players; ++m) {
        const double d = static_cast<double>(m) / players - mu;
        s += d * d * prob(k, m);
    }
    return s;
}

Trajectory OccupancyDistribution::mean_trajectory() const {
    Trajectory out(grid, {"mean"});
    for (std::size_t k = 0; k < grid.size(); ++k) out(k, 0) = mean(k);
    return out;
}

Trajectory OccupancyDistribution::variance_trajectory() const {
    Trajectory out(grid, {"variance"});
    for (std::size_t k = 0; k < grid.size(); ++k) out(k, 0) = variance(k);
    return out;
}

std::vector<double> point_mass(int N, int m0) {
    if (N < 1 || m0 < 0 || m0 > N + 1) throw InvalidArgument("point_mass: need 0 ≤ m0 ≤ N+1");
    std::vector<double> p(static_cast<std::size_t>(N) + 2, 0.0);
    p[m0] = 1.0;
    return p;
}

OccupancyDistribution forward_occupancy(const NPlayerValue& values, std::span<const double> initial,
                                        const CostModel& model) {
    const int N = values.N();
    const int players = N + 1;
    if (initial.size() != static_cast<std::size_t>(players) + 1) {
        throw InvalidArgument("forward_occupancy: initial distribution must have N+2 entries");
    }
    double total = 0.0;
    for (double q : initial) {
        if (!std::isfinite(q) || q < 0.0) throw InvalidArgument("forward_occupancy: negative or non-finite mass");
        total += q;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw InvalidArgument("forward_occupancy: initial mass sums to " + std::to_string(total));
    }
    const double eta = model.eta();

    const Drift drift = [&](double t, std::span<const double> p, std::span<double> dp) {
        std::fill(dp.begin(), dp.end(), 0.0);
        for (int m = 0; m <= players; ++m) {
            if (p[m] == 0.0) continue;
            if (m < players) {
                const double flow = (players - m) * (values.alpha_at(1, m, t) + eta) * p[m];
                dp[m] -= flow;
                dp[m + 1] += flow;
            }
            if (m > 0) {
                const double flow = m * (values.alpha_at(0, m - 1, t) + eta) * p[m];
                dp[m] -= flow;
                dp[m - 1] += flow;
            }
        }
    };

    const Trajectory sol = integrate_forward(drift, initial, values.grid());
    return OccupancyDistribution{.players = players, .grid = values.grid(), .p = sol.raw()};
}

}  // namespace mfglab::nplayer
