#include <cmath>

#include "mfglab/errors.hpp"
#include "mfglab/nplayer.hpp"

namespace mfglab::nplayer {

namespace {

double positive(double v) { return v > 0.0 ? v : 0.0; }

// Binomial(N, q) probabilities of n = 0..N.
std::vector<double> binomial_weights(int N, double q) {
    std::vector<double> w(static_cast<std::size_t>(N) + 1, 0.0);
    if (q <= 0.0) {
        w[0] = 1.0;
        return w;
    }
    if (q >= 1.0) {
        w[N] = 1.0;
        return w;
    }
    for (int n = 0; n <= N; ++n) {
        w[n] = std::exp(std::lgamma(N + 1.0) - std::lgamma(n + 1.0) - std::lgamma(N - n + 1.0) + n * std::log(q) +
                        (N - n) * std::log1p(-q));
    }
    return w;
}

}  // namespace

GapReport best_response_gap(const CostModel& model, int N, const TimeGrid& grid, const mfg::MfgSolution& equilibrium,
                            double theta0) {
    if (N < 1) throw InvalidArgument("best_response_gap: need N ≥ 1");
    if (!(theta0 >= 0.0 && theta0 <= 1.0)) throw InvalidArgument("best_response_gap: θ₀ outside [0, 1]");
    if (std::abs(equilibrium.values.grid().horizon() - grid.horizon()) > 1e-12) {
        throw InvalidArgument("best_response_gap: equilibrium horizon differs from the grid");
    }
    const std::size_t width = static_cast<std::size_t>(N) + 1;
    const double eta = model.eta();

    // Decentralized MFG policy β(i, t) = (u(i,t) − u(1−i,t))₊.
    auto beta = [&](int i, double t) {
        const double y = interpolate(equilibrium.values, 1, t) - interpolate(equilibrium.values, 0, t);
        return i == 1 ? positive(y) : positive(-y);
    };

    std::vector<double> f(2 * width), psi(2 * width);
    for (int i = 0; i < 2; ++i) {
        for (int n = 0; n <= N; ++n) {
            const double theta = static_cast<double>(n) / N;
            f[i * width + n] = model.running_cost(i, theta);
            psi[i * width + n] = model.terminal_cost(i, theta);
        }
    }

    // best = false: the reference player also follows β, so its cost solves a
    // linear equation. best = true: it minimizes against the others' β.
    auto solve = [&](bool best) {
        const Drift drift = [&](double t, std::span<const double> z, std::span<double> dz) {
            const double b0 = beta(0, t), b1 = beta(1, t);
            auto u = [&](int i, int n) { return z[i * width + n]; };
            for (int i = 0; i < 2; ++i) {
                const double own_beta = i == 1 ? b1 : b0;
                for (int n = 0; n <= N; ++n) {
                    const double own = u(i, n);
                    const double jump = u(1 - i, n) - own;
                    double rhs = f[i * width + n];
                    if (best) {
                        const double a = positive(-jump);
                        rhs += -0.5 * a * a + eta * jump;
                    } else {
                        rhs += 0.5 * own_beta * own_beta + (own_beta + eta) * jump;
                    }
                    if (n < N) rhs += (N - n) * (b1 + eta) * (u(i, n + 1) - own);
                    if (n > 0) rhs += n * (b0 + eta) * (u(i, n - 1) - own);
                    dz[i * width + n] = -rhs;
                }
            }
        };
        return integrate_backward(drift, psi, grid);
    };

    const Trajectory decentralized = solve(false);
    const Trajectory best = solve(true);
    const std::vector<double> weights = binomial_weights(N, theta0);

    GapReport report;
    for (int i = 0; i < 2; ++i) {
        const double pi = i == 0 ? theta0 : 1.0 - theta0;
        for (int n = 0; n <= N; ++n) {
            const double w = pi * weights[n];
            report.cost_decentralized += w * decentralized(0, i * width + n);
            report.cost_best_response += w * best(0, i * width + n);
        }
    }
    report.epsilon = report.cost_decentralized - report.cost_best_response;
    return report;
}

}  // namespace mfglab::nplayer
