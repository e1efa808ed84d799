#include <algorithm>
#include <cmath>

#include "mfglab/errors.hpp"
#include "mfglab/nplayer.hpp"

namespace mfglab::nplayer {

namespace {

double positive(double v) { return v > 0.0 ? v : 0.0; }

void check_players(int N) {
    if (N < 1) throw InvalidArgument("the game needs N ≥ 1 other players");
}

}  // namespace

NPlayerValue::NPlayerValue(int others, TimeGrid grid)
    : others_(others),
      grid_(grid),
      u_(grid.size() * 2 * static_cast<std::size_t>(others + 1), 0.0),
      alpha_(u_.size(), 0.0) {
    check_players(others);
}

double NPlayerValue::max_alpha() const { return alpha_.empty() ? 0.0 : *std::max_element(alpha_.begin(), alpha_.end()); }

void NPlayerValue::refresh_policy() {
    for (std::size_t k = 0; k < grid_.size(); ++k) {
        for (int n = 0; n <= others_; ++n) {
            const double y = difference(n, k);
            alpha_[index(1, n, k)] = positive(y);
            alpha_[index(0, n, k)] = positive(-y);
        }
    }
}

double NPlayerValue::alpha_at(int i, int n, double t) const {
    t = std::clamp(t, 0.0, grid_.horizon());
    auto k = static_cast<std::size_t>(std::floor(t / grid_.dt()));
    const auto last = static_cast<std::size_t>(grid_.n_steps());
    if (k >= last) return alpha(i, n, last);
    const double w = (t - grid_.node(k)) / (grid_.node(k + 1) - grid_.node(k));
    return (1.0 - w) * alpha(i, n, k) + w * alpha(i, n, k + 1);
}

NPlayerValue solve_symmetric_mpe(const CostModel& model, int N, const TimeGrid& grid) {
    check_players(N);
    const std::size_t width = static_cast<std::size_t>(N) + 1;
    const double eta = model.eta();

    std::vector<double> f(2 * width), psi(2 * width);
    for (int i = 0; i < 2; ++i) {
        for (int n = 0; n <= N; ++n) {
            const double theta = static_cast<double>(n) / N;
            f[i * width + n] = model.running_cost(i, theta);
            psi[i * width + n] = model.terminal_cost(i, theta);
        }
    }

    // z[i*(N+1) + n] = u(i, n, t).
    const Drift drift = [&](double, std::span<const double> z, std::span<double> dz) {
        auto u = [&](int i, int n) { return z[i * width + n]; };
        auto policy = [&](int i, int n) { return positive(u(i, n) - u(1 - i, n)); };
        for (int i = 0; i < 2; ++i) {
            for (int n = 0; n <= N; ++n) {
                const double own = u(i, n);
                const double a = policy(i, n);
                double rhs = f[i * width + n] - 0.5 * a * a + eta * (u(1 - i, n) - own);
                // γ⁺ vanishes at n = N and γ⁻ at n = 0, so the out-of-range
                // policy arguments there are never read.
                if (n < N) rhs += (N - n) * (policy(1, n + 1 - i) + eta) * (u(i, n + 1) - own);
                if (n > 0) rhs += n * (policy(0, n - i) + eta) * (u(i, n - 1) - own);
                dz[i * width + n] = -rhs;
            }
        }
    };

    const Trajectory sol = integrate_backward(drift, psi, grid);
    NPlayerValue out(N, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        for (int i = 0; i < 2; ++i) {
            for (int n = 0; n <= N; ++n) out.u(i, n, k) = sol(k, i * width + n);
        }
    }
    out.refresh_policy();
    return out;
}

YTable::YTable(int N, TimeGrid grid) : others_(N), grid_(grid), v_(grid.size() * static_cast<std::size_t>(N + 1), 0.0) {
    check_players(N);
}

double YTable::at_fraction(double n, std::size_t k) const {
    if (!(n >= 0.0 && n <= others_)) throw InvalidArgument("YTable: n outside [0, N]");
    const int lo = std::min(static_cast<int>(std::floor(n)), others_ - 1);
    const double w = n - lo;
    return (1.0 - w) * (*this)(lo, k) + w * (*this)(lo + 1, k);
}

YTable difference_table(const NPlayerValue& values) {
    YTable out(values.N(), values.grid());
    for (std::size_t k = 0; k < values.grid().size(); ++k) {
        for (int n = 0; n <= values.N(); ++n) out(n, k) = values.difference(n, k);
    }
    return out;
}

YTable solve_Y_approx_table(const CostModel& model, int N, const TimeGrid& grid) {
    check_players(N);
    const double eta = model.eta();
    std::vector<double> df(static_cast<std::size_t>(N) + 1), dpsi(df.size());
    for (int n = 0; n <= N; ++n) {
        const double theta = static_cast<double>(n) / N;
        df[n] = model.running_cost(1, theta) - model.running_cost(0, theta);
        dpsi[n] = model.terminal_cost(1, theta) - model.terminal_cost(0, theta);
    }

    const Drift drift = [&](double, std::span<const double> y, std::span<double> dy) {
        for (int n = 0; n <= N; ++n) {
            const double v = y[n];
            double rhs = df[n] - 0.5 * std::abs(v) * v - 2.0 * eta * v;
            if (n < N) rhs += (N - n) * (positive(v) + eta) * (y[n + 1] - v);
            if (n > 0) rhs += n * (positive(-v) + eta) * (y[n - 1] - v);
            dy[n] = -rhs;
        }
    };
    const Trajectory sol = integrate_backward(drift, dpsi, grid);
    YTable out(N, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        for (int n = 0; n <= N; ++n) out(n, k) = sol(k, n);
    }
    return out;
}

YApproxReport solve_Y_approx(const CostModel& model, int N, const TimeGrid& grid) {
    YApproxReport report{solve_Y_approx_table(model, N, grid), difference_table(solve_symmetric_mpe(model, N, grid))};
    for (std::size_t k = 0; k < grid.size(); ++k) {
        for (int n = 0; n <= N; ++n) {
            report.sup_error = std::max(report.sup_error, std::abs(report.approx(n, k) - report.exact(n, k)));
        }
    }
    return report;
}

}  // namespace mfglab::nplayer
