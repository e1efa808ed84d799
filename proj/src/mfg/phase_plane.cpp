#include <algorithm>
#include <cmath>
#include <numbers>

#include "mfglab/errors.hpp"
#include "mfglab/mfg.hpp"

namespace mfglab::mfg {

namespace {

void check_eta(double eta) {
    if (!(eta >= 0.0) || !std::isfinite(eta)) throw InvalidArgument("η must be finite and nonnegative");
}

XYState pbar(double eta) {
    const double r = std::sqrt(2.0 + eta * eta);
    return {1.0 - eta * eta - eta * r, r - 3.0 * eta};
}

double distance(XYState a, XYState b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

double critical_horizon(double eta) {
    check_eta(eta);
    if (eta >= 0.5) throw InvalidArgument("no finite critical horizon for η ≥ 1/2");
    return (std::numbers::pi - std::acos(2.0 * eta)) / std::sqrt(1.0 - 4.0 * eta * eta);
}

int count_equilibria(double eta, double horizon) {
    check_eta(eta);
    if (eta >= 0.5) return 1;
    const double tc = critical_horizon(eta);
    if (horizon <= tc) return 1;
    const double omega = std::sqrt(1.0 - 4.0 * eta * eta);
    return 1 + 2 * static_cast<int>(std::ceil((horizon - tc) * omega / std::numbers::pi));
}

std::vector<double> bifurcation_horizons(double eta, double horizon_max) {
    std::vector<double> out;
    if (eta >= 0.5) return out;
    const double tc = critical_horizon(eta);
    const double step = std::numbers::pi / std::sqrt(1.0 - 4.0 * eta * eta);
    for (double t = tc; t <= horizon_max; t += step) out.push_back(t);
    return out;
}

std::vector<XYState> equilibrium_points(Game game, double eta) {
    check_eta(eta);
    std::vector<XYState> pts{{0.0, 0.0}};
    if (game == Game::follow && eta < 0.5) {
        const XYState p = pbar(eta);
        pts.push_back(p);
        pts.push_back({-p.x, -p.y});
    }
    for (const XYState& p : pts) {
        const auto [hx, hy] = hamiltonian_gradient(game, eta, p);
        if (std::abs(hx) > 1e-12 || std::abs(hy) > 1e-12) {
            throw NumericalFailure("resting point fails ∇H = 0 to 1e-12");
        }
    }
    return pts;
}

double orbit_period(double eta, double amplitude, double dt) {
    check_eta(eta);
    if (eta >= 0.5) throw InvalidArgument("orbit_period: no periodic orbits for η ≥ 1/2");
    const double x_bar = pbar(eta).x;
    if (!(amplitude > 0.0 && amplitude < x_bar)) {
        throw InvalidArgument("orbit_period: amplitude must lie strictly inside (0, x̄)");
    }
    if (!(dt > 0.0)) throw InvalidArgument("orbit_period: dt must be positive");

    // On the upper branch ẋ = y(1 − x) − 2ηx vanishes at y* = 2ηA/(1 − A).
    const double y_star = 2.0 * eta * amplitude / (1.0 - amplitude);
    const Drift drift = [eta](double, std::span<const double> z, std::span<double> dz) {
        const XYState v = xy_drift(Game::follow, eta, {z[0], z[1]});
        dz[0] = v.x;
        dz[1] = v.y;
    };
    auto xdot = [eta](std::span<const double> z) { return xy_drift(Game::follow, eta, {z[0], z[1]}).x; };

    std::array<double, 2> z{amplitude, y_star};
    Rk4Workspace ws(2);
    const double omega = std::sqrt(1.0 - 4.0 * eta * eta);
    const double t_max = 1e3 * 2.0 * std::numbers::pi / omega;
    bool seen_minimum = false;
    double prev = xdot(z);
    double t = 0.0;
    while (t < t_max) {
        rk4_step(drift, t, dt, z, ws);
        t += dt;
        const double cur = xdot(z);
        if (!std::isfinite(cur)) throw NumericalFailure("orbit_period: orbit diverged", t);
        if (!seen_minimum && prev < 0.0 && cur >= 0.0) seen_minimum = true;
        if (seen_minimum && prev > 0.0 && cur <= 0.0) {
            // Linear location of the sign change inside the last step.
            return t - dt * cur / (cur - prev);
        }
        prev = cur;
    }
    throw NumericalFailure("orbit_period: no return to the section before the time cap", t);
}

std::string_view to_string(Limit limit) {
    switch (limit) {
        case Limit::plus_pbar: return "+Pbar";
        case Limit::minus_pbar: return "-Pbar";
        case Limit::origin: return "origin";
    }
    return "unknown";
}

namespace {

// Positive roots r of a r² + b r + c = 0.
void positive_roots(double a, double b, double c, std::vector<double>& out) {
    if (std::abs(a) < 1e-300) {
        if (b != 0.0 && -c / b > 0.0) out.push_back(-c / b);
        return;
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return;
    const double sq = std::sqrt(disc);
    // Cancellation-free pair.
    const double q = -0.5 * (b + std::copysign(sq, b));
    const double r1 = q / a;
    const double r2 = q != 0.0 ? c / q : r1;
    for (double r : {r1, r2}) {
        if (r > 0.0 && std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
    }
}

}  // namespace

TransientReport infinite_horizon_transient(Game game, double eta, double x0, double horizon_proxy) {
    check_eta(eta);
    if (!(std::abs(x0) <= 1.0)) throw InvalidArgument("infinite_horizon_transient: |x0| must not exceed 1");
    if (!(horizon_proxy > 0.0)) throw InvalidArgument("infinite_horizon_transient: horizon must be positive");

    const bool saddles = game == Game::follow && eta < 0.5;
    std::vector<std::pair<Limit, XYState>> targets;
    if (saddles) {
        const XYState p = pbar(eta);
        targets = {{Limit::plus_pbar, p}, {Limit::minus_pbar, {-p.x, -p.y}}};
    } else {
        targets = {{Limit::origin, {0.0, 0.0}}};
    }

    TransientReport report;
    report.level = hamiltonian(game, eta, targets.front().second);

    // On each half-line y = s·r, H(x0, y) is the quadratic
    // (1 − s·x0)/2 r² − 2η x0 s r + (±x0²/2 − level).
    const double kappa = game == Game::follow ? 1.0 : -1.0;
    const double c = 0.5 * kappa * x0 * x0 - report.level;
    for (double s : {1.0, -1.0}) {
        std::vector<double> rs;
        positive_roots(0.5 * (1.0 - s * x0), -2.0 * eta * x0 * s, c, rs);
        for (double r : rs) report.contour_roots.push_back(s * r);
    }
    if (std::abs(c) == 0.0) report.contour_roots.push_back(0.0);
    std::sort(report.contour_roots.begin(), report.contour_roots.end());

    const double dt = 1e-3;
    const Drift drift = [game, eta](double, std::span<const double> z, std::span<double> dz) {
        const XYState v = xy_drift(game, eta, {z[0], z[1]});
        dz[0] = v.x;
        dz[1] = v.y;
    };
    for (double y0 : report.contour_roots) {
        std::array<double, 2> z{x0, y0};
        Rk4Workspace ws(2);
        std::vector<double> best(targets.size());
        for (std::size_t j = 0; j < targets.size(); ++j) best[j] = distance({x0, y0}, targets[j].second);
        for (double t = 0.0; t < horizon_proxy; t += dt) {
            rk4_step(drift, t, dt, z, ws);
            if (!std::isfinite(z[1]) || std::abs(z[1]) > 1e6 || std::abs(z[0]) > 1.0 + 1e-12) break;
            for (std::size_t j = 0; j < targets.size(); ++j) {
                best[j] = std::min(best[j], distance({z[0], z[1]}, targets[j].second));
            }
        }
        const auto j = static_cast<std::size_t>(std::min_element(best.begin(), best.end()) - best.begin());
        if (best[j] < 0.01) report.candidates.push_back({y0, targets[j].first, best[j]});
    }

    if (!saddles && report.candidates.size() > 1) {
        // Keep the root closer to zero.
        auto closest = *std::min_element(report.candidates.begin(), report.candidates.end(),
                                         [](const auto& a, const auto& b) { return std::abs(a.y0) < std::abs(b.y0); });
        report.candidates = {closest};
    }
    if (report.candidates.empty()) {
        std::string roots;
        for (double r : report.contour_roots) roots += " " + std::to_string(r);
        throw NumericalFailure("infinite_horizon_transient: no contour root converges (level " +
                               std::to_string(report.level) + ", roots:" + roots + ")");
    }
    return report;
}

}  // namespace mfglab::mfg
