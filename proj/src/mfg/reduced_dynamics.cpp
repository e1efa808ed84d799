#include <algorithm>
#include <cmath>
#include <limits>

#include "mfglab/errors.hpp"
#include "mfglab/mfg.hpp"

namespace mfglab::mfg {

namespace {

double sgn(double v) { return (v > 0.0) - (v < 0.0); }

// +1 for follow, −1 for avoid: the sign of x in −ẏ and of x² in H.
double coupling(Game game) { return game == Game::follow ? 1.0 : -1.0; }

}  // namespace

std::optional<Game> game_of(const CostModel& model) {
    switch (model.family()) {
        case CostFamily::follow: return Game::follow;
        case CostFamily::avoid: return Game::avoid;
        default: return std::nullopt;
    }
}

XYState xy_drift(Game game, double eta, XYState s) {
    const double ay = std::abs(s.y);
    return {s.y - s.x * ay - 2.0 * eta * s.x, -coupling(game) * s.x + 0.5 * s.y * ay + 2.0 * eta * s.y};
}

double hamiltonian(Game game, double eta, XYState s) {
    const auto [x, y] = s;
    return 0.5 * (coupling(game) * x * x - 4.0 * eta * x * y + y * y - x * y * std::abs(y));
}

std::array<double, 2> hamiltonian_gradient(Game game, double eta, XYState s) {
    const auto [x, y] = s;
    const double ay = std::abs(y);
    return {coupling(game) * x - 2.0 * eta * y - 0.5 * y * ay, -2.0 * eta * x + y - x * ay};
}

std::array<double, 3> hamiltonian_hessian(Game game, double eta, XYState s) {
    const auto [x, y] = s;
    return {coupling(game), -2.0 * eta - std::abs(y), 1.0 - x * sgn(y)};
}

double angular_velocity(Game game, double eta, XYState s) {
    const double r2 = s.x * s.x + s.y * s.y;
    if (r2 == 0.0) throw InvalidArgument("angular velocity is undefined at the origin");
    const XYState v = xy_drift(game, eta, s);
    return (v.y * s.x - s.y * v.x) / r2;
}

ReducedSystem::ReducedSystem(const CostModel& model) : game_(game_of(model)), model_(model), eta_(model.eta()) {}

ReducedSystem::ReducedSystem(Game game, double eta) : game_(game), eta_(eta) {
    if (!(eta >= 0.0)) throw InvalidArgument("η must be nonnegative");
}

XYState ReducedSystem::drift(XYState s) const {
    if (game_) return xy_drift(*game_, eta_, s);
    const double ay = std::abs(s.y);
    const double df = model_->cost_difference(std::clamp(s.x, -1.0, 1.0));
    return {s.y - s.x * ay - 2.0 * eta_ * s.x, -df + 0.5 * s.y * ay + 2.0 * eta_ * s.y};
}

std::optional<double> ReducedSystem::hamiltonian(XYState s) const {
    if (game_) return mfg::hamiltonian(*game_, eta_, s);
    return std::nullopt;
}

double ReducedSystem::terminal_target(double x_terminal) const {
    // follow/avoid built from a Game carry no terminal cost.
    if (!model_) return 0.0;
    return model_->terminal_difference(std::clamp(x_terminal, -1.0, 1.0));
}

ShootResult shoot(const ReducedSystem& system, double x0, double y0, const TimeGrid& grid) {
    if (!(std::abs(x0) <= 1.0)) throw InvalidArgument("shoot: |x0| must not exceed 1");
    const Drift drift = [&](double, std::span<const double> z, std::span<double> dz) {
        const XYState v = system.drift({z[0], z[1]});
        dz[0] = v.x;
        dz[1] = v.y;
    };
    const std::array<double, 2> init{x0, y0};
    ShootResult out{integrate_forward(drift, init, grid, {"x", "y"}), std::numeric_limits<double>::quiet_NaN()};

    const auto h0 = system.hamiltonian({x0, y0});
    double drift_max = 0.0;
    for (std::size_t k = 0; k < out.path.size(); ++k) {
        const XYState s{out.path(k, 0), out.path(k, 1)};
        if (std::abs(s.x) > 1.0 + 1e-12) out.left_domain = true;
        if (h0) drift_max = std::max(drift_max, std::abs(*system.hamiltonian(s) - *h0));
    }
    if (h0) out.hamiltonian_drift = drift_max;
    return out;
}

ShootResult shoot(Game game, double eta, double x0, double y0, const TimeGrid& grid) {
    return shoot(ReducedSystem(game, eta), x0, y0, grid);
}

}  // namespace mfglab::mfg
