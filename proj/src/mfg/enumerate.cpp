#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "mfglab/errors.hpp"
#include "mfglab/mfg.hpp"

namespace mfglab::mfg {

namespace {

// Beyond this |y| the quadratic term dominates and y runs off to ±∞, so the
// sign of the boundary mismatch is settled.
constexpr double kDivergenceCap = 1e6;

struct Endpoint {
    double mismatch = 0.0;  // y_T − δψ(x_T), ±∞ after divergence
    double rotation = 0.0;  // unwrapped polar angle of (x, y) swept up to T
};

constexpr double kPiValue = 3.141592653589793;

double wrap_angle(double a) {
    while (a > kPiValue) a -= 2.0 * kPiValue;
    while (a < -kPiValue) a += 2.0 * kPiValue;
    return a;
}

Endpoint shoot_endpoint(const ReducedSystem& system, double x0, double y0, const TimeGrid& grid) {
    const Drift drift = [&](double, std::span<const double> z, std::span<double> dz) {
        const XYState v = system.drift({z[0], z[1]});
        dz[0] = v.x;
        dz[1] = v.y;
    };
    std::array<double, 2> z{x0, y0};
    Rk4Workspace ws(2);
    Endpoint out;
    bool has_angle = x0 != 0.0 || y0 != 0.0;
    double angle = has_angle ? std::atan2(y0, x0) : 0.0;
    for (int k = 0; k < grid.n_steps(); ++k) {
        const double t = grid.node(k);
        rk4_step(drift, t, grid.node(k + 1) - t, z, ws);
        if (!std::isfinite(z[1]) || std::abs(z[1]) > kDivergenceCap) {
            const double s = std::isnan(z[1]) ? 1.0 : (z[1] > 0.0 ? 1.0 : -1.0);
            out.mismatch = s * std::numeric_limits<double>::infinity();
            return out;
        }
        if (z[0] != 0.0 || z[1] != 0.0) {
            const double a = std::atan2(z[1], z[0]);
            if (has_angle) out.rotation += wrap_angle(a - angle);
            angle = a;
            has_angle = true;
        }
    }
    out.mismatch = z[1] - system.terminal_target(z[0]);
    return out;
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

template <class F>
void parallel_for(std::size_t n, F&& body) {
    const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
    if (workers == 1 || n < 64) {
        for (std::size_t j = 0; j < n; ++j) body(j);
        return;
    }
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t j = lo; j < hi; ++j) body(j);
        });
    }
}

}  // namespace

int winding_number(const Trajectory& xy, double dead_band) {
    double peak = 0.0;
    for (std::size_t k = 0; k < xy.size(); ++k) {
        peak = std::max({peak, std::abs(xy(k, 0)), std::abs(xy(k, 1))});
    }
    if (peak <= dead_band) return 0;

    int runs = 0;
    int last = 0;
    for (std::size_t k = 0; k < xy.size(); ++k) {
        const double x = xy(k, 0);
        const double y = xy(k, 1);
        if (std::abs(x) <= dead_band || std::abs(y) <= dead_band) continue;
        const int quadrant = x > 0.0 ? (y > 0.0 ? 1 : 4) : (y > 0.0 ? 2 : 3);
        if (quadrant != last) {
            ++runs;
            last = quadrant;
        }
    }
    return runs;
}

MfgSolution make_solution(const CostModel& model, double theta0, double y0, const TimeGrid& grid, bool verify) {
    if (!(theta0 >= 0.0 && theta0 <= 1.0)) throw InvalidArgument("θ₀ must lie in [0, 1]");
    const ReducedSystem system(model);
    const double eta = model.eta();
    const double x0 = 2.0 * theta0 - 1.0;

    // (x, y) together with the per-state value equations, whose difference
    // reproduces ẏ stage by stage. Their constants are fixed afterwards from ψ.
    const Drift drift = [&](double, std::span<const double> z, std::span<double> dz) {
        const XYState v = system.drift({z[0], z[1]});
        const double y = z[1];
        const double mass = std::clamp(0.5 * (1.0 + z[0]), 0.0, 1.0);
        const double up = y > 0.0 ? y : 0.0;
        const double down = y < 0.0 ? -y : 0.0;
        dz[0] = v.x;
        dz[1] = v.y;
        dz[2] = -model.running_cost(0, mass) + 0.5 * down * down - eta * y;
        dz[3] = -model.running_cost(1, mass) + 0.5 * up * up + eta * y;
    };
    const std::array<double, 4> init{x0, y0, 0.0, 0.0};
    const Trajectory aug = integrate_forward(drift, init, grid, {"x", "y", "v0", "v1"});

    const std::size_t last = grid.size() - 1;
    const double mass_T = std::clamp(0.5 * (1.0 + aug(last, 0)), 0.0, 1.0);
    const double shift0 = model.terminal_cost(0, mass_T) - aug(last, 2);
    const double shift1 = model.terminal_cost(1, mass_T) - aug(last, 3);

    Trajectory xy(grid, {"x", "y"});
    Trajectory theta(grid, {"theta"});
    Trajectory values(grid, {"u0", "u1"});
    double recovery = 0.0;
    for (std::size_t k = 0; k <= last; ++k) {
        xy(k, 0) = aug(k, 0);
        xy(k, 1) = aug(k, 1);
        theta(k, 0) = std::clamp(0.5 * (1.0 + aug(k, 0)), 0.0, 1.0);
        values(k, 0) = aug(k, 2) + shift0;
        values(k, 1) = aug(k, 3) + shift1;
        recovery = std::max(recovery, std::abs(values(k, 1) - values(k, 0) - aug(k, 1)));
    }
    // θ₀ exactly as declared, not reconstructed through x.
    theta(0, 0) = theta0;

    const double mismatch = std::abs(aug(last, 1) - system.terminal_target(aug(last, 0)));

    double h_drift = std::numeric_limits<double>::quiet_NaN();
    if (const auto h0 = system.hamiltonian({x0, y0})) {
        h_drift = 0.0;
        for (std::size_t k = 0; k <= last; ++k) {
            h_drift = std::max(h_drift, std::abs(*system.hamiltonian({xy(k, 0), xy(k, 1)}) - *h0));
        }
    }

    MfgSolution sol{.y0 = y0, .xy = std::move(xy), .theta = std::move(theta), .values = std::move(values)};
    sol.winding = winding_number(sol.xy, std::max(1e-9, 2.0 * mismatch));
    sol.sign = sign_of(y0);
    sol.hamiltonian_drift = h_drift;
    sol.boundary_mismatch = mismatch;
    sol.recovery_error = recovery;
    sol.fixed_point_residual =
        verify ? sup_distance(apply_T(model, sol.theta), sol.theta) : std::numeric_limits<double>::quiet_NaN();
    return sol;
}

EnumerationResult enumerate_equilibria(const CostModel& model, double theta0, const TimeGrid& grid,
                                       const EnumerationOptions& options) {
    if (!(theta0 >= 0.0 && theta0 <= 1.0)) throw InvalidArgument("enumerate_equilibria: θ₀ must lie in [0, 1]");
    if (options.scan_cells < 2) throw InvalidArgument("enumerate_equilibria: need at least two scan cells");
    if (!(options.y_tolerance > 0.0)) throw InvalidArgument("enumerate_equilibria: y tolerance must be positive");

    const ReducedSystem system(model);
    const double x0 = 2.0 * theta0 - 1.0;
    const double y_max = options.y_max > 0.0
                             ? options.y_max
                             : 2.0 * (model.running_bound() * grid.horizon() + model.terminal_bound()) + 1.0;
    const int cells = options.scan_cells;

    auto node = [&](int j) { return y_max * (2.0 * j - cells) / cells; };
    auto shoot_at = [&](double y0) { return shoot_endpoint(system, x0, y0, grid); };
    auto g = [&](double y0) { return shoot_at(y0).mismatch; };

    std::vector<Endpoint> scan(static_cast<std::size_t>(cells) + 1);
    parallel_for(scan.size(), [&](std::size_t j) { scan[j] = shoot_at(node(static_cast<int>(j))); });

    // Bisection to the requested tolerance, continued while the mismatch is
    // still large; near a separatrix g is steep enough to need it.
    auto refine = [&](double lo, double hi, int s_lo) {
        double root = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            root = 0.5 * (lo + hi);
            if (root <= lo || root >= hi) break;
            const double gm = g(root);
            const int sm = sign_of(gm);
            if (sm == 0) return root;
            if (hi - lo <= options.y_tolerance && std::abs(gm) < 1e-9) break;
            if (sm == s_lo) lo = root; else hi = root;
        }
        return root;
    };

    struct Cell {
        double a, b;
        Endpoint ea, eb;
        int depth;
    };
    // Roots cluster where the endpoint sweeps fast around the origin (paths
    // shadowing a separatrix); cells whose endpoints differ in rotation by
    // more than π/4 are split until each holds at most one crossing.
    constexpr double kMaxSweep = kPiValue / 4.0;
    constexpr int kMaxDepth = 64;
    std::vector<double> roots;
    for (int j = 0; j <= cells; ++j) {
        if (scan[j].mismatch == 0.0) roots.push_back(node(j));
    }
    std::vector<Cell> pending;
    for (int j = cells - 1; j >= 0; --j) pending.push_back({node(j), node(j + 1), scan[j], scan[j + 1], 0});
    while (!pending.empty()) {
        const Cell c = pending.back();
        pending.pop_back();
        const bool finite = std::isfinite(c.ea.mismatch) || std::isfinite(c.eb.mismatch);
        const bool exact_end = c.ea.mismatch == 0.0 || c.eb.mismatch == 0.0;
        const double mid = 0.5 * (c.a + c.b);
        if (finite && !exact_end && std::abs(c.ea.rotation - c.eb.rotation) > kMaxSweep && c.depth < kMaxDepth &&
            mid > c.a && mid < c.b) {
            const Endpoint em = shoot_at(mid);
            if (em.mismatch == 0.0) roots.push_back(mid);
            pending.push_back({mid, c.b, em, c.eb, c.depth + 1});
            pending.push_back({c.a, mid, c.ea, em, c.depth + 1});
            continue;
        }
        const int s_lo = sign_of(c.ea.mismatch);
        const int s_hi = sign_of(c.eb.mismatch);
        if (s_lo == s_hi) continue;
        if (s_lo != 0 && s_hi != 0) {
            // Divergence to +∞ and to −∞ are open conditions, so even a cell
            // with two infinite ends holds a finite crossing.
            roots.push_back(refine(c.a, c.b, s_lo));
            continue;
        }
        // One end is an exact root (the zero solution, typically). A second
        // root inside the cell shows up as a sign change just off that end.
        const double offset = 1e-6 * (c.b - c.a);
        if (s_lo == 0) {
            const double probe = c.a + offset;
            const int sp = sign_of(g(probe));
            if (sp != 0 && sp != s_hi) roots.push_back(refine(probe, c.b, sp));
        } else {
            const double probe = c.b - offset;
            const int sp = sign_of(g(probe));
            if (sp != 0 && sp != s_lo) roots.push_back(refine(c.a, probe, s_lo));
        }
    }
    std::sort(roots.begin(), roots.end());

    EnumerationResult result;
    result.y_max = y_max;
    if (sign_of(scan.front().mismatch) == sign_of(scan.back().mismatch)) {
        result.bracket_exhausted = true;
        result.warnings.push_back("boundary mismatch has equal signs at both ends of the y0 bracket; roots may lie outside ±" +
                                  std::to_string(y_max));
    }

    result.solutions.resize(roots.size(), MfgSolution{.xy = Trajectory(grid, {"x", "y"}),
                                                      .theta = Trajectory(grid, {"theta"}),
                                                      .values = Trajectory(grid, {"u0", "u1"})});
    parallel_for(roots.size(), [&](std::size_t r) {
        MfgSolution sol = make_solution(model, theta0, roots[r], grid, options.verify);
        // Slope of the mismatch at the root; a vanishing slope marks a tangency.
        const double h = 1e-4;
        const double ga = g(roots[r] + h);
        const double gb = g(roots[r] - h);
        sol.degenerate = std::isfinite(ga) && std::isfinite(gb) && std::abs(ga - gb) / (2.0 * h) < 1e-6;
        result.solutions[r] = std::move(sol);
    });
    for (const auto& s : result.solutions) {
        if (s.degenerate) {
            result.warnings.push_back("tangent root at y0 = " + std::to_string(s.y0) +
                                      "; horizon sits on a bifurcation, multiplicity not resolved");
        }
    }
    return result;
}

}  // namespace mfglab::mfg
