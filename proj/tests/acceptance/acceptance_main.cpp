// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria, capped at 1.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "mfglab/errors.hpp"
#include "mfglab/mfg.hpp"
#include "mfglab/nplayer.hpp"
#include "mfglab/stability.hpp"

using namespace mfglab;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Detail {
public:
    template <class T>
    Detail& operator<<(const T& v) {
        out_ << v;
        return *this;
    }
    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

constexpr double kPi = std::numbers::pi;

std::vector<mfg::MfgSolution> solve(const CostModel& model, double theta0, int n_steps, bool verify = true) {
    mfg::EnumerationOptions opt;
    opt.verify = verify;
    return mfg::enumerate_equilibria(model, theta0, make_grid(model.horizon(), n_steps), opt).solutions;
}

bool near_bifurcation(double eta, double T) {
    for (double h : mfg::bifurcation_horizons(eta, T + 1.0)) {
        if (std::abs(h - T) < 0.05) return true;
    }
    return false;
}

const std::vector<double> kCountEtas{0.0, 0.2, 0.4};
const std::vector<double> kCountHorizons{0.5, 1.0, 2.0, 3.0, 5.0, 8.0};

Outcome criterion_1() {
    Outcome o;
    Detail d;
    int checked = 0;
    for (double eta : kCountEtas) {
        for (double T : kCountHorizons) {
            if (near_bifurcation(eta, T)) continue;
            ++checked;
            const auto sols = solve(CostModel::follow(eta, T), 0.5, 4000, false);
            const int expected = mfg::count_equilibria(eta, T);
            if (static_cast<int>(sols.size()) != expected) {
                o.pass = false;
                d << " (eta=" << eta << ",T=" << T << ": " << sols.size() << " vs " << expected << ")";
            }
        }
    }
    o.detail = std::to_string(checked) + " (eta,T) pairs" + (o.pass ? ", all counts match the formula" : d.str());
    return o;
}

Outcome criterion_2() {
    Outcome o;
    Detail d;
    for (double eta : kCountEtas) {
        auto nonzero = [&](double T) {
            const int steps = std::max(1000, static_cast<int>(std::lround(T / 1e-3)));
            return solve(CostModel::follow(eta, T), 0.5, steps, false).size() > 1;
        };
        double lo = 0.5, hi = 10.0;
        while (hi - lo > 1e-3) {
            const double mid = 0.5 * (lo + hi);
            (nonzero(mid) ? hi : lo) = mid;
        }
        const double found = 0.5 * (lo + hi);
        const double expected = eta == 0.0 ? kPi / 2.0 : mfg::critical_horizon(eta);
        const bool ok = std::abs(found - expected) <= 0.02;
        o.pass = o.pass && ok;
        d << "eta=" << eta << ": " << found << " vs " << expected << "; ";
    }
    o.detail = d.str();
    return o;
}

Outcome criterion_3() {
    Outcome o;
    double worst = 0.0;
    int count = 0;
    for (double eta : kCountEtas) {
        for (double T : kCountHorizons) {
            const int steps = static_cast<int>(std::lround(T / 1e-3));
            for (const auto& s : solve(CostModel::follow(eta, T), 0.5, steps, false)) {
                const double h0 = mfg::hamiltonian(mfg::Game::follow, eta, {s.xy(0, 0), s.xy(0, 1)});
                const double rel = s.hamiltonian_drift / std::max(1.0, std::abs(h0)) / T;
                worst = std::max(worst, rel);
                ++count;
            }
        }
    }
    o.pass = worst < 1e-6;
    Detail d;
    d << count << " solutions at dt=1e-3, worst relative drift per unit horizon " << worst << " (< 1e-6)";
    o.detail = d.str();
    return o;
}

Outcome criterion_4() {
    Outcome o;
    double worst = 0.0;
    int count = 0;
    for (double eta : kCountEtas) {
        for (double T : kCountHorizons) {
            for (const auto& s : solve(CostModel::follow(eta, T), 0.5, 4000, true)) {
                worst = std::max(worst, s.fixed_point_residual);
                ++count;
            }
        }
    }
    o.pass = worst < 1e-4;
    Detail d;
    d << count << " solutions at n_steps=4000, worst fixed-point residual " << worst << " (< 1e-4)";
    o.detail = d.str();
    return o;
}

Outcome criterion_5() {
    Outcome o;
    Detail d;
    for (double T : {1.0, kPi / 2.0, 3.0}) {
        const double lambda = stability::largest_eigenvalue(stability::kernel_zero_traj(0.0, T, 1000));
        const double mercer = std::pow(2.0 * T / kPi, 2);
        const double rel = std::abs(lambda - mercer) / mercer;
        bool ok = rel < 5e-3;
        if (T == kPi / 2.0) ok = ok && std::abs(lambda - 1.0) <= 2e-3;
        o.pass = o.pass && ok;
        d << "T=" << T << ": " << lambda << " vs " << mercer << " (rel " << rel << "); ";
    }
    o.detail = d.str();
    return o;
}

Outcome criterion_6() {
    Outcome o;
    Detail d;
    for (double eta : {0.1, 0.2, 0.3, 0.4}) {
        const double star = stability::eigenvalue_crossing(eta, 1000, {0.5, 12.0});
        const double tc = mfg::critical_horizon(eta);
        const double rel = std::abs(star - tc) / tc;
        o.pass = o.pass && rel < 0.02;
        d << "eta=" << eta << ": T*=" << star << " vs T_c=" << tc << " (rel " << rel << "); ";
    }
    o.detail = d.str();
    return o;
}

Outcome criterion_7() {
    Outcome o;
    Detail d;
    using stability::Classification;
    double worst = 0.0;
    for (double eta : {0.0, 0.1, 0.3, 0.45, 0.499, 0.5, 0.501, 0.6, 1.0, 2.0}) {
        const auto r = stability::linear_stability(mfg::Game::follow, eta, {0.0, 0.0});
        const double disc = 4.0 * eta * eta - 1.0;
        if (eta > 0.5) {
            const double e = std::sqrt(disc);
            worst = std::max({worst, std::abs(r.eigenvalues[0] - std::complex<double>(e, 0.0)),
                              std::abs(r.eigenvalues[1] - std::complex<double>(-e, 0.0))});
            if (r.classification != Classification::las) o.pass = false, d << "origin eta=" << eta << " not LAS; ";
        } else if (eta < 0.5) {
            const double w = std::sqrt(-disc);
            worst = std::max({worst, std::abs(r.eigenvalues[0] - std::complex<double>(0.0, w)),
                              std::abs(r.eigenvalues[1] - std::complex<double>(0.0, -w))});
            if (r.classification == Classification::las) o.pass = false, d << "origin eta=" << eta << " LAS; ";
        } else if (r.classification == Classification::las) {
            o.pass = false;
            d << "origin eta=0.5 LAS; ";
        }
    }
    for (double eta : {0.0, 0.1, 0.2, 0.3, 0.45, 0.499}) {
        for (const auto& p : mfg::equilibrium_points(mfg::Game::follow, eta)) {
            if (p.x == 0.0 && p.y == 0.0) continue;
            const auto r = stability::linear_stability(mfg::Game::follow, eta, p);
            const double s = std::sqrt(2.0 + eta * eta) - eta;
            const double e = std::sqrt(s * s - 1.0);
            worst = std::max({worst, std::abs(r.eigenvalues[0] - std::complex<double>(e, 0.0)),
                              std::abs(r.eigenvalues[1] - std::complex<double>(-e, 0.0))});
            if (r.classification != Classification::las) o.pass = false, d << "P eta=" << eta << " not LAS; ";
        }
    }
    o.pass = o.pass && worst < 1e-12;
    d << "worst eigenvalue error " << worst << " (< 1e-12); classification flips at eta=1/2";
    o.detail = d.str();
    return o;
}

// Single-traversal MFG solutions from θ₀ = ½: index 0 traverses the first quadrant.
std::vector<Trajectory> single_traversals(const CostModel& model, const TimeGrid& grid) {
    std::vector<Trajectory> out;
    const auto sols = mfg::enumerate_equilibria(model, 0.5, grid).solutions;
    for (int sign : {1, -1}) {
        for (const auto& s : sols) {
            if (s.winding == 1 && s.sign == sign) out.push_back(s.theta);
        }
    }
    return out;
}

Outcome criterion_8() {
    Outcome o;
    const CostModel model = CostModel::follow(0.0, 10.0);
    const TimeGrid grid = make_grid(10.0, 4000);
    const int N = 400;
    const auto candidates = single_traversals(model, grid);
    if (candidates.size() != 2) return {false, "expected two single-traversal solutions, found " +
                                                   std::to_string(candidates.size())};
    const auto values = nplayer::solve_symmetric_mpe(model, N, grid);
    const auto occ = nplayer::forward_occupancy(values, nplayer::point_mass(N, 210), model);
    const double mean_d = mfg::sup_distance(occ.mean_trajectory(), candidates[0]);
    const auto paths = nplayer::simulate_population(values, 210, model, 20240611ULL, 100);
    const auto flmp = nplayer::flmp_distance(paths, candidates);
    const auto within = std::count_if(flmp.nearest_distance.begin(), flmp.nearest_distance.end(),
                                      [](double v) { return v < 0.1; });
    o.pass = mean_d < 0.05 && within >= 90;
    Detail d;
    d << "KFE mean sup-distance to first-quadrant solution " << mean_d << " (< 0.05); " << within
      << "/100 paths within 0.1 of a single-traversal solution (>= 90); nearest histogram {" << flmp.histogram[0]
      << ", " << flmp.histogram[1] << "}";
    o.detail = d.str();
    return o;
}

Outcome criterion_9() {
    Outcome o;
    const CostModel model = CostModel::follow(0.0, 10.0);
    const TimeGrid grid = make_grid(10.0, 4000);
    const int N = 399;
    const auto values = nplayer::solve_symmetric_mpe(model, N, grid);
    const auto occ = nplayer::forward_occupancy(values, nplayer::point_mass(N, 200), model);
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) worst = std::max(worst, std::abs(occ.mean(k) - 0.5));
    const double v0 = occ.variance(0), vT = occ.variance(grid.size() - 1);
    o.pass = worst < 1e-6 && vT > 0.0 && vT > 10.0 * v0;
    Detail d;
    d << "400 players, m0=200: max |mean - 1/2| " << worst << " (< 1e-6); variance " << v0 << " -> " << vT;
    o.detail = d.str();
    return o;
}

Outcome criterion_10() {
    Outcome o;
    const CostModel model = CostModel::follow(0.6, 2.0);
    const TimeGrid grid = make_grid(2.0, 4000);
    const double theta0 = 0.7;
    const auto sols = mfg::enumerate_equilibria(model, theta0, grid).solutions;
    if (sols.size() != 1) return {false, "expected a unique equilibrium, found " + std::to_string(sols.size())};
    std::vector<double> eps;
    Detail d;
    for (int N : {25, 50, 100, 200, 400}) {
        eps.push_back(nplayer::best_response_gap(model, N, grid, sols.front(), theta0).epsilon);
        d << "eps(" << N << ")=" << eps.back() << " ";
    }
    const double floor = -10.0 * grid.dt();
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (eps[i] < floor) o.pass = false;
        if (i > 0 && !(eps[i] < eps[i - 1])) o.pass = false;
    }
    o.pass = o.pass && eps.back() < eps.front() / 2.0;
    o.detail = d.str() + "(theta0=0.7)";
    return o;
}

Outcome criterion_11() {
    Outcome o;
    Detail d;
    for (double eta : {0.0, 0.3}) {
        for (double T : {1.0, 5.0, 20.0}) {
            for (double theta0 : {0.5, 0.8}) {
                const auto n = solve(CostModel::avoid(eta, T), theta0, static_cast<int>(std::lround(T / 1e-3)), false)
                                   .size();
                if (n != 1) o.pass = false;
                d << "eta=" << eta << ",T=" << T << ",theta0=" << theta0 << ": " << n << "; ";
            }
        }
    }
    o.detail = "solution counts " + d.str();
    return o;
}

Outcome criterion_12() {
    Outcome o;
    Detail d;
    for (double eta : {0.0, 0.2}) {
        const double xbar = mfg::equilibrium_points(mfg::Game::follow, eta)[1].x;
        std::vector<double> a, p;
        for (int i = 0; i < 10; ++i) {
            a.push_back(xbar * (0.05 + 0.1 * i));
            p.push_back(mfg::orbit_period(eta, a.back()));
        }
        bool increasing = true;
        for (std::size_t i = 1; i < p.size(); ++i) increasing = increasing && p[i] > p[i - 1];
        // Quadratic through the three smallest amplitudes, evaluated at zero.
        const double l0 = a[1] * a[2] / ((a[0] - a[1]) * (a[0] - a[2]));
        const double l1 = a[0] * a[2] / ((a[1] - a[0]) * (a[1] - a[2]));
        const double l2 = a[0] * a[1] / ((a[2] - a[0]) * (a[2] - a[1]));
        const double p0 = l0 * p[0] + l1 * p[1] + l2 * p[2];
        const double target = 2.0 * kPi / std::sqrt(1.0 - 4.0 * eta * eta);
        const double rel = std::abs(p0 - target) / target;
        o.pass = o.pass && increasing && rel < 0.01;
        d << "eta=" << eta << ": " << (increasing ? "increasing" : "NOT increasing") << " " << p.front() << ".."
          << p.back() << ", extrapolated " << p0 << " vs " << target << "; ";
    }
    o.detail = d.str();
    return o;
}

Outcome criterion_13() {
    Outcome o;
    const CostModel model = CostModel::follow(0.0, 2.0);
    const TimeGrid grid = make_grid(2.0, 4000);
    const double e50 = nplayer::solve_Y_approx(model, 50, grid).sup_error;
    const double e100 = nplayer::solve_Y_approx(model, 100, grid).sup_error;

    // Single-quadrant path from x0 = 0.5; x0 = 0 would start on the line where
    // Y(N/2, t) = 0 by antisymmetry.
    const double theta0 = 0.75;
    const auto sols = mfg::enumerate_equilibria(model, theta0, grid).solutions;
    const mfg::MfgSolution* path = nullptr;
    for (const auto& s : sols) {
        if (s.winding == 1 && s.sign == 1) path = &s;
    }
    if (!path) return {false, "no single-quadrant MFG path from theta0=0.75"};
    const int N = 400;
    const auto exact = nplayer::difference_table(nplayer::solve_symmetric_mpe(model, N, grid));
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double n_star = N * path->theta(k, 0);
        worst = std::max(worst, std::abs(exact.at_fraction(n_star, k) - path->xy(k, 1)));
    }
    o.pass = e100 < e50 && worst < 0.05;
    Detail d;
    d << "sup|Y_approx - Y_exact|: N=50 " << e50 << ", N=100 " << e100 << "; along the path from theta0=0.75, N=400: "
      << worst << " (< 0.05)";
    o.detail = d.str();
    return o;
}

Outcome criterion_14() {
    Outcome o;
    const CostModel model = CostModel::follow(0.0, 20.0);
    const TimeGrid grid = make_grid(20.0, 4000);
    const auto sols = mfg::enumerate_equilibria(model, 0.5, grid).solutions;
    auto interior_crossings = [&](const Trajectory& theta) {
        int crossings = 0, last = 0;
        for (std::size_t k = 1; k + 1 < theta.size(); ++k) {
            const double x = 2.0 * theta(k, 0) - 1.0;
            if (std::abs(x) < 1e-6) continue;
            const int s = x > 0.0 ? 1 : -1;
            if (last != 0 && s != last) ++crossings;
            last = s;
        }
        return crossings;
    };
    const mfg::MfgSolution* start = nullptr;
    for (const auto& s : sols) {
        if (s.sign == 1 && interior_crossings(s.theta) == 1) start = &s;
    }
    if (!start) return {false, "no single-cross equilibrium found"};
    Trajectory theta = start->theta;
    for (std::size_t k = 1; k < theta.size(); ++k) theta(k, 0) = 0.5 * (1.0 + 0.99 * (2.0 * theta(k, 0) - 1.0));
    const auto orbit = mfg::iterate_T(model, theta, 10000, 1e-3);
    std::size_t best = 0;
    double best_d = INFINITY;
    for (std::size_t i = 0; i < sols.size(); ++i) {
        const double dist = mfg::sup_distance(sols[i].theta, orbit.limit);
        if (dist < best_d) best_d = dist, best = i;
    }
    const int crossings = interior_crossings(sols[best].theta);
    o.pass = orbit.converged && sols[best].winding == 1 && crossings == 0;
    Detail d;
    d << (orbit.converged ? "converged" : "did not converge") << " after " << orbit.iterations
      << " iterations (residual " << orbit.final_residual << "); nearest equilibrium winding " << sols[best].winding
      << ", interior zero crossings " << crossings << ", distance " << best_d;
    o.detail = d.str();
    return o;
}

}  // namespace

// Optional arguments select criteria by number; none runs all.
int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"equilibrium count", criterion_1},
        {"critical horizon", criterion_2},
        {"Hamiltonian conservation", criterion_3},
        {"fixed-point residual", criterion_4},
        {"kernel spectrum", criterion_5},
        {"crossing conjecture", criterion_6},
        {"linear asymptotic stability", criterion_7},
        {"FLMP reproduction", criterion_8},
        {"symmetric stasis", criterion_9},
        {"epsilon-Nash decay", criterion_10},
        {"avoid-the-crowd uniqueness", criterion_11},
        {"period monotonicity", criterion_12},
        {"Y-approximation", criterion_13},
        {"orbit iteration", criterion_14},
    };
    std::vector<std::size_t> selected;
    for (int a = 1; a < argc; ++a) selected.push_back(std::strtoul(argv[a], nullptr, 10) - 1);
    if (selected.empty()) {
        for (std::size_t i = 0; i < criteria.size(); ++i) selected.push_back(i);
    }
    int failed = 0;
    for (std::size_t i : selected) {
        if (i >= criteria.size()) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %zu (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(selected.size()) - failed, selected.size());
    return failed == 0 ? 0 : 1;
}
