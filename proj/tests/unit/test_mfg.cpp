#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mfglab/errors.hpp"
#include "mfglab/mfg.hpp"

using namespace mfglab;
using namespace mfglab::mfg;

namespace {

constexpr double kPi = std::numbers::pi;

// Reference values from an independent adaptive integrator (rtol 1e-12).
constexpr double kRiccatiY0 = 0.8610571715805362;  // √2·tanh(1/√2)
constexpr double kSingleQuadrantY0 = 0.5525247307794189;  // follow, η=0, T=2, x0=0

}  // namespace

TEST_SUITE("mfg") {
    TEST_CASE("best response closed forms") {
        const auto grid = make_grid(1.0, 2000);
        const auto zero = solve_best_response(CostModel::zero(0.3, 1.0), constant_theta(grid, 0.4));
        for (std::size_t k = 0; k < grid.size(); ++k) {
            CHECK(zero.u0[k] == 0.0);
            CHECK(zero.u1[k] == 0.0);
        }

        const auto half = solve_best_response(CostModel::follow(0.0, 1.0), constant_theta(grid, 0.5));
        for (std::size_t k = 0; k < grid.size(); k += 100) {
            CHECK(half.u0[k] == doctest::Approx((1.0 - grid.node(k)) / 2.0).epsilon(1e-12));
            CHECK(half.difference(k) == 0.0);
        }

        const auto full = solve_best_response(CostModel::follow(0.0, 1.0), constant_theta(grid, 1.0));
        CHECK(full.difference(0) == doctest::Approx(kRiccatiY0).epsilon(1e-10));
        CHECK(full.difference(grid.size() - 1) == 0.0);

        CHECK_THROWS_AS(solve_best_response(CostModel::follow(0.0, 1.0), constant_theta(grid, 1.1)), InvalidArgument);
    }

    TEST_CASE("cost-to-go bound") {
        const auto model = CostModel::prisoners_dilemma(0.1, 3.0, {0.2, -0.4});
        const auto grid = make_grid(3.0, 600);
        Trajectory theta(grid, {"theta"});
        for (std::size_t k = 0; k < grid.size(); ++k) theta(k, 0) = 0.5 + 0.4 * std::sin(grid.node(k));
        const auto v = solve_best_response(model, theta);
        const double bound = model.running_bound() * 3.0 + model.terminal_bound();
        for (std::size_t k = 0; k < grid.size(); ++k) {
            CHECK(std::abs(v.u0[k]) <= bound);
            CHECK(std::abs(v.u1[k]) <= bound);
        }
        CHECK(v.u0.back() == model.terminal_cost(0, theta(grid.size() - 1, 0)));
    }

    TEST_CASE("forward population closed forms") {
        const auto grid = make_grid(2.0, 2000);
        ValuePair flat{grid, std::vector<double>(grid.size(), 0.0), std::vector<double>(grid.size(), 0.0)};
        const auto still = forward_population(CostModel::zero(0.0, 2.0), flat, 0.3);
        for (std::size_t k = 0; k < grid.size(); ++k) CHECK(still(k, 0) == 0.3);

        const auto relax = forward_population(CostModel::zero(0.5, 2.0), flat, 1.0);
        CHECK(relax(grid.size() - 1, 0) == doctest::Approx(0.5676676416183064).epsilon(1e-10));

        const double c = 0.8;
        ValuePair tilt{grid, std::vector<double>(grid.size(), 0.0), std::vector<double>(grid.size(), c)};
        const auto fill = forward_population(CostModel::zero(0.0, 2.0), tilt, 0.0);
        for (std::size_t k = 0; k < grid.size(); k += 250) {
            CHECK(fill(k, 0) == doctest::Approx(1.0 - std::exp(-c * grid.node(k))).epsilon(1e-10));
        }
    }

    TEST_CASE("the map T") {
        const auto grid = make_grid(3.0, 1500);
        const auto sym = apply_T(CostModel::follow(0.2, 3.0), constant_theta(grid, 0.5));
        for (std::size_t k = 0; k < grid.size(); ++k) CHECK(sym(k, 0) == doctest::Approx(0.5).epsilon(1e-14));

        Trajectory wiggle(grid, {"theta"});
        for (std::size_t k = 0; k < grid.size(); ++k) wiggle(k, 0) = 0.9 - 0.3 * std::sin(grid.node(k));
        const double eta = 0.4;
        const auto flat = apply_T(CostModel::zero(eta, 3.0), wiggle);
        for (std::size_t k = 0; k < grid.size(); k += 100) {
            CHECK(flat(k, 0) == doctest::Approx(0.5 + 0.4 * std::exp(-2.0 * eta * grid.node(k))).epsilon(1e-10));
        }

        const auto orbit = iterate_T(CostModel::zero(eta, 3.0), wiggle, 50, 1e-12);
        CHECK(orbit.converged);
        CHECK(orbit.iterations <= 2);
        CHECK(sup_distance(orbit.limit, flat) < 1e-14);
    }

    TEST_CASE("iterate_T from a fixed point stops at once") {
        const auto grid = make_grid(2.0, 4000);
        const auto model = CostModel::follow(0.0, 2.0);
        const auto sols = enumerate_equilibria(model, 0.5, grid).solutions;
        REQUIRE(sols.size() == 3);
        const auto orbit = iterate_T(model, sols.back().theta, 100, 1e-4);
        CHECK(orbit.converged);
        CHECK(orbit.iterations == 1);
        CHECK(orbit.final_residual < 1e-4);
        CHECK(orbit.limit(0, 0) == 0.5);
    }

    TEST_CASE("reduced dynamics and Hamiltonian") {
        const double r2 = std::sqrt(2.0);
        auto d = xy_drift(Game::follow, 0.0, {0.0, 0.0});
        CHECK(d.x == 0.0);
        CHECK(d.y == 0.0);
        d = xy_drift(Game::follow, 0.0, {1.0, r2});
        CHECK(d.x == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(std::abs(d.y) < 1e-15);
        for (double y : {0.1, 1.0, 3.0}) {
            const auto a = xy_drift(Game::avoid, 0.0, {1.0, y});
            CHECK(a.y == doctest::Approx(1.0 + y * y / 2.0));
        }
        CHECK(hamiltonian(Game::follow, 0.3, {0.0, 0.0}) == 0.0);
        CHECK(hamiltonian(Game::follow, 0.0, {1.0, r2}) == doctest::Approx(0.5).epsilon(1e-15));
        for (double x : {-0.7, 0.2, 1.0}) CHECK(hamiltonian(Game::avoid, 0.4, {x, 0.0}) == doctest::Approx(-x * x / 2.0));

        // ẋ = H_y and ẏ = −H_x.
        for (double eta : {0.0, 0.2, 0.7}) {
            for (Game g : {Game::follow, Game::avoid}) {
                const XYState s{0.3, -0.8};
                const auto grad = hamiltonian_gradient(g, eta, s);
                const auto v = xy_drift(g, eta, s);
                CHECK(v.x == doctest::Approx(grad[1]).epsilon(1e-14));
                CHECK(v.y == doctest::Approx(-grad[0]).epsilon(1e-14));
            }
        }
    }

    TEST_CASE("angular velocity signs") {
        for (double eta : {0.0, 0.2, 0.6}) {
            for (double y : {-2.0, -0.5, 0.1, 1.5}) CHECK(angular_velocity(Game::follow, eta, {0.0, y}) < 0.0);
        }
        for (double eta : {0.5, 0.8}) {
            for (double a : {0.1, 0.5, 0.9}) CHECK(angular_velocity(Game::follow, eta, {a, a}) > 0.0);
        }
        CHECK_THROWS_AS(angular_velocity(Game::follow, 0.1, {0.0, 0.0}), InvalidArgument);
    }

    TEST_CASE("shooting") {
        const auto grid = make_grid(3.0, 3000);
        const auto still = shoot(Game::follow, 0.0, 0.0, 0.0, grid);
        CHECK(still.hamiltonian_drift == 0.0);
        for (std::size_t k = 0; k < grid.size(); ++k) CHECK(still.path(k, 1) == 0.0);

        const auto saddle = shoot(Game::follow, 0.0, 1.0, std::sqrt(2.0), grid);
        CHECK(std::abs(saddle.path(grid.size() - 1, 0) - 1.0) < 1e-12);
        CHECK(std::abs(saddle.path(grid.size() - 1, 1) - std::sqrt(2.0)) < 1e-12);

        // Small orbits take T_c(0) = π/2 to traverse the first quadrant.
        const auto small = shoot(Game::follow, 0.0, 0.0, 1e-5, grid);
        double crossing = -1.0;
        for (std::size_t k = 1; k < grid.size(); ++k) {
            if (small.path(k - 1, 1) > 0.0 && small.path(k, 1) <= 0.0) {
                const double a = small.path(k - 1, 1), b = small.path(k, 1);
                crossing = grid.node(k - 1) + grid.dt() * a / (a - b);
                break;
            }
        }
        CHECK(crossing == doctest::Approx(kPi / 2.0).epsilon(1e-4));

        const auto orbit = shoot(Game::follow, 0.2, 0.1, 0.3, make_grid(5.0, 5000));
        CHECK(orbit.hamiltonian_drift < 1e-9);
        CHECK_THROWS_AS(shoot(Game::follow, 0.2, 0.1, 3.0, grid), NumericalFailure);
        CHECK_THROWS_AS(shoot(Game::follow, 0.0, 1.2, 0.0, grid), InvalidArgument);
    }

    TEST_CASE("enumeration") {
        const auto grid1 = make_grid(1.0, 4000);
        const auto below = enumerate_equilibria(CostModel::follow(0.0, 1.0), 0.5, grid1);
        REQUIRE(below.solutions.size() == 1);
        CHECK(below.solutions[0].winding == 0);

        const auto grid2 = make_grid(2.0, 4000);
        const auto three = enumerate_equilibria(CostModel::follow(0.0, 2.0), 0.5, grid2);
        REQUIRE(three.solutions.size() == 3);
        CHECK(three.solutions[2].y0 == doctest::Approx(kSingleQuadrantY0).epsilon(1e-9));
        CHECK(three.solutions[0].y0 == doctest::Approx(-kSingleQuadrantY0).epsilon(1e-9));
        std::vector<int> windings, signs;
        for (const auto& s : three.solutions) {
            windings.push_back(s.winding);
            signs.push_back(s.sign);
            CHECK(s.fixed_point_residual < 1e-4);
            CHECK(s.recovery_error < 1e-8);
            CHECK(s.theta(0, 0) == 0.5);
            CHECK(std::abs(s.xy(0, 0)) < 1e-12);
            CHECK_FALSE(s.degenerate);
        }
        CHECK(windings == std::vector<int>{1, 0, 1});
        CHECK(signs == std::vector<int>{-1, 0, 1});

        // (x, y) ↦ (−x, −y) pairs the nonzero solutions.
        double pair = 0.0;
        for (std::size_t k = 0; k < grid2.size(); ++k) {
            pair = std::max(pair, std::abs(three.solutions[0].xy(k, 0) + three.solutions[2].xy(k, 0)));
            pair = std::max(pair, std::abs(three.solutions[0].xy(k, 1) + three.solutions[2].xy(k, 1)));
        }
        CHECK(pair < 1e-8);

        for (double T : {1.0, 4.0, 9.0}) {
            CHECK(enumerate_equilibria(CostModel::follow(0.6, T), 0.5, make_grid(T, 2000)).solutions.size() == 1);
        }
    }

    TEST_CASE("enumeration resolves roots near the separatrix") {
        const auto model = CostModel::follow(0.0, 10.0);
        const auto sols = enumerate_equilibria(model, 0.5, make_grid(10.0, 4000)).solutions;
        REQUIRE(sols.size() == 7);
        std::vector<int> windings;
        for (const auto& s : sols) windings.push_back(s.winding);
        CHECK(windings == std::vector<int>{1, 3, 5, 0, 5, 3, 1});
    }

    TEST_CASE("enumeration with terminal costs") {
        const auto model = CostModel::follow(0.0, 2.0, {0.0, 0.3});
        const auto grid = make_grid(2.0, 4000);
        const auto res = enumerate_equilibria(model, 0.5, grid);
        REQUIRE_FALSE(res.solutions.empty());
        for (const auto& s : res.solutions) {
            CHECK(s.boundary_mismatch < 1e-8);
            CHECK(s.fixed_point_residual < 1e-4);
            CHECK(s.values(grid.size() - 1, 1) == doctest::Approx(0.3));
        }
    }

    TEST_CASE("general cost models use the same reduction") {
        const auto model = CostModel::prisoners_dilemma(0.1, 3.0);
        const auto grid = make_grid(3.0, 3000);
        const auto res = enumerate_equilibria(model, 0.4, grid);
        REQUIRE_FALSE(res.solutions.empty());
        for (const auto& s : res.solutions) {
            CHECK(s.fixed_point_residual < 1e-4);
            CHECK(std::isnan(s.hamiltonian_drift));
        }
    }

    TEST_CASE("critical horizon and equilibrium count") {
        CHECK(critical_horizon(0.0) == doctest::Approx(kPi / 2.0).epsilon(1e-15));
        CHECK(critical_horizon(0.3) == doctest::Approx(2.767871794485226).epsilon(1e-12));
        CHECK(critical_horizon(0.45) == doctest::Approx(6.172581371221287).epsilon(1e-12));
        CHECK(critical_horizon(0.4999) > 100.0);
        CHECK_THROWS_AS(critical_horizon(0.5), InvalidArgument);
        CHECK(count_equilibria(0.0, 1.0) == 1);
        CHECK(count_equilibria(0.0, 2.0) == 3);
        CHECK(count_equilibria(0.0, 5.0) == 5);
        CHECK(count_equilibria(0.7, 50.0) == 1);
        const auto h = bifurcation_horizons(0.0, 8.0);
        REQUIRE(h.size() == 3);
        CHECK(h[1] == doctest::Approx(kPi / 2.0 + kPi));
    }

    TEST_CASE("resting points") {
        const auto p0 = equilibrium_points(Game::follow, 0.0);
        REQUIRE(p0.size() == 3);
        bool found = false;
        for (const auto& p : p0) found = found || (std::abs(p.x - 1.0) < 1e-15 && std::abs(p.y - std::sqrt(2.0)) < 1e-15);
        CHECK(found);
        const auto p2 = equilibrium_points(Game::follow, 0.2);
        REQUIRE(p2.size() == 3);
        CHECK(p2[1].x == doctest::Approx(0.6743428628582859).epsilon(1e-14));
        CHECK(p2[1].y == doctest::Approx(0.8282856857085699).epsilon(1e-14));
        CHECK(equilibrium_points(Game::follow, 0.5).size() == 1);
        CHECK(equilibrium_points(Game::avoid, 0.1).size() == 1);
    }

    TEST_CASE("orbit period") {
        // The period grows linearly in the amplitude near zero.
        CHECK(orbit_period(0.0, 1e-3) == doctest::Approx(2.0 * kPi).epsilon(1e-3));
        CHECK(orbit_period(0.2, 1e-3) == doctest::Approx(6.855517208472575).epsilon(1e-3));
        for (double eta : {0.0, 0.2, 0.4}) {
            const double xbar = equilibrium_points(Game::follow, eta)[1].x;
            const double p1 = orbit_period(eta, 0.1 * xbar), p5 = orbit_period(eta, 0.5 * xbar),
                         p9 = orbit_period(eta, 0.9 * xbar);
            CHECK(p9 > p5);
            CHECK(p5 > p1);
        }
        CHECK_THROWS_AS(orbit_period(0.2, 0.7), InvalidArgument);
        CHECK_THROWS_AS(orbit_period(0.6, 0.1), InvalidArgument);
    }

    TEST_CASE("infinite-horizon transients") {
        const auto strong = infinite_horizon_transient(Game::follow, 0.6, 0.5);
        REQUIRE(strong.candidates.size() == 1);
        CHECK(strong.candidates[0].limit == Limit::origin);

        const auto mid = infinite_horizon_transient(Game::follow, 0.2, 0.0);
        REQUIRE(mid.candidates.size() == 2);
        const auto& hi = mid.candidates[0].y0 > mid.candidates[1].y0 ? mid.candidates[0] : mid.candidates[1];
        const auto& lo = mid.candidates[0].y0 > mid.candidates[1].y0 ? mid.candidates[1] : mid.candidates[0];
        CHECK(hi.limit == Limit::plus_pbar);
        CHECK(lo.limit == Limit::minus_pbar);
        CHECK(hi.y0 == doctest::Approx(-lo.y0).epsilon(1e-12));

        const auto outside = infinite_horizon_transient(Game::follow, 0.2, 0.9);
        REQUIRE(outside.candidates.size() == 1);
        CHECK(outside.candidates[0].limit == Limit::plus_pbar);
        CHECK(outside.candidates[0].closest_approach < 0.01);
    }
}
