#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>

#include "mfglab/cli.hpp"
#include "mfglab/errors.hpp"
#include "mfglab/mfg.hpp"
#include "mfglab/stability.hpp"

namespace mfglab::cli {

namespace {

using nlohmann::json;

json solution_summary(const mfg::MfgSolution& s, std::size_t index) {
    return {{"index", index},
            {"y0", s.y0},
            {"winding", s.winding},
            {"sign", s.sign},
            {"fixed_point_residual", s.fixed_point_residual},
            {"hamiltonian_drift", std::isfinite(s.hamiltonian_drift) ? json(s.hamiltonian_drift) : json(nullptr)},
            {"boundary_mismatch", s.boundary_mismatch},
            {"recovery_error", s.recovery_error},
            {"degenerate", s.degenerate}};
}

Table solution_table(const mfg::MfgSolution& s) {
    Table t{{"t", "x", "y", "theta", "u0", "u1"}, {}};
    for (std::size_t k = 0; k < s.xy.size(); ++k) {
        t.rows.push_back({s.xy.grid().node(k), s.xy(k, 0), s.xy(k, 1), s.theta(k, 0), s.values(k, 0), s.values(k, 1)});
    }
    return t;
}

mfg::Game require_game(const CostModel& model) {
    const auto game = mfg::game_of(model);
    if (!game) throw UnsupportedCase("this subcommand needs the follow or avoid family");
    return *game;
}

mfg::EnumerationResult enumerate(const RunConfig& c, const TimeGrid& grid) {
    mfg::EnumerationOptions opt;
    opt.scan_cells = c.parameters.scan_cells;
    opt.y_tolerance = c.parameters.tolerance;
    return mfg::enumerate_equilibria(c.game, c.parameters.theta0, grid, opt);
}

RunResult solve_mfg(const RunConfig& c, const TimeGrid& grid) {
    const auto found = enumerate(c, grid);
    RunResult r;
    r.summary["count"] = found.solutions.size();
    if (const auto game = mfg::game_of(c.game); game == mfg::Game::follow) {
        r.summary["count_formula"] = mfg::count_equilibria(c.game.eta(), c.game.horizon());
    } else if (game == mfg::Game::avoid) {
        r.summary["count_formula"] = 1;
    }
    r.summary["y_max"] = found.y_max;
    r.summary["bracket_exhausted"] = found.bracket_exhausted;
    r.summary["warnings"] = found.warnings;
    json list = json::array();
    for (std::size_t i = 0; i < found.solutions.size(); ++i) {
        list.push_back(solution_summary(found.solutions[i], i));
        r.tables.emplace_back("solution_" + std::to_string(i), solution_table(found.solutions[i]));
    }
    r.summary["solutions"] = list;
    return r;
}

RunResult iterate_t(const RunConfig& c, const TimeGrid& grid) {
    const Parameters& p = c.parameters;
    const auto found = enumerate(c, grid);
    Trajectory start = mfg::constant_theta(grid, p.theta0);
    if (p.start_solution) {
        if (static_cast<std::size_t>(*p.start_solution) >= found.solutions.size()) {
            throw InvalidArgument("start_solution exceeds the number of enumerated solutions");
        }
        start = found.solutions[*p.start_solution].theta;
        // Perturb x = 2θ − 1 multiplicatively, keeping θ₀.
        for (std::size_t k = 1; k < start.size(); ++k) {
            const double x = 2.0 * start(k, 0) - 1.0;
            start(k, 0) = 0.5 * (1.0 + std::clamp(x * (1.0 + p.perturbation), -1.0, 1.0));
        }
    }
    const auto orbit = mfg::iterate_T(c.game, start, p.max_iter, p.orbit_tolerance, p.stride);

    RunResult r;
    r.summary["converged"] = orbit.converged;
    r.summary["iterations"] = orbit.iterations;
    r.summary["final_residual"] = orbit.final_residual;
    if (!found.solutions.empty()) {
        std::size_t best = 0;
        double best_d = INFINITY;
        for (std::size_t i = 0; i < found.solutions.size(); ++i) {
            const double d = mfg::sup_distance(found.solutions[i].theta, orbit.limit);
            if (d < best_d) best_d = d, best = i;
        }
        r.summary["nearest_solution"] = best;
        r.summary["nearest_distance"] = best_d;
        r.summary["nearest_winding"] = found.solutions[best].winding;
    }
    Table res{{"iteration", "residual"}, {}};
    for (std::size_t i = 0; i < orbit.residuals.size(); ++i) res.rows.push_back({double(i + 1), orbit.residuals[i]});
    Table kept{{"iteration", "t", "theta"}, {}};
    for (std::size_t j = 0; j < orbit.iterates.size(); ++j) {
        for (std::size_t k = 0; k < orbit.iterates[j].size(); ++k) {
            kept.rows.push_back({double(orbit.kept_iterations[j]), grid.node(k), orbit.iterates[j](k, 0)});
        }
    }
    r.tables.emplace_back("residuals", std::move(res));
    r.tables.emplace_back("iterates", std::move(kept));
    r.tables.emplace_back("limit", trajectory_table(orbit.limit));
    return r;
}

Table difference_long(const nplayer::NPlayerValue& v) {
    Table t{{"t", "n", "y"}, {}};
    for (std::size_t k = 0; k < v.grid().size(); ++k) {
        for (int n = 0; n <= v.N(); ++n) t.rows.push_back({v.grid().node(k), double(n), v.difference(n, k)});
    }
    return t;
}

int default_m0(const Parameters& p) { return p.m0.value_or((p.players + 1) / 2); }

RunResult mpe(const RunConfig& c, const TimeGrid& grid) {
    const Parameters& p = c.parameters;
    const auto values = nplayer::solve_symmetric_mpe(c.game, p.players, grid);
    const auto occ = nplayer::forward_occupancy(values, nplayer::point_mass(p.players, default_m0(p)), c.game);
    const auto curve = nplayer::indifference_curve(values);

    RunResult r;
    r.summary["N"] = p.players;
    r.summary["m0"] = default_m0(p);
    r.summary["max_alpha"] = values.max_alpha();
    r.summary["terminal_mean"] = occ.mean(grid.size() - 1);
    r.summary["terminal_variance"] = occ.variance(grid.size() - 1);
    Table occupancy{{"t", "mean", "variance"}, {}};
    for (std::size_t k = 0; k < grid.size(); ++k) occupancy.rows.push_back({grid.node(k), occ.mean(k), occ.variance(k)});
    Table crossings{{"t", "n_star"}, {}};
    for (std::size_t k = 0; k < grid.size(); ++k) {
        for (double n : curve[k]) crossings.rows.push_back({grid.node(k), n});
    }
    r.tables.emplace_back("values", heat_map_table(values));
    r.tables.emplace_back("difference", difference_long(values));
    r.tables.emplace_back("occupancy", std::move(occupancy));
    r.tables.emplace_back("indifference", std::move(crossings));
    return r;
}

RunResult simulate(const RunConfig& c, const TimeGrid& grid) {
    const Parameters& p = c.parameters;
    const auto values = nplayer::solve_symmetric_mpe(c.game, p.players, grid);
    const int m0 = default_m0(p);
    const auto paths = nplayer::simulate_population(values, m0, c.game, p.seed, p.replicas, p.threads);
    const auto occ = nplayer::forward_occupancy(values, nplayer::point_mass(p.players, m0), c.game);

    mfg::EnumerationOptions opt;
    opt.scan_cells = p.scan_cells;
    const double theta0 = static_cast<double>(m0) / (p.players + 1);
    const auto found = mfg::enumerate_equilibria(c.game, theta0, grid, opt);
    std::vector<Trajectory> candidates;
    for (const auto& s : found.solutions) candidates.push_back(s.theta);

    RunResult r;
    r.summary["N"] = p.players;
    r.summary["m0"] = m0;
    r.summary["seed"] = p.seed;
    r.summary["replicas"] = p.replicas;
    json sols = json::array();
    for (std::size_t i = 0; i < found.solutions.size(); ++i) sols.push_back(solution_summary(found.solutions[i], i));
    r.summary["candidates"] = sols;
    if (!candidates.empty()) {
        const auto flmp = nplayer::flmp_distance(paths, candidates);
        r.summary["histogram"] = flmp.histogram;
        const auto mean_report = nplayer::flmp_distance(std::vector<Trajectory>{occ.mean_trajectory()}, candidates);
        r.summary["kfe_mean_nearest"] = mean_report.nearest.front();
        r.summary["kfe_mean_distance"] = mean_report.nearest_distance.front();
        Table near{{"replica", "nearest", "distance"}, {}};
        for (std::size_t i = 0; i < flmp.nearest.size(); ++i) {
            near.rows.push_back({double(i), double(flmp.nearest[i]), flmp.nearest_distance[i]});
        }
        r.tables.emplace_back("flmp", std::move(near));
    }
    Table path_rows{{"replica", "t", "fraction"}, {}};
    for (int rep = 0; rep < paths.replicas(); ++rep) {
        for (std::size_t k = 0; k < grid.size(); ++k) path_rows.rows.push_back({double(rep), grid.node(k), paths.value(rep, k)});
    }
    r.tables.emplace_back("paths", std::move(path_rows));
    r.tables.emplace_back("kfe_mean", trajectory_table(occ.mean_trajectory()));
    return r;
}

RunResult epsilon_nash(const RunConfig& c, const TimeGrid& grid) {
    const Parameters& p = c.parameters;
    const auto found = enumerate(c, grid);
    if (static_cast<std::size_t>(p.solution) >= found.solutions.size()) {
        throw InvalidArgument("solution index exceeds the number of enumerated solutions");
    }
    const auto& eq = found.solutions[p.solution];
    Table t{{"N", "epsilon", "cost_decentralized", "cost_best_response"}, {}};
    for (int N : p.players_list) {
        const auto gap = nplayer::best_response_gap(c.game, N, grid, eq, p.theta0);
        t.rows.push_back({double(N), gap.epsilon, gap.cost_decentralized, gap.cost_best_response});
    }
    RunResult r;
    r.summary["solution"] = solution_summary(eq, static_cast<std::size_t>(p.solution));
    r.tables.emplace_back("epsilon", std::move(t));
    return r;
}

RunResult kernel(const RunConfig& c) {
    const Parameters& p = c.parameters;
    const double eta = c.game.eta();
    std::vector<double> horizons = p.horizons;
    if (horizons.empty()) horizons.push_back(c.game.horizon());
    Table t{{"T", "lambda_max", "mercer_lambda0", "c_squared", "contraction"}, {}};
    for (double T : horizons) {
        const double lambda = stability::largest_eigenvalue(stability::kernel_zero_traj(eta, T, p.kernel_n));
        const double mercer = eta == 0.0 ? stability::mercer_reference(T, 0, 1).first : NAN;
        const auto bound = stability::operator_norm_bound(eta, T);
        t.rows.push_back({T, lambda, mercer, bound.c_squared, bound.contraction ? 1.0 : 0.0});
    }
    RunResult r;
    r.summary["eta"] = eta;
    r.summary["kernel_n"] = p.kernel_n;
    if (p.bracket) {
        r.summary["crossing"] = stability::eigenvalue_crossing(eta, p.kernel_n, *p.bracket);
        if (eta < 0.5) r.summary["critical_horizon"] = mfg::critical_horizon(eta);
    }
    r.tables.emplace_back("spectrum", std::move(t));
    return r;
}

json complex_pair(const std::array<std::complex<double>, 2>& e) {
    return json::array({{e[0].real(), e[0].imag()}, {e[1].real(), e[1].imag()}});
}

RunResult stability_report(const RunConfig& c) {
    const auto game = require_game(c.game);
    const double eta = c.game.eta();
    RunResult r;
    json points = json::array();
    for (const auto& pt : mfg::equilibrium_points(game, eta)) {
        const auto s = stability::linear_stability(game, eta, pt);
        points.push_back({{"x", pt.x},
                          {"y", pt.y},
                          {"a", s.a},
                          {"eigenvalues", complex_pair(s.eigenvalues)},
                          {"classification", stability::to_string(s.classification)},
                          {"exact_a", s.exact_a},
                          {"exact_eigenvalues", complex_pair(s.exact_eigenvalues)},
                          {"exact_classification", stability::to_string(s.exact_classification)}});
    }
    r.summary["eta"] = eta;
    r.summary["points"] = points;
    return r;
}

RunResult contour(const RunConfig& c) {
    const auto game = require_game(c.game);
    const double eta = c.game.eta();
    const int m = c.parameters.contour_points;
    Table t{{"x", "y", "H"}, {}};
    for (int i = 0; i < m; ++i) {
        const double x = -1.05 + 2.1 * i / (m - 1);
        for (int j = 0; j < m; ++j) {
            const double y = -1.05 + 2.1 * j / (m - 1);
            t.rows.push_back({x, y, mfg::hamiltonian(game, eta, {x, y})});
        }
    }
    RunResult r;
    json pts = json::array();
    for (const auto& pt : mfg::equilibrium_points(game, eta)) {
        pts.push_back({{"x", pt.x}, {"y", pt.y}, {"H", mfg::hamiltonian(game, eta, pt)}});
    }
    r.summary["critical_points"] = pts;
    r.tables.emplace_back("contour", std::move(t));
    return r;
}

RunResult y_approx(const RunConfig& c, const TimeGrid& grid) {
    const auto report = nplayer::solve_Y_approx(c.game, c.parameters.players, grid);
    Table t{{"t", "n", "approx", "exact"}, {}};
    for (std::size_t k = 0; k < grid.size(); ++k) {
        for (int n = 0; n <= report.approx.N(); ++n) {
            t.rows.push_back({grid.node(k), double(n), report.approx(n, k), report.exact(n, k)});
        }
    }
    RunResult r;
    r.summary["N"] = c.parameters.players;
    r.summary["sup_error"] = report.sup_error;
    r.tables.emplace_back("y_approx", std::move(t));
    return r;
}

RunResult period(const RunConfig& c) {
    const double eta = c.game.eta();
    if (!(eta < 0.5)) throw UnsupportedCase("closed orbits exist only for η < 1/2");
    std::vector<double> amps = c.parameters.amplitudes;
    const double xbar = mfg::equilibrium_points(mfg::Game::follow, eta)[1].x;
    if (amps.empty()) {
        for (int i = 0; i < 10; ++i) amps.push_back(xbar * (0.05 + 0.1 * i));
    }
    Table t{{"amplitude", "period"}, {}};
    for (double a : amps) t.rows.push_back({a, mfg::orbit_period(eta, a, c.parameters.dt)});
    RunResult r;
    r.summary["eta"] = eta;
    r.summary["xbar"] = xbar;
    r.summary["small_amplitude_limit"] = 2.0 * std::numbers::pi / std::sqrt(1.0 - 4.0 * eta * eta);
    r.tables.emplace_back("period", std::move(t));
    return r;
}

}  // namespace

RunResult execute(const RunConfig& c) {
    validate(c);
    const TimeGrid grid = make_grid(c.game.horizon(), c.parameters.n_steps);
    RunResult r;
    const std::string& s = c.subcommand;
    if (s == "solve-mfg") r = solve_mfg(c, grid);
    else if (s == "iterate-t") r = iterate_t(c, grid);
    else if (s == "mpe") r = mpe(c, grid);
    else if (s == "simulate") r = simulate(c, grid);
    else if (s == "epsilon-nash") r = epsilon_nash(c, grid);
    else if (s == "kernel") r = kernel(c);
    else if (s == "stability") r = stability_report(c);
    else if (s == "contour") r = contour(c);
    else if (s == "y-approx") r = y_approx(c, grid);
    else r = period(c);

    json head{{"schema_version", kSchemaVersion}, {"subcommand", s}, {"game", c.game.to_json()},
              {"n_steps", c.parameters.n_steps}};
    head.update(r.summary);
    r.summary = std::move(head);
    return r;
}

void write_result(const RunConfig& c, const RunResult& result) {
    std::error_code ec;
    std::filesystem::create_directories(c.out_dir, ec);
    if (ec) throw IoFailure("cannot create " + c.out_dir.string() + ": " + ec.message());
    auto write_json = [](const std::filesystem::path& path, const json& j) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoFailure("cannot open " + path.string() + " for writing");
        out << j.dump(2) << '\n';
        if (!out) throw IoFailure("write failed for " + path.string());
    };
    if (c.format == Format::json) {
        json doc = result.summary;
        json tables = json::object();
        for (const auto& [name, table] : result.tables) tables[name] = table_to_json(table);
        doc["tables"] = tables;
        write_json(c.out_dir / "result.json", doc);
        return;
    }
    json doc = result.summary;
    json files = json::array();
    for (const auto& [name, table] : result.tables) {
        write_csv(table, c.out_dir / (name + ".csv"));
        files.push_back(name + ".csv");
    }
    doc["tables"] = files;
    write_json(c.out_dir / "summary.json", doc);
}

json error_json(std::string_view kind, std::string_view message, int exit_code) {
    return {{"error", kind}, {"message", message}, {"exit_code", exit_code}};
}

int run(const RunConfig& config, std::ostream& err) {
    auto fail = [&](std::string_view kind, const char* what, int code) {
        err << error_json(kind, what, code).dump() << '\n';
        return code;
    };
    try {
        const RunResult result = execute(config);
        write_result(config, result);
        return 0;
    } catch (const ConfigError& e) {
        return fail("config", e.what(), 2);
    } catch (const InvalidArgument& e) {
        return fail("invalid_argument", e.what(), 2);
    } catch (const UnsupportedCase& e) {
        return fail("unsupported", e.what(), 2);
    } catch (const NumericalFailure& e) {
        return fail("numerical_failure", e.what(), 3);
    } catch (const IoFailure& e) {
        return fail("io", e.what(), 3);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), 3);
    }
}

}  // namespace mfglab::cli
