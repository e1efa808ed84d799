#include <algorithm>
#include <set>

#include "mfglab/cli.hpp"

namespace mfglab::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, std::string_view where) {
    if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
}

template <class T>
T get(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("parameter '") + key + "' has the wrong type");
    }
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

Parameters parse_parameters(const json& p) {
    reject_unknown(p,
                   {"theta0", "n_steps", "N", "N_list", "m0", "seed", "replicas", "threads", "scan_cells",
                    "tolerance", "orbit_tolerance", "max_iter", "stride", "start_solution", "perturbation", "solution", "kernel_n",
                    "horizons", "bracket", "contour_points", "amplitudes", "dt"},
                   "parameters");
    Parameters out;
    out.theta0 = get(p, "theta0", out.theta0);
    out.n_steps = get(p, "n_steps", out.n_steps);
    out.players = get(p, "N", out.players);
    out.players_list = get(p, "N_list", out.players_list);
    if (p.contains("m0")) out.m0 = get(p, "m0", 0);
    out.seed = get(p, "seed", out.seed);
    out.replicas = get(p, "replicas", out.replicas);
    out.threads = get(p, "threads", out.threads);
    out.scan_cells = get(p, "scan_cells", out.scan_cells);
    out.tolerance = get(p, "tolerance", out.tolerance);
    out.max_iter = get(p, "max_iter", out.max_iter);
    out.orbit_tolerance = get(p, "orbit_tolerance", out.orbit_tolerance);
    out.stride = get(p, "stride", out.stride);
    if (p.contains("start_solution")) out.start_solution = get(p, "start_solution", 0);
    out.perturbation = get(p, "perturbation", out.perturbation);
    out.solution = get(p, "solution", out.solution);
    out.kernel_n = get(p, "kernel_n", out.kernel_n);
    out.horizons = get(p, "horizons", out.horizons);
    if (p.contains("bracket")) {
        const auto b = get(p, "bracket", std::vector<double>{});
        require(b.size() == 2 && b[0] > 0.0 && b[1] > b[0], "bracket must be [lo, hi] with 0 < lo < hi");
        out.bracket = std::make_pair(b[0], b[1]);
    }
    out.contour_points = get(p, "contour_points", out.contour_points);
    out.amplitudes = get(p, "amplitudes", out.amplitudes);
    out.dt = get(p, "dt", out.dt);
    return out;
}

}  // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"solve-mfg", "iterate-t", "mpe",       "simulate", "epsilon-nash",
                                                "kernel",    "stability", "contour",   "y-approx", "period"};
    return names;
}

void validate(const RunConfig& c) {
    const Parameters& p = c.parameters;
    require(std::find(subcommands().begin(), subcommands().end(), c.subcommand) != subcommands().end(),
            "unknown subcommand '" + c.subcommand + "'");
    require(p.theta0 >= 0.0 && p.theta0 <= 1.0, "theta0 must lie in [0, 1]");
    require(p.n_steps >= 2, "n_steps must be at least 2");
    require(p.players >= 1, "N must be at least 1");
    require(!p.players_list.empty() && std::all_of(p.players_list.begin(), p.players_list.end(),
                                                   [](int n) { return n >= 1; }),
            "N_list must be nonempty with entries ≥ 1");
    require(!p.m0 || (*p.m0 >= 0 && *p.m0 <= p.players + 1), "m0 must lie in [0, N+1]");
    require(p.replicas >= 1, "replicas must be at least 1");
    require(p.scan_cells >= 2, "scan_cells must be at least 2");
    require(p.tolerance > 0.0, "tolerance must be positive");
    require(p.orbit_tolerance > 0.0, "orbit_tolerance must be positive");
    require(p.max_iter >= 1, "max_iter must be at least 1");
    require(p.stride >= 1, "stride must be at least 1");
    require(!p.start_solution || *p.start_solution >= 0, "start_solution must be nonnegative");
    require(p.solution >= 0, "solution must be nonnegative");
    require(p.kernel_n >= 2, "kernel_n must be at least 2");
    require(std::all_of(p.horizons.begin(), p.horizons.end(), [](double t) { return t > 0.0; }),
            "horizons must be positive");
    require(p.contour_points >= 2, "contour_points must be at least 2");
    require(std::all_of(p.amplitudes.begin(), p.amplitudes.end(), [](double a) { return a > 0.0 && a < 1.0; }),
            "amplitudes must lie in (0, 1)");
    require(p.dt > 0.0, "dt must be positive");
}

RunConfig parse_config(const json& doc) {
    reject_unknown(doc, {"schema_version", "subcommand", "game", "parameters", "output"}, "config");
    require(doc.contains("schema_version"), "missing schema_version");
    require(doc.at("schema_version").is_number_integer() && doc.at("schema_version").get<int>() == kSchemaVersion,
            "unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
    require(doc.contains("game"), "missing game descriptor");

    RunConfig c;
    c.subcommand = get(doc, "subcommand", std::string{});
    try {
        c.game = CostModel::from_json(doc.at("game"));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("game: ") + e.what());
    }
    if (doc.contains("parameters")) c.parameters = parse_parameters(doc.at("parameters"));
    if (doc.contains("output")) {
        const json& o = doc.at("output");
        reject_unknown(o, {"dir", "format"}, "output");
        c.out_dir = get(o, "dir", std::string("."));
        const auto fmt = get(o, "format", std::string("csv"));
        require(fmt == "csv" || fmt == "json", "output.format must be csv or json");
        c.format = fmt == "csv" ? Format::csv : Format::json;
    }
    return c;
}

}  // namespace mfglab::cli
