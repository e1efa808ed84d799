#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "mfglab/grid_ode.hpp"
#include "mfglab/model.hpp"
#include "mfglab/nplayer.hpp"

namespace mfglab::cli {

inline constexpr int kSchemaVersion = 1;

enum class Format { csv, json };

/// Rejected configuration; maps to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Failed read or write; maps to exit code 3.
class IoFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Column-oriented numeric table, written as long-form CSV.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// `t` followed by the component labels, one row per node.
Table trajectory_table(const Trajectory& traj);
/// Long form (i, n, t, u) of the cost-to-go, 2(N+1)(n_steps+1) rows.
Table heat_map_table(const nplayer::NPlayerValue& values);

void write_csv(const Table& table, const std::filesystem::path& path);
Table read_csv(const std::filesystem::path& path);
nlohmann::json table_to_json(const Table& table);
Table table_from_json(const nlohmann::json& j);
void export_trajectory(const Trajectory& traj, Format format, const std::filesystem::path& path);

struct Parameters {
    double theta0 = 0.5;
    int n_steps = 4000;
    int players = 100;                           ///< N, the number of other players
    std::vector<int> players_list{25, 50, 100, 200, 400};
    std::optional<int> m0;                       ///< default (N+1)/2
    std::uint64_t seed = 0;
    int replicas = 100;
    unsigned threads = 0;
    int scan_cells = 2000;
    double tolerance = 1e-10;
    int max_iter = 10000;
    double orbit_tolerance = 1e-3;               ///< iterate-t stopping residual
    int stride = 100;
    std::optional<int> start_solution;           ///< iterate-t start; constant θ₀ when absent
    double perturbation = 0.01;
    int solution = 0;                            ///< epsilon-nash equilibrium index
    int kernel_n = 1000;
    std::vector<double> horizons;                ///< kernel sweep
    std::optional<std::pair<double, double>> bracket;
    int contour_points = 211;
    std::vector<double> amplitudes;              ///< period sweep; default spans (0.05, 0.95) of x̄
    double dt = 1e-3;
};

struct RunConfig {
    std::string subcommand;
    CostModel game = CostModel::zero(0.0, 1.0);
    Parameters parameters;
    std::filesystem::path out_dir = ".";
    Format format = Format::csv;
};

const std::vector<std::string>& subcommands();

/// Parses a config document; call validate once the subcommand is known. Accepted top-level keys:
/// schema_version, subcommand, game, parameters, output.
RunConfig parse_config(const nlohmann::json& doc);

/// Range checks on a complete config; throws ConfigError.
void validate(const RunConfig& config);

/// Result of one subcommand before anything is written.
struct RunResult {
    nlohmann::json summary;
    std::vector<std::pair<std::string, Table>> tables;
};

RunResult execute(const RunConfig& config);

/// Writes `result` into the output directory: summary.json plus one CSV per
/// table, or a single result.json.
void write_result(const RunConfig& config, const RunResult& result);

/// Executes and writes; returns the exit code and reports errors as JSON on `err`.
int run(const RunConfig& config, std::ostream& err);

/// Error object written to stderr.
nlohmann::json error_json(std::string_view kind, std::string_view message, int exit_code);

}  // namespace mfglab::cli
