#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mfglab/cli.hpp"

namespace mfglab::cli {

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

Table trajectory_table(const Trajectory& traj) {
    Table t;
    t.columns.push_back("t");
    t.columns.insert(t.columns.end(), traj.labels().begin(), traj.labels().end());
    t.rows.reserve(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        std::vector<double> row{traj.grid().node(k)};
        const auto v = traj.at(k);
        row.insert(row.end(), v.begin(), v.end());
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table heat_map_table(const nplayer::NPlayerValue& values) {
    Table t{{"i", "n", "t", "u"}, {}};
    const TimeGrid& grid = values.grid();
    t.rows.reserve(2 * static_cast<std::size_t>(values.N() + 1) * grid.size());
    for (int i = 0; i < 2; ++i) {
        for (int n = 0; n <= values.N(); ++n) {
            for (std::size_t k = 0; k < grid.size(); ++k) {
                t.rows.push_back({static_cast<double>(i), static_cast<double>(n), grid.node(k), values.u(i, n, k)});
            }
        }
    }
    return t;
}

void write_csv(const Table& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot open " + path.string() + " for writing");
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
        out << '\n';
    }
    out.flush();
    if (!out) throw IoFailure("write failed for " + path.string());
}

Table read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open " + path.string());
    Table t;
    std::string line;
    if (!std::getline(in, line)) throw IoFailure(path.string() + " is empty");
    t.columns = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        for (const std::string& cell : split(line)) {
            char* end = nullptr;
            errno = 0;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0') throw IoFailure("malformed number '" + cell + "' in " + path.string());
            row.push_back(v);
        }
        if (row.size() != t.columns.size()) throw IoFailure("ragged row in " + path.string());
        t.rows.push_back(std::move(row));
    }
    return t;
}

nlohmann::json table_to_json(const Table& table) {
    return {{"columns", table.columns}, {"rows", table.rows}};
}

Table table_from_json(const nlohmann::json& j) {
    return Table{j.at("columns").get<std::vector<std::string>>(), j.at("rows").get<std::vector<std::vector<double>>>()};
}

void export_trajectory(const Trajectory& traj, Format format, const std::filesystem::path& path) {
    const Table table = trajectory_table(traj);
    if (format == Format::csv) {
        write_csv(table, path);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot open " + path.string() + " for writing");
    out << table_to_json(table).dump(2) << '\n';
    if (!out) throw IoFailure("write failed for " + path.string());
}

}  // namespace mfglab::cli
