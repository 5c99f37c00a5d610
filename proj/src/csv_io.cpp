#include "platoon/csv_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "platoon/error.hpp"

namespace platoon {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write '{}'", path.string()));
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, fmt::format("write to '{}' failed", path.string()));
}

void write_series(const SimulationResult& r, const std::vector<std::vector<double>>& series,
                  const std::filesystem::path& path) {
    auto out = open_out(path);
    out << 't';
    for (std::size_t i = 0; i < series.size(); ++i) out << ",veh" << i;
    out << '\n';
    for (std::size_t k = 0; k < r.sample_count(); ++k) {
        out << format_value(r.time[k]);
        for (const auto& veh : series) out << ',' << format_value(veh[k]);
        out << '\n';
    }
    finish(out, path);
}

}  // namespace

std::string format_value(double value) {
    if (std::isnan(value)) return "nan";
    if (value == 0.0) return "0";
    return fmt::format("{:.9g}", value);
}

void write_timeseries_csv(const SimulationResult& result, const std::filesystem::path& dir) {
    if (result.sample_count() == 0 || result.vehicle_count() == 0) {
        throw Error(ErrorCode::InvalidParameter, "cannot write an empty simulation result");
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, fmt::format("cannot create '{}': {}", dir.string(), ec.message()));

    write_series(result, result.speed, dir / "speed.csv");
    write_series(result, result.spacing, dir / "spacing.csv");
    write_series(result, result.accel, dir / "accel.csv");
    write_series(result, result.control, dir / "control.csv");

    const auto path = dir / "metrics.csv";
    auto out = open_out(path);
    out << "vehicle,peak_speed,overshoot,l2_speed_dev,terminal_spacing_error,"
           "steady_speed_error,steady_spacing_error,min_spacing,amplifies\n";
    for (std::size_t i = 0; i < result.metrics.size(); ++i) {
        const auto& m = result.metrics[i];
        out << i << ',' << format_value(m.peak_speed) << ',' << format_value(m.overshoot) << ','
            << format_value(m.l2_speed_dev) << ',' << format_value(m.terminal_spacing_error) << ','
            << format_value(m.steady_speed_error) << ',' << format_value(m.steady_spacing_error) << ','
            << format_value(m.min_spacing) << ',' << (m.amplifies ? 1 : 0) << '\n';
    }
    finish(out, path);
}

CsvTable read_numeric_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open '{}'", path.string()));
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::EmptyFile, fmt::format("'{}' is empty", path.string()));
    {
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) table.header.push_back(cell);
    }
    table.columns.resize(table.header.size());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::size_t col = 0;
        for (std::string cell; std::getline(ss, cell, ','); ++col) {
            if (col >= table.columns.size()) {
                throw Error(ErrorCode::ParseError, fmt::format("{}:{}: too many fields", path.string(), line_no));
            }
            try {
                std::size_t used = 0;
                const double v = std::stod(cell, &used);
                if (used != cell.size()) throw std::invalid_argument(cell);
                table.columns[col].push_back(v);
            } catch (const std::logic_error&) {
                throw Error(ErrorCode::ParseError,
                            fmt::format("{}:{}: '{}' is not a number", path.string(), line_no, cell));
            }
        }
        if (col != table.columns.size()) {
            throw Error(ErrorCode::ParseError, fmt::format("{}:{}: too few fields", path.string(), line_no));
        }
    }
    return table;
}

void write_region_csv(const RegionGrid& grid, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "x,y,m,stable\n";
    for (const auto& c : grid.cells) {
        out << format_value(c.x) << ',' << format_value(c.y) << ',' << c.m << ',' << (c.stable ? 1 : 0)
            << '\n';
    }
    finish(out, path);
}

void write_region_norms_csv(const RegionGrid& grid, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "x,y,m,norm_sum\n";
    for (const auto& c : grid.cells) {
        out << format_value(c.x) << ',' << format_value(c.y) << ',' << c.m << ','
            << format_value(c.norm_sum) << '\n';
    }
    finish(out, path);
}

void write_stability_csv(const StabilityVerdict& v, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "quantity,n,value\n";
    out << "routh_margin,," << format_value(v.routh_margin) << '\n';
    out << "routh_ok,," << (v.routh_ok ? 1 : 0) << '\n';
    out << "beta_bar,," << format_value(v.beta_bar) << '\n';
    out << "beta,," << format_value(v.beta) << '\n';
    out << "gamma_bar,," << format_value(v.gamma_bar) << '\n';
    for (const auto& [n, g] : v.gamma) out << "gamma," << n << ',' << format_value(g) << '\n';
    out << "theorem_ok,," << (v.theorem1_ok ? 1 : 0) << '\n';
    for (const auto& [n, g] : v.hinf_per_channel) out << "hinf," << n << ',' << format_value(g) << '\n';
    out << "norm_sum,," << format_value(v.norm_sum) << '\n';
    out << "norm_ok,," << (v.norm_ok ? 1 : 0) << '\n';
    finish(out, path);
}

void write_metrics_diff_csv(const SimulationResult& a, const SimulationResult& b,
                            const std::filesystem::path& path) {
    if (a.metrics.size() != b.metrics.size()) {
        throw Error(ErrorCode::DimensionMismatch, "metric tables differ in vehicle count");
    }
    auto out = open_out(path);
    out << "vehicle,peak_speed,overshoot,l2_speed_dev,min_spacing,amplifies_a,amplifies_b\n";
    for (std::size_t i = 0; i < a.metrics.size(); ++i) {
        const auto& ma = a.metrics[i];
        const auto& mb = b.metrics[i];
        out << i << ',' << format_value(mb.peak_speed - ma.peak_speed) << ','
            << format_value(mb.overshoot - ma.overshoot) << ','
            << format_value(mb.l2_speed_dev - ma.l2_speed_dev) << ','
            << format_value(mb.min_spacing - ma.min_spacing) << ',' << (ma.amplifies ? 1 : 0) << ','
            << (mb.amplifies ? 1 : 0) << '\n';
    }
    finish(out, path);
}

}  // namespace platoon
