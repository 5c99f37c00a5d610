#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "platoon/config.hpp"
#include "platoon/csv_io.hpp"
#include "platoon/error.hpp"
#include "platoon/freq_analysis.hpp"
#include "platoon/region.hpp"
#include "platoon/simulation.hpp"

namespace fs = std::filesystem;
using namespace platoon;

namespace {

int thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("PLATOON_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
    }
    return 0;
}

LoadedConfig load(const std::string& path, const std::vector<std::string>& overrides) {
    if (!fs::exists(path)) throw Error(ErrorCode::IoError, fmt::format("config '{}' does not exist", path));
    return parse_config(path, overrides);
}

const ValidatedConfig& require_platoon(const LoadedConfig& cfg) {
    if (!cfg.platoon) throw Error(ErrorCode::ParseError, "config has no vehicles section");
    return *cfg.platoon;
}

void print_metrics(const SimulationResult& r, const char* label) {
    std::cout << fmt::format("{:>8} {:>4} {:>10} {:>10} {:>12} {:>12} {:>10}\n", label, "veh", "peak_v",
                             "overshoot", "l2_dev", "term_sp_err", "min_sp");
    for (std::size_t i = 0; i < r.metrics.size(); ++i) {
        const auto& m = r.metrics[i];
        std::cout << fmt::format("{:>8} {:>4} {:>10.4f} {:>10.4f} {:>12.4f} {:>12.3e} {:>10.3f}{}\n", "", i,
                                 m.peak_speed, m.overshoot, m.l2_speed_dev, m.terminal_spacing_error,
                                 m.min_spacing, m.amplifies ? "  amplifies" : "");
    }
}

void print_verdict(const StabilityVerdict& v, const std::string& label) {
    std::cout << label << ": routh " << (v.routh_ok ? "ok" : "FAIL") << " (margin "
              << format_value(v.routh_margin) << "), analytic " << (v.theorem1_ok ? "ok" : "inconclusive")
              << ", norm sum " << format_value(v.norm_sum) << " -> "
              << (v.norm_ok ? "string stable" : "not string stable") << '\n';
}

ChannelParams template_channel(const RegionTemplate& t, std::size_t m) {
    ChannelParams p =
        ChannelParams::homogeneous(t.alpha, t.b, t.c, t.tau, t.h, m, t.comm_delay, t.actuation_delay);
    if (t.pole_placement) {
        const Gains g = pole_placement_gains(t.pole, t.h, m, t.tau);
        p.alpha = g.alpha;
        p.b = g.b;
        p.c = g.c;
    }
    return p;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Predictor-based multi-predecessor platoon simulation and analysis"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    int threads = 0;

    auto add_common = [&](CLI::App* cmd, bool needs_out) {
        cmd->add_option("-c,--config", config_path, "YAML configuration file")->required();
        cmd->add_option("-s,--set", overrides, "Override a config key, e.g. platoon.D=0");
        if (needs_out) cmd->add_option("-o,--out", out_dir, "Output directory");
    };

    auto* simulate = app.add_subcommand("simulate", "Run a closed-loop simulation and write CSV series");
    add_common(simulate, true);

    auto* compare = app.add_subcommand("compare", "Run configured predecessors vs one predecessor each");
    add_common(compare, true);

    std::vector<std::size_t> analyze_m{1, 2, 3};
    auto* analyze = app.add_subcommand("analyze", "String stability verdicts per follower");
    add_common(analyze, true);
    analyze->add_option("--m", analyze_m, "Predecessor counts for an analysis template")->delimiter(',');

    std::string axis1_text;
    std::string axis2_text;
    std::vector<std::size_t> region_m{1, 2, 3};
    auto* region = app.add_subcommand("region", "Sweep a two-parameter string stability region");
    add_common(region, true);
    region->add_option("--x", axis1_text, "First axis name:lo:hi:steps (h, dc, D, p)")->required();
    region->add_option("--y", axis2_text, "Second axis name:lo:hi:steps")->required();
    region->add_option("--m", region_m, "Predecessor counts")->delimiter(',');
    region->add_option("-j,--threads", threads, "Worker threads (default: PLATOON_THREADS or all)");

    double pole = -2.0;
    double gain_h = 1.0;
    double gain_tau = 0.1;
    std::size_t gain_m = 1;
    auto* gains = app.add_subcommand("gains", "Gains placing the three closed-loop poles at p");
    gains->add_option("-p,--pole", pole, "Real closed-loop pole (negative)")->required();
    gains->add_option("--headway", gain_h, "Time headway");
    gains->add_option("--m", gain_m, "Number of predecessors");
    gains->add_option("--tau", gain_tau, "Actuator lag");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error[CliUsage]: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*simulate) {
            const LoadedConfig cfg = load(config_path, overrides);
            const SimulationResult r = run_scenario(require_platoon(cfg));
            write_timeseries_csv(r, out_dir);
            print_metrics(r, "run");
        } else if (*compare) {
            const LoadedConfig cfg = load(config_path, overrides);
            const ValidatedConfig& mpf = require_platoon(cfg);
            const ValidatedConfig single = validate_platoon(with_single_predecessor(mpf.config()));
            const auto results = run_batch({mpf, single}, thread_count(threads));
            write_timeseries_csv(results[0], fs::path(out_dir) / "mpf");
            write_timeseries_csv(results[1], fs::path(out_dir) / "single");
            write_metrics_diff_csv(results[0], results[1], fs::path(out_dir) / "diff_metrics.csv");
            print_metrics(results[0], "mpf");
            print_metrics(results[1], "single");
        } else if (*analyze) {
            const LoadedConfig cfg = load(config_path, overrides);
            fs::create_directories(out_dir);
            if (cfg.platoon) {
                const auto& vc = *cfg.platoon;
                for (std::size_t i = 1; i < vc.vehicle_count(); ++i) {
                    const ChannelParams p =
                        channel_from_platoon(vc.config().vehicles, i, vc.config().actuation_delay);
                    const StabilityVerdict v = analyze_channel(p);
                    print_verdict(v, fmt::format("vehicle {} (m={})", i, p.m));
                    write_stability_csv(v, fs::path(out_dir) / fmt::format("stability_veh{}.csv", i));
                }
            }
            if (cfg.analysis) {
                for (const std::size_t m : analyze_m) {
                    const StabilityVerdict v = analyze_channel(template_channel(*cfg.analysis, m));
                    print_verdict(v, fmt::format("template m={}", m));
                    write_stability_csv(v, fs::path(out_dir) / fmt::format("stability_m{}.csv", m));
                }
            }
        } else if (*region) {
            const LoadedConfig cfg = load(config_path, overrides);
            const RegionTemplate base = cfg.analysis.value_or(RegionTemplate{});
            const AxisSpec ax1 = parse_axis(axis1_text);
            const AxisSpec ax2 = parse_axis(axis2_text);
            const RegionGrid grid = region_sweep(base, ax1, ax2, region_m, {}, thread_count(threads));
            fs::create_directories(out_dir);
            write_region_csv(grid, fs::path(out_dir) / "grid.csv");
            write_region_norms_csv(grid, fs::path(out_dir) / "norms.csv");
            std::size_t stable = 0;
            for (const auto& c : grid.cells) stable += c.stable ? 1 : 0;
            std::cout << fmt::format("{} of {} cells string stable\n", stable, grid.cells.size());
        } else if (*gains) {
            const Gains g = pole_placement_gains(pole, gain_h, gain_m, gain_tau);
            std::cout << "alpha," << format_value(g.alpha) << "\nb," << format_value(g.b) << "\nc,"
                      << format_value(g.c) << '\n';
        }
    } catch (const Error& e) {
        std::cerr << "error[" << to_string(e.code()) << "]: " << e.what() << '\n';
        return 1;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error[IoError]: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error[Internal]: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
