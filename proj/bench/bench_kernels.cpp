// Serial reference versus OpenMP kernels. The thread count is the benchmark
// argument; 0 selects the serial reference.

#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "platoon/config.hpp"
#include "platoon/region.hpp"
#include "platoon/simulation.hpp"

using namespace platoon;

namespace {

RegionTemplate region_template() {
    RegionTemplate t;
    t.tau = 0.1;
    t.actuation_delay = 0.7;
    return t;
}

std::vector<ValidatedConfig> batch_configs() {
    std::vector<ValidatedConfig> out;
    const std::string path = std::string(PLATOON_SOURCE_DIR) + "/configs/cut_in.yaml";
    for (const char* d : {"0", "0.2", "0.4", "0.7"}) {
        for (const char* h : {"0.3", "0.5"}) {
            const LoadedConfig cfg =
                parse_config(path, {std::string("platoon.D=") + d, std::string("vehicles.3.h=") + h, "platoon.T=60"});
            out.push_back(*cfg.platoon);
        }
    }
    return out;
}

void BM_RegionSweep(benchmark::State& state) {
    const RegionTemplate base = region_template();
    const AxisSpec hx = parse_axis("h:0.02:2:24");
    const AxisSpec dcy = parse_axis("dc:0:0.49:24");
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state) {
        RegionGrid g = threads == 0 ? region_sweep_serial(base, hx, dcy, {1, 2, 3})
                                    : region_sweep(base, hx, dcy, {1, 2, 3}, {}, threads);
        benchmark::DoNotOptimize(g.cells.data());
    }
    state.SetItemsProcessed(state.iterations() * 3 * 24 * 24);
}

void BM_RunBatch(benchmark::State& state) {
    const std::vector<ValidatedConfig> configs = batch_configs();
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state) {
        if (threads == 0) {
            for (const auto& c : configs) {
                SimulationResult r = run_scenario(c);
                benchmark::DoNotOptimize(r.speed.data());
            }
        } else {
            auto results = run_batch(configs, threads);
            benchmark::DoNotOptimize(results.data());
        }
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(configs.size()));
}

}  // namespace

BENCHMARK(BM_RegionSweep)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RunBatch)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
