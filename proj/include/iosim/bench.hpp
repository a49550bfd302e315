#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "iosim/engine.hpp"

namespace iosim {

inline constexpr const char* kVersion = "iosim 0.1.0";

enum class NetworkMode { unconnected, connected };
std::string to_string(NetworkMode m);

// Grid dimensions to sweep. The small sweep matches the sizes any desktop
// handles; the large sweep is guarded by the memory budget.
struct SweepSpec {
    std::vector<int> dims;
    static SweepSpec small_sweep();  // d in [4, 20]
    static SweepSpec large_sweep();  // d in {30, 40, ..., 100}
    void validate() const;           // dims >= 2, strictly increasing
};

// One timed sweep entry. Setup (topology generation, state initialization,
// engine construction) is measured separately from the timed runs; the
// run list keeps all wall-clock measurements so both min and spread can be
// read off.
struct BenchResult {
    std::string mode;
    std::int64_t n_cells = 0;
    double setup_seconds = 0.0;
    std::vector<double> run_seconds;
    double run_seconds_min = 0.0;
    double simulated_ms = 0.0;
    double realtime_factor = 0.0;  // simulated seconds per wall second
    std::string precision;
    int thread_count = 0;
    std::string timestamp;
    std::string version;
    bool skipped = false;
    std::string skip_reason;
};

struct BenchOptions {
    SimulationConfig base;                          // duration, dt, precision, seed, threads
    int runs = 5;
    double memory_budget_bytes = 8.0 * (1ull << 30);  // large-sweep guard
};

// Predicted resident footprint of one configured simulation, used by the
// memory guard.
double predicted_memory_bytes(int grid_dim, const BenchOptions& opt, NetworkMode mode);

// Runs the sweep strictly sequentially: per size, one setup, then
// `opt.runs` timed runs of the configured biological duration. Entries
// over the memory budget are recorded as skipped instead of run.
std::vector<BenchResult> bench(const SweepSpec& spec, NetworkMode mode, const BenchOptions& opt);

std::string bench_results_to_json(const std::vector<BenchResult>& results);
std::vector<BenchResult> bench_results_from_json(const std::string& text);
void save_bench_json(const std::vector<BenchResult>& results, const std::string& path);

// Plot-ready CSV of (n_cells, run_seconds_min, realtime_factor, mode),
// sorted by n_cells, with reference rows marking the mouse (1e4) and human
// (1e6..1e7) inferior-olive scales as running in real time.
void emit_plot_data(const std::vector<BenchResult>& results, std::ostream& out);

}  // namespace iosim
