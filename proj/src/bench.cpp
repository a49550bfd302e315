#include "iosim/bench.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "iosim/errors.hpp"
#include "iosim/topology.hpp"

namespace iosim {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string to_string(NetworkMode m) {
    return m == NetworkMode::connected ? "connected" : "unconnected";
}

SweepSpec SweepSpec::small_sweep() {
    SweepSpec s;
    for (int d = 4; d <= 20; ++d) s.dims.push_back(d);
    return s;
}

SweepSpec SweepSpec::large_sweep() {
    SweepSpec s;
    for (int d = 30; d <= 100; d += 10) s.dims.push_back(d);
    return s;
}

void SweepSpec::validate() const {
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (dims[i] < 2) throw ConfigError("sweep dimensions must be >= 2");
        if (i > 0 && dims[i] <= dims[i - 1])
            throw ConfigError("sweep dimensions must be strictly increasing");
    }
}

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

double predicted_memory_bytes(int grid_dim, const BenchOptions& opt, NetworkMode mode) {
    const double n = double(grid_dim) * grid_dim * grid_dim;
    const double scalar_width = opt.base.precision == Precision::f64 ? 8.0 : 4.0;
    const double state = 14.0 * n * scalar_width * 2.0;          // double-buffered state
    const double params = 24.0 * n * 8.0 + 29.0 * n * scalar_width;  // double + cast copies
    const double edges =
        mode == NetworkMode::connected ? opt.base.avg_degree * n * 2.0 * 4.0 : 0.0;
    const double trace = (double(opt.base.sample_count()) + 1.0) * n * 8.0;
    return state + params + edges + trace;
}

std::vector<BenchResult> bench(const SweepSpec& spec, NetworkMode mode, const BenchOptions& opt) {
    spec.validate();
    if (opt.runs < 1) throw ConfigError("bench: runs must be >= 1");

    std::vector<BenchResult> results;
    for (int d : spec.dims) {
        BenchResult r;
        r.mode = to_string(mode);
        r.n_cells = std::int64_t(d) * d * d;
        r.precision = to_string(opt.base.precision);
        r.thread_count = opt.base.thread_count;
        r.timestamp = utc_timestamp();
        r.version = kVersion;
        r.simulated_ms = opt.base.duration_ms;

        const double predicted = predicted_memory_bytes(d, opt, mode);
        if (predicted > opt.memory_budget_bytes) {
            r.skipped = true;
            r.skip_reason = "predicted footprint " + std::to_string(predicted / (1 << 30)) +
                            " GiB exceeds budget " +
                            std::to_string(opt.memory_budget_bytes / (1 << 30)) + " GiB";
            results.push_back(std::move(r));
            continue;
        }

        SimulationConfig cfg = opt.base;
        cfg.grid_dim = d;
        cfg.connected = mode == NetworkMode::connected;

        const auto setup_start = Clock::now();
        Topology topo = cfg.connected
                            ? generate_topology(d, cfg.avg_degree, cfg.r_max, cfg.seed)
                            : Topology::unconnected(d);
        CellParameters params = CellParameters::reference(cfg.neuron_count());
        Simulation sim(cfg, std::move(params), std::move(topo));
        r.setup_seconds = seconds_since(setup_start);

        for (int run = 0; run < opt.runs; ++run) {
            const auto run_start = Clock::now();
            TraceRecord trace = sim.run();
            r.run_seconds.push_back(seconds_since(run_start));
            (void)trace;
        }
        r.run_seconds_min = *std::min_element(r.run_seconds.begin(), r.run_seconds.end());
        r.realtime_factor = (r.simulated_ms / 1000.0) / r.run_seconds_min;
        results.push_back(std::move(r));
    }
    return results;
}

namespace {

json result_to_json(const BenchResult& r) {
    json j{{"mode", r.mode},
           {"n_cells", r.n_cells},
           {"precision", r.precision},
           {"thread_count", r.thread_count},
           {"timestamp", r.timestamp},
           {"version", r.version},
           {"skipped", r.skipped}};
    if (r.skipped) {
        j["skip_reason"] = r.skip_reason;
    } else {
        j["setup_seconds"] = r.setup_seconds;
        j["run_seconds"] = r.run_seconds;
        j["run_seconds_min"] = r.run_seconds_min;
        j["simulated_ms"] = r.simulated_ms;
        j["realtime_factor"] = r.realtime_factor;
    }
    return j;
}

BenchResult result_from_json(const json& j) {
    BenchResult r;
    r.mode = j.at("mode").get<std::string>();
    r.n_cells = j.at("n_cells").get<std::int64_t>();
    r.precision = j.at("precision").get<std::string>();
    r.thread_count = j.at("thread_count").get<int>();
    r.timestamp = j.at("timestamp").get<std::string>();
    r.version = j.at("version").get<std::string>();
    r.skipped = j.at("skipped").get<bool>();
    if (r.skipped) {
        r.skip_reason = j.at("skip_reason").get<std::string>();
    } else {
        r.setup_seconds = j.at("setup_seconds").get<double>();
        r.run_seconds = j.at("run_seconds").get<std::vector<double>>();
        r.run_seconds_min = j.at("run_seconds_min").get<double>();
        r.simulated_ms = j.at("simulated_ms").get<double>();
        r.realtime_factor = j.at("realtime_factor").get<double>();
    }
    return r;
}

}  // namespace

std::string bench_results_to_json(const std::vector<BenchResult>& results) {
    json arr = json::array();
    for (const auto& r : results) arr.push_back(result_to_json(r));
    return arr.dump(2) + "\n";
}

std::vector<BenchResult> bench_results_from_json(const std::string& text) {
    json arr;
    try {
        arr = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("cannot parse bench results: ") + e.what());
    }
    std::vector<BenchResult> results;
    for (const json& j : arr) results.push_back(result_from_json(j));
    return results;
}

void save_bench_json(const std::vector<BenchResult>& results, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << bench_results_to_json(results);
}

void emit_plot_data(const std::vector<BenchResult>& results, std::ostream& out) {
    if (results.empty()) throw ContractError("emit_plot_data: empty result list");

    std::vector<const BenchResult*> rows;
    double simulated_ms = 0.0;
    for (const auto& r : results) {
        if (r.skipped) continue;
        rows.push_back(&r);
        simulated_ms = r.simulated_ms;
    }
    std::sort(rows.begin(), rows.end(), [](const BenchResult* a, const BenchResult* b) {
        return std::pair(a->n_cells, a->mode) < std::pair(b->n_cells, b->mode);
    });

    out << "n_cells,run_seconds_min,realtime_factor,mode\n";
    for (const BenchResult* r : rows)
        out << r->n_cells << ',' << r->run_seconds_min << ',' << r->realtime_factor << ','
            << r->mode << '\n';

    // Biological scale markers, shown as running in real time.
    const double rt_seconds = simulated_ms / 1000.0;
    out << 10000 << ',' << rt_seconds << ",1,reference-mouse-io\n";
    out << 1000000 << ',' << rt_seconds << ",1,reference-human-io-low\n";
    out << 10000000 << ',' << rt_seconds << ",1,reference-human-io-high\n";
}

}  // namespace iosim
