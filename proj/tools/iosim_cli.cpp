// Command-line front end: simulate / bench / validate / stress / topology.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 contract
// violation, 4 numerical divergence.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iosim/analysis.hpp"
#include "iosim/bench.hpp"
#include "iosim/engine.hpp"
#include "iosim/errors.hpp"
#include "iosim/topology.hpp"
#include "iosim/trace.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitContract = 3;
constexpr int kExitDivergence = 4;

struct CommonSimFlags {
    int size = 4;
    double duration_ms = 100.0;
    double dt_ms = 0.025;
    int steps_per_sample = 40;
    std::string precision = "f64";
    std::uint64_t seed = 1;
    int threads = 0;
    double avg_degree = 10.0;
    double r_max = 4.0;
};

void add_sim_flags(CLI::App* cmd, CommonSimFlags& f) {
    cmd->add_option("--size", f.size, "Grid dimension d; the network has d^3 neurons")
        ->check(CLI::Range(2, 1024));
    cmd->add_option("--duration-ms", f.duration_ms, "Biological time to simulate");
    cmd->add_option("--dt", f.dt_ms, "Integration step in ms");
    cmd->add_option("--steps-per-sample", f.steps_per_sample,
                    "Fused integration steps per recorded sample");
    cmd->add_option("--precision", f.precision, "f64, f32 or f32-approx-exp");
    cmd->add_option("--seed", f.seed, "Seed for topology and scenario generation");
    cmd->add_option("--threads", f.threads, "Worker threads (0 = hardware concurrency)");
    cmd->add_option("--avg-degree", f.avg_degree, "Target mean gap junctions per neuron");
    cmd->add_option("--rmax", f.r_max, "Connection radius in grid units");
}

iosim::SimulationConfig to_config(const CommonSimFlags& f, bool connected) {
    iosim::SimulationConfig cfg;
    cfg.grid_dim = f.size;
    cfg.connected = connected;
    cfg.duration_ms = f.duration_ms;
    cfg.dt_ms = f.dt_ms;
    cfg.steps_per_sample = f.steps_per_sample;
    cfg.precision = iosim::precision_from_string(f.precision);
    cfg.seed = f.seed;
    cfg.thread_count = f.threads;
    cfg.avg_degree = f.avg_degree;
    cfg.r_max = f.r_max;
    return cfg;
}

iosim::Topology make_topology(const iosim::SimulationConfig& cfg) {
    return cfg.connected
               ? iosim::generate_topology(cfg.grid_dim, cfg.avg_degree, cfg.r_max, cfg.seed)
               : iosim::Topology::unconnected(cfg.grid_dim);
}

std::vector<iosim::Span> parse_spans(const std::string& text) {
    std::vector<iosim::Span> spans;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto comma = text.find(',', pos);
        const std::string item = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw iosim::ConfigError("bad span '" + item + "', expected start:end");
        spans.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return spans;
}

std::vector<int> parse_sizes(const std::string& text) {
    std::vector<int> sizes;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto comma = text.find(',', pos);
        const std::string item = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            sizes.push_back(std::stoi(item));
        } else {
            const int lo = std::stoi(item.substr(0, dots));
            const int hi = std::stoi(item.substr(dots + 2));
            for (int d = lo; d <= hi; ++d) sizes.push_back(d);
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return sizes;
}

int cmd_simulate(const CommonSimFlags& flags, bool connected, const std::string& params_path,
                 const std::string& out_path, const std::string& dump_state_path) {
    iosim::SimulationConfig cfg = to_config(flags, connected);
    cfg.record_final_state = !dump_state_path.empty();
    cfg.validate();

    iosim::CellParameters params =
        params_path.empty() ? iosim::CellParameters::reference(cfg.neuron_count())
                            : iosim::load_parameters_json(params_path, cfg.neuron_count());
    iosim::Simulation sim(cfg, std::move(params), make_topology(cfg));
    iosim::TraceRecord trace = sim.run();

    iosim::write_trace_csv(trace, out_path);
    iosim::write_trace_sidecar(trace, out_path + ".json");
    if (!dump_state_path.empty() && trace.final_state)
        iosim::write_state_csv(*trace.final_state, dump_state_path);

    std::cout << "wrote " << trace.sample_count() << " samples x " << trace.neuron_count()
              << " neurons to " << out_path << "\n";
    return kExitOk;
}

int cmd_topology(int size, double avg_degree, double r_max, std::uint64_t seed,
                 const std::string& out_path) {
    const iosim::Topology topo = iosim::generate_topology(size, avg_degree, r_max, seed);
    iosim::write_topology_csv(topo, out_path, out_path + ".json");
    std::cout << "wrote " << topo.edge_count() << " directed edges to " << out_path << "\n";
    return kExitOk;
}

int cmd_validate(const std::string& ref_path, const std::string& test_path,
                 const std::string& spans_text, const std::string& out_path) {
    const iosim::TraceRecord ref = iosim::read_trace_csv(ref_path);
    const iosim::TraceRecord test = iosim::read_trace_csv(test_path);

    std::vector<iosim::Span> spans;
    if (!spans_text.empty()) {
        spans = parse_spans(spans_text);
    } else {
        // First and last second of the recording.
        const double t_end = ref.times.empty() ? 0.0 : ref.times.back();
        spans.push_back({0.0, std::min(1000.0, t_end)});
        spans.push_back({std::max(0.0, t_end - 1000.0), t_end});
    }

    const iosim::DeviationReport report = iosim::compare(ref, test, spans);
    if (out_path.empty())
        std::cout << iosim::report_to_json(report);
    else
        iosim::save_report_json(report, out_path);
    return kExitOk;
}

int cmd_stress(const CommonSimFlags& flags, const std::string& scenario_path,
               const std::string& scenario_out, double jitter_sigma, double pulse_rate,
               double pulse_amp, double pulse_width, const std::string& out_path,
               const std::string& spikes_path) {
    iosim::SimulationConfig cfg = to_config(flags, true);

    iosim::StressScenario scenario;
    if (!scenario_path.empty()) {
        scenario = iosim::load_scenario_json(scenario_path);
        if (scenario.n != cfg.neuron_count())
            throw iosim::ConfigError("scenario is for " + std::to_string(scenario.n) +
                                     " neurons but --size gives " +
                                     std::to_string(cfg.neuron_count()));
    } else {
        iosim::StressKnobs knobs;
        knobs.jitter_sigma = jitter_sigma;
        knobs.pulse_rate_hz = pulse_rate;
        knobs.pulse_amplitude = pulse_amp;
        knobs.pulse_width_ms = pulse_width;
        knobs.duration_ms = cfg.duration_ms;
        scenario = iosim::build_stress_scenario(
            iosim::CellParameters::reference(cfg.neuron_count()), cfg.neuron_count(), cfg.seed,
            knobs);
    }
    if (!scenario_out.empty()) iosim::save_scenario_json(scenario, scenario_out);

    cfg.duration_ms = scenario.knobs.duration_ms;
    cfg.validate();
    iosim::Simulation sim(cfg, scenario.apply(), make_topology(cfg));
    iosim::TraceRecord trace = sim.run();

    if (!out_path.empty()) {
        iosim::write_trace_csv(trace, out_path);
        iosim::write_trace_sidecar(trace, out_path + ".json");
    }
    if (!spikes_path.empty()) {
        const std::vector<int> counts = iosim::spike_count(trace, 0.0);
        std::ofstream out(spikes_path);
        if (!out) throw iosim::ConfigError("cannot write " + spikes_path);
        out << "neuron,spikes\n";
        for (std::size_t i = 0; i < counts.size(); ++i) out << i << ',' << counts[i] << '\n';
    }
    std::cout << "stress run finished; first_nonfinite_sample = " << trace.first_nonfinite_sample
              << "\n";
    return kExitOk;
}

int cmd_bench(const CommonSimFlags& flags, const std::string& sizes_text, const std::string& mode,
              int runs, double mem_budget_gb, const std::string& out_path,
              const std::string& plot_path) {
    iosim::SweepSpec spec;
    spec.dims = sizes_text.empty() ? iosim::SweepSpec::small_sweep().dims
                                   : parse_sizes(sizes_text);

    iosim::BenchOptions opt;
    opt.base = to_config(flags, true);
    opt.runs = runs;
    opt.memory_budget_bytes = mem_budget_gb * double(1ull << 30);

    std::vector<iosim::BenchResult> results;
    const auto run_mode = [&](iosim::NetworkMode m) {
        auto part = iosim::bench(spec, m, opt);
        results.insert(results.end(), part.begin(), part.end());
    };
    if (mode == "unconnected" || mode == "both") run_mode(iosim::NetworkMode::unconnected);
    if (mode == "connected" || mode == "both") run_mode(iosim::NetworkMode::connected);
    if (mode != "unconnected" && mode != "connected" && mode != "both")
        throw iosim::ConfigError("--mode must be unconnected, connected or both");

    if (out_path.empty())
        std::cout << iosim::bench_results_to_json(results);
    else
        iosim::save_bench_json(results, out_path);

    if (!plot_path.empty()) {
        std::ofstream plot(plot_path);
        if (!plot) throw iosim::ConfigError("cannot write " + plot_path);
        iosim::emit_plot_data(results, plot);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Inferior-olive network simulator and benchmark harness"};
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Integrate a network and record a trace");
    CommonSimFlags sim_flags;
    add_sim_flags(simulate, sim_flags);
    bool connected_flag = true;
    simulate->add_flag("--connected,!--unconnected", connected_flag,
                       "Couple neurons with gap junctions (default on)");
    std::string sim_params, sim_out = "trace.csv", sim_dump_state;
    simulate->add_option("--params", sim_params, "Parameter JSON file");
    simulate->add_option("--out", sim_out, "Trace CSV output path")->required();
    simulate->add_option("--dump-final-state", sim_dump_state,
                         "Write the final full state matrix to this CSV");

    // topology
    auto* topology = app.add_subcommand("topology", "Generate a gap-junction edge list");
    int topo_size = 4;
    double topo_degree = 10.0, topo_rmax = 4.0;
    std::uint64_t topo_seed = 1;
    std::string topo_out = "edges.csv";
    topology->add_option("--size", topo_size, "Grid dimension d")->check(CLI::Range(2, 1024));
    topology->add_option("--avg-degree", topo_degree, "Target mean directed degree");
    topology->add_option("--rmax", topo_rmax, "Connection radius in grid units");
    topology->add_option("--seed", topo_seed, "RNG seed");
    topology->add_option("--out", topo_out, "Edge CSV output path")->required();

    // validate
    auto* validate = app.add_subcommand("validate", "Compare two traces and report deviations");
    std::string val_ref, val_test, val_spans, val_out;
    validate->add_option("--ref", val_ref, "Reference trace CSV")->required();
    validate->add_option("--test", val_test, "Test trace CSV")->required();
    validate->add_option("--spans", val_spans,
                         "Comma-separated start:end spans in ms (default: first and last second)");
    validate->add_option("--out", val_out, "Report JSON path (default: stdout)");

    // stress
    auto* stress = app.add_subcommand("stress", "Run the numerical stress scenario");
    CommonSimFlags stress_flags;
    stress_flags.duration_ms = 1000.0;
    add_sim_flags(stress, stress_flags);
    std::string stress_scenario, stress_scenario_out, stress_out, stress_spikes;
    double stress_sigma = 0.15, stress_rate = 8.0, stress_amp = -15.0, stress_width = 5.0;
    stress->add_option("--scenario", stress_scenario, "Load a frozen scenario JSON");
    stress->add_option("--scenario-out", stress_scenario_out, "Write the resolved scenario JSON");
    stress->add_option("--jitter-sigma", stress_sigma, "Lognormal sigma on conductances");
    stress->add_option("--pulse-rate", stress_rate, "Poisson pulse rate per neuron (Hz)");
    stress->add_option("--pulse-amp", stress_amp, "Pulse amplitude (uA/cm^2, negative depolarizes)");
    stress->add_option("--pulse-width", stress_width, "Pulse width (ms)");
    stress->add_option("--out", stress_out, "Trace CSV output path");
    stress->add_option("--spikes", stress_spikes, "Per-neuron spike count CSV");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "Timed size sweeps");
    CommonSimFlags bench_flags;
    add_sim_flags(bench_cmd, bench_flags);
    std::string bench_sizes, bench_mode = "both", bench_out, bench_plot;
    int bench_runs = 5;
    double bench_budget_gb = 8.0;
    bench_cmd->add_option("--sizes", bench_sizes, "Grid dims, e.g. 4,5,6 or 4..20 (default 4..20)");
    bench_cmd->add_option("--mode", bench_mode, "unconnected, connected or both");
    bench_cmd->add_option("--runs", bench_runs, "Timed runs per entry");
    bench_cmd->add_option("--mem-budget-gb", bench_budget_gb, "Memory guard for large sweeps");
    bench_cmd->add_option("--out", bench_out, "Results JSON path (default: stdout)");
    bench_cmd->add_option("--plot-csv", bench_plot, "Plot-ready CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (simulate->parsed())
            return cmd_simulate(sim_flags, connected_flag, sim_params, sim_out, sim_dump_state);
        if (topology->parsed())
            return cmd_topology(topo_size, topo_degree, topo_rmax, topo_seed, topo_out);
        if (validate->parsed()) return cmd_validate(val_ref, val_test, val_spans, val_out);
        if (stress->parsed())
            return cmd_stress(stress_flags, stress_scenario, stress_scenario_out, stress_sigma,
                              stress_rate, stress_amp, stress_width, stress_out, stress_spikes);
        if (bench_cmd->parsed())
            return cmd_bench(bench_flags, bench_sizes, bench_mode, bench_runs, bench_budget_gb,
                             bench_out, bench_plot);
    } catch (const iosim::DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const iosim::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const iosim::ContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitContract;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitContract;
    }
    return kExitOk;
}
