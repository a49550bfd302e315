#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "iosim/engine.hpp"
#include "iosim/parameters.hpp"

namespace iosim {

// Half-open in spirit, inclusive in samples: a sample at time t belongs to
// the span when start_ms <= t <= end_ms (with a small tolerance for the
// floating sample grid).
struct Span {
    double start_ms = 0.0;
    double end_ms = 0.0;
};

// Box-plot statistics of the signed deviation (test - reference) over one
// span, pooled across neurons and samples. Quartiles use linear
// interpolation; whiskers are the most extreme samples within 1.5 IQR of
// the quartiles. Non-finite sample pairs are excluded and counted.
struct SpanStats {
    Span span;
    std::int64_t sample_count = 0;
    double max_abs_mv = 0.0;
    double mean_mv = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double lo_whisker = 0.0;
    double hi_whisker = 0.0;
};

struct DeviationReport {
    std::vector<SpanStats> spans;
    double global_max_abs_mv = 0.0;  // over the whole trace, not just the spans
    std::int64_t nonfinite_count = 0;
};

// Signed somatic-voltage deviation statistics between two traces recorded
// on identical sampling grids. Throws ContractError on shape mismatch.
DeviationReport compare(const TraceRecord& reference, const TraceRecord& test,
                        const std::vector<Span>& spans);

std::string report_to_json(const DeviationReport& report);
void save_report_json(const DeviationReport& report, const std::string& path);

// Upward threshold crossings per neuron.
std::vector<int> spike_count(const TraceRecord& trace, double threshold_mv);

// Knobs of the numerical stress test. The reference values are the desk
// defaults committed in configs/stress64.json; they were tuned once
// against the f64 engine so that the scenario reliably evokes spikes.
struct StressKnobs {
    double jitter_sigma = 0.15;       // lognormal sigma on channel conductances
    double pulse_rate_hz = 8.0;       // Poisson rate of current pulses per neuron
    double pulse_amplitude = -15.0;   // uA/cm^2; negative depolarizes
    double pulse_width_ms = 5.0;
    double duration_ms = 1000.0;
};

// A fully resolved stress scenario: base parameters, the drawn per-neuron
// conductance jitter factors and the drawn pulse schedule. Serializes
// byte-reproducibly; building twice from the same inputs gives identical
// files.
struct StressScenario {
    Eigen::Index n = 0;
    std::uint64_t seed = 0;
    StressKnobs knobs;
    CellParameters base;
    std::map<std::string, Eigen::ArrayXd> conductance_factors;  // channel -> factor per neuron
    std::vector<StimulusPulse> pulses;

    // Base parameters with the jitter applied and the pulses installed.
    CellParameters apply() const;
};

// Draws jitter factors (exp(sigma * z), one per neuron and channel
// conductance) and per-neuron Poisson pulse trains over the scenario
// duration, all from one seeded stream.
StressScenario build_stress_scenario(const CellParameters& base, Eigen::Index n,
                                     std::uint64_t seed, const StressKnobs& knobs);

std::string scenario_to_json(const StressScenario& scenario);
StressScenario scenario_from_json(const std::string& text);
void save_scenario_json(const StressScenario& scenario, const std::string& path);
StressScenario load_scenario_json(const std::string& path);

}  // namespace iosim
