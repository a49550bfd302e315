#include "iosim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "iosim/errors.hpp"
#include "iosim/json_io.hpp"
#include "iosim/rng.hpp"

namespace iosim {

using nlohmann::json;

namespace {

constexpr double kGridTolMs = 1e-9;

// Linear-interpolation quantile of sorted data.
double quantile_sorted(const std::vector<double>& x, double p) {
    if (x.empty()) return 0.0;
    const double pos = p * double(x.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - double(lo);
    return x[lo] + frac * (x[hi] - x[lo]);
}

SpanStats span_statistics(const Span& span, std::vector<double>&& deviations) {
    SpanStats st;
    st.span = span;
    st.sample_count = static_cast<std::int64_t>(deviations.size());
    if (deviations.empty()) return st;

    double sum = 0.0;
    double max_abs = 0.0;
    for (double d : deviations) {
        sum += d;
        max_abs = std::max(max_abs, std::abs(d));
    }
    st.mean_mv = sum / double(deviations.size());
    st.max_abs_mv = max_abs;

    std::sort(deviations.begin(), deviations.end());
    st.q1 = quantile_sorted(deviations, 0.25);
    st.median = quantile_sorted(deviations, 0.50);
    st.q3 = quantile_sorted(deviations, 0.75);

    const double iqr = st.q3 - st.q1;
    const double lo_fence = st.q1 - 1.5 * iqr;
    const double hi_fence = st.q3 + 1.5 * iqr;
    st.lo_whisker = *std::find_if(deviations.begin(), deviations.end(),
                                  [&](double d) { return d >= lo_fence; });
    for (auto it = deviations.rbegin(); it != deviations.rend(); ++it)
        if (*it <= hi_fence) {
            st.hi_whisker = *it;
            break;
        }
    return st;
}

}  // namespace

DeviationReport compare(const TraceRecord& reference, const TraceRecord& test,
                        const std::vector<Span>& spans) {
    if (reference.neuron_count() != test.neuron_count())
        throw ContractError("compare: traces disagree on neuron count");
    if (reference.sample_count() != test.sample_count())
        throw ContractError("compare: traces disagree on sample count");
    for (std::size_t k = 0; k < reference.times.size(); ++k)
        if (std::abs(reference.times[k] - test.times[k]) > kGridTolMs)
            throw ContractError("compare: traces recorded on different sampling grids");

    const Eigen::Index rows = reference.sample_count();
    const Eigen::Index n = reference.neuron_count();

    DeviationReport report;
    for (Eigen::Index k = 0; k < rows; ++k) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double a = reference.v_soma(k, i);
            const double b = test.v_soma(k, i);
            if (!std::isfinite(a) || !std::isfinite(b)) {
                ++report.nonfinite_count;
                continue;
            }
            report.global_max_abs_mv = std::max(report.global_max_abs_mv, std::abs(b - a));
        }
    }

    for (const Span& span : spans) {
        if (span.start_ms > span.end_ms)
            throw ContractError("compare: span with start_ms > end_ms");
        if (span.start_ms < reference.times.front() - kGridTolMs ||
            span.end_ms > reference.times.back() + kGridTolMs)
            throw ContractError("compare: span outside the trace bounds");
        std::vector<double> dev;
        for (Eigen::Index k = 0; k < rows; ++k) {
            const double t = reference.times[static_cast<std::size_t>(k)];
            if (t < span.start_ms - kGridTolMs || t > span.end_ms + kGridTolMs) continue;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double a = reference.v_soma(k, i);
                const double b = test.v_soma(k, i);
                if (std::isfinite(a) && std::isfinite(b)) dev.push_back(b - a);
            }
        }
        report.spans.push_back(span_statistics(span, std::move(dev)));
    }
    return report;
}

std::string report_to_json(const DeviationReport& report) {
    json spans = json::array();
    for (const SpanStats& s : report.spans)
        spans.push_back({{"start_ms", s.span.start_ms},
                         {"end_ms", s.span.end_ms},
                         {"sample_count", s.sample_count},
                         {"max_abs_mv", s.max_abs_mv},
                         {"mean_mv", s.mean_mv},
                         {"q1", s.q1},
                         {"median", s.median},
                         {"q3", s.q3},
                         {"lo_whisker", s.lo_whisker},
                         {"hi_whisker", s.hi_whisker}});
    json j{{"spans", spans},
           {"global_max_abs_mv", report.global_max_abs_mv},
           {"nonfinite_count", report.nonfinite_count}};
    return j.dump(2) + "\n";
}

void save_report_json(const DeviationReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << report_to_json(report);
}

std::vector<int> spike_count(const TraceRecord& trace, double threshold_mv) {
    const Eigen::Index n = trace.neuron_count();
    std::vector<int> counts(static_cast<std::size_t>(n), 0);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 1; k < trace.sample_count(); ++k)
            if (trace.v_soma(k - 1, i) < threshold_mv && trace.v_soma(k, i) >= threshold_mv)
                ++counts[static_cast<std::size_t>(i)];
    return counts;
}

CellParameters StressScenario::apply() const {
    CellParameters p = base;
    for (const auto& field : conductance_fields()) {
        const auto it = conductance_factors.find(field.first);
        if (it == conductance_factors.end()) continue;
        if (it->second.size() != p.size())
            throw ContractError("scenario: jitter factors disagree with N");
        p.*(field.second) *= it->second;
    }
    p.stimuli.pulses = pulses;
    p.validate();
    return p;
}

StressScenario build_stress_scenario(const CellParameters& base, Eigen::Index n,
                                     std::uint64_t seed, const StressKnobs& knobs) {
    if (n < 1) throw ContractError("build_stress_scenario: n must be >= 1");
    if (base.size() != n)
        throw ContractError("build_stress_scenario: base parameters disagree with n");
    if (knobs.jitter_sigma < 0 || knobs.pulse_rate_hz < 0 || knobs.pulse_width_ms < 0 ||
        knobs.duration_ms < 0)
        throw ContractError("build_stress_scenario: knobs must be non-negative");

    StressScenario sc;
    sc.n = n;
    sc.seed = seed;
    sc.knobs = knobs;
    sc.base = base;

    SeededRng rng(seed);

    // Multiplicative lognormal jitter, channel-major then neuron-minor.
    for (const auto& field : conductance_fields()) {
        Eigen::ArrayXd factors(n);
        for (Eigen::Index i = 0; i < n; ++i)
            factors[i] = std::exp(knobs.jitter_sigma * rng.normal());
        sc.conductance_factors.emplace(field.first, std::move(factors));
    }

    // Per-neuron homogeneous Poisson pulse trains over the run duration.
    if (knobs.pulse_rate_hz > 0.0) {
        const double rate_per_ms = knobs.pulse_rate_hz / 1000.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double t = rng.exponential(rate_per_ms);
            while (t < knobs.duration_ms) {
                sc.pulses.push_back({i, t, t + knobs.pulse_width_ms, knobs.pulse_amplitude});
                t += rng.exponential(rate_per_ms);
            }
        }
    }
    return sc;
}

std::string scenario_to_json(const StressScenario& sc) {
    json factors;
    for (const auto& [name, arr] : sc.conductance_factors)
        factors[name] = std::vector<double>(arr.data(), arr.data() + arr.size());

    json pulses = json::array();
    for (const auto& p : sc.pulses)
        pulses.push_back({{"neuron", p.neuron},
                          {"start_ms", p.start_ms},
                          {"end_ms", p.end_ms},
                          {"amplitude", p.amplitude}});

    json j{{"n", sc.n},
           {"seed", sc.seed},
           {"knobs",
            {{"jitter_sigma", sc.knobs.jitter_sigma},
             {"pulse_rate_hz", sc.knobs.pulse_rate_hz},
             {"pulse_amplitude", sc.knobs.pulse_amplitude},
             {"pulse_width_ms", sc.knobs.pulse_width_ms},
             {"duration_ms", sc.knobs.duration_ms}}},
           {"base", parameters_to_json(sc.base)},
           {"conductance_factors", factors},
           {"pulses", pulses}};
    return j.dump(2) + "\n";
}

StressScenario scenario_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("cannot parse scenario: ") + e.what());
    }

    StressScenario sc;
    sc.n = j.at("n").get<Eigen::Index>();
    sc.seed = j.at("seed").get<std::uint64_t>();
    const json& k = j.at("knobs");
    sc.knobs.jitter_sigma = k.at("jitter_sigma").get<double>();
    sc.knobs.pulse_rate_hz = k.at("pulse_rate_hz").get<double>();
    sc.knobs.pulse_amplitude = k.at("pulse_amplitude").get<double>();
    sc.knobs.pulse_width_ms = k.at("pulse_width_ms").get<double>();
    sc.knobs.duration_ms = k.at("duration_ms").get<double>();
    sc.base = parameters_from_json(j.at("base"), sc.n);
    for (const auto& [name, arr] : j.at("conductance_factors").items()) {
        Eigen::ArrayXd factors(static_cast<Eigen::Index>(arr.size()));
        for (Eigen::Index i = 0; i < factors.size(); ++i) factors[i] = arr[i].get<double>();
        sc.conductance_factors.emplace(name, std::move(factors));
    }
    for (const json& p : j.at("pulses"))
        sc.pulses.push_back({p.at("neuron").get<Eigen::Index>(), p.at("start_ms").get<double>(),
                             p.at("end_ms").get<double>(), p.at("amplitude").get<double>()});
    return sc;
}

void save_scenario_json(const StressScenario& scenario, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << scenario_to_json(scenario);
}

StressScenario load_scenario_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return scenario_from_json(text);
}

}  // namespace iosim
