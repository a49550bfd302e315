#include "iosim/trace.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <system_error>

#include <json.hpp>

#include "iosim/errors.hpp"

namespace iosim {

namespace {

// Shortest decimal that round-trips in the given type.
template <class T>
void append_number(std::string& buf, T value) {
    char tmp[64];
    const auto res = std::to_chars(tmp, tmp + sizeof(tmp), value);
    buf.append(tmp, res.ptr);
}

}  // namespace

void write_trace_csv(const TraceRecord& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);

    const Eigen::Index n = trace.neuron_count();
    std::string buf;
    buf.reserve(16 * static_cast<std::size_t>(n) + 16);

    buf = "time_ms";
    for (Eigen::Index i = 0; i < n; ++i) {
        buf += ",v";
        append_number(buf, static_cast<long long>(i));
    }
    buf += '\n';
    out << buf;

    const bool as_float = trace.config.precision != Precision::f64;
    for (Eigen::Index k = 0; k < trace.sample_count(); ++k) {
        buf.clear();
        append_number(buf, trace.times[static_cast<std::size_t>(k)]);
        for (Eigen::Index i = 0; i < n; ++i) {
            buf += ',';
            const double v = trace.v_soma(k, i);
            if (as_float)
                append_number(buf, static_cast<float>(v));
            else
                append_number(buf, v);
        }
        buf += '\n';
        out << buf;
    }
    if (!out) throw ConfigError("failed while writing " + path);
}

TraceRecord read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);

    std::string line;
    if (!std::getline(in, line) || line.rfind("time_ms", 0) != 0)
        throw ConfigError(path + ": expected a 'time_ms,v0,...' header");
    Eigen::Index n = 0;
    for (char c : line)
        if (c == ',') ++n;

    std::vector<double> times;
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        double t = 0.0;
        auto res = std::from_chars(p, end, t);
        if (res.ec != std::errc{}) throw ConfigError(path + ": malformed time value");
        times.push_back(t);
        p = res.ptr;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (p == end || *p != ',') throw ConfigError(path + ": short row");
            ++p;
            double v = 0.0;
            res = std::from_chars(p, end, v);
            if (res.ec != std::errc{}) throw ConfigError(path + ": malformed voltage value");
            values.push_back(v);
            p = res.ptr;
        }
    }

    TraceRecord trace;
    trace.times = std::move(times);
    const Eigen::Index rows = static_cast<Eigen::Index>(trace.times.size());
    trace.v_soma.resize(rows, n);
    for (Eigen::Index k = 0; k < rows; ++k)
        for (Eigen::Index i = 0; i < n; ++i)
            trace.v_soma(k, i) = values[static_cast<std::size_t>(k * n + i)];
    return trace;
}

void write_trace_sidecar(const TraceRecord& trace, const std::string& path) {
    const SimulationConfig& c = trace.config;
    nlohmann::json j{{"grid_dim", c.grid_dim},
                     {"connected", c.connected},
                     {"duration_ms", c.duration_ms},
                     {"dt_ms", c.dt_ms},
                     {"steps_per_sample", c.steps_per_sample},
                     {"precision", to_string(c.precision)},
                     {"seed", c.seed},
                     {"thread_count", c.thread_count},
                     {"avg_degree", c.avg_degree},
                     {"r_max", c.r_max},
                     {"v_rest_mv", c.v_rest_mv},
                     {"ca_rest", c.ca_rest},
                     {"first_nonfinite_sample", trace.first_nonfinite_sample}};
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << j.dump(2) << "\n";
}

void write_state_csv(
    const Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& state,
    const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    std::string buf;
    for (Eigen::Index r = 0; r < state.rows(); ++r) {
        buf.clear();
        for (Eigen::Index c = 0; c < state.cols(); ++c) {
            if (c > 0) buf += ',';
            append_number(buf, state(r, c));
        }
        buf += '\n';
        out << buf;
    }
}

}  // namespace iosim
