#pragma once

#include <string>

#include "iosim/engine.hpp"

namespace iosim {

// Trace CSV: header "time_ms,v0,...,v{N-1}", one row per sample, values as
// shortest round-trip decimals of the simulated scalar type (float modes
// print float-shortest). read_trace_csv recovers times and voltages; the
// config echo lives in the JSON sidecar.
void write_trace_csv(const TraceRecord& trace, const std::string& path);
TraceRecord read_trace_csv(const std::string& path);

// Config echo + divergence marker next to a trace file.
void write_trace_sidecar(const TraceRecord& trace, const std::string& path);

// Debug dump of a full state matrix (one state variable per row).
void write_state_csv(const Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& state,
                     const std::string& path);

}  // namespace iosim
