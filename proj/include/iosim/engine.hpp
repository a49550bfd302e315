#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "iosim/exchange.hpp"
#include "iosim/model.hpp"
#include "iosim/parameters.hpp"
#include "iosim/state.hpp"
#include "iosim/topology.hpp"

namespace iosim {

// Arithmetic mode of a run. f32_approx_exp is IEEE float everywhere except
// that the operands of every exponential are rounded to a 10-bit
// significand (see precision.hpp), mimicking hardware with a
// reduced-precision exponential unit. In that mode numerical divergence is
// recorded in the trace instead of aborting the run.
enum class Precision { f64, f32, f32_approx_exp };

std::string to_string(Precision p);
Precision precision_from_string(const std::string& s);

struct SimulationConfig {
    int grid_dim = 4;  // N = grid_dim^3
    bool connected = true;
    double duration_ms = 100.0;
    double dt_ms = 0.025;
    int steps_per_sample = 40;  // fused inner steps per recorded sample
    Precision precision = Precision::f64;
    std::uint64_t seed = 1;
    int thread_count = 0;  // 0 = hardware concurrency

    // Topology knobs, used where the caller generates the network and
    // echoed into outputs for reproducibility.
    double avg_degree = 10.0;
    double r_max = 4.0;

    // Initial conditions.
    double v_rest_mv = -60.0;
    double ca_rest = 3.7152;

    // Debug: keep the final full state matrix in the trace record.
    bool record_final_state = false;

    double sample_dt_ms() const { return dt_ms * steps_per_sample; }
    std::int64_t sample_count() const;  // outer iterations (rows - 1)
    Eigen::Index neuron_count() const {
        return static_cast<Eigen::Index>(grid_dim) * grid_dim * grid_dim;
    }
    // Throws ConfigError unless dt > 0, steps_per_sample >= 1 and
    // duration_ms is a non-negative multiple of the sample interval.
    // duration_ms == 0 is the degenerate run used for timing sanity checks.
    void validate() const;
};

// Sampled somatic voltages: times[k] is k * sample_dt, v_soma(k, i) the
// soma potential of neuron i at that instant, row 0 being the initial
// state. Values are stored as double; in float modes they are exact
// upcasts of the simulated floats.
struct TraceRecord {
    std::vector<double> times;
    Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> v_soma;
    SimulationConfig config;
    std::int64_t first_nonfinite_sample = -1;  // -1: stayed finite
    std::optional<Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        final_state;

    Eigen::Index neuron_count() const { return v_soma.cols(); }
    Eigen::Index sample_count() const { return v_soma.rows(); }
};

// One Forward-Euler step of the full network: gathers gap-junction
// currents from the current state, evaluates the derivative and returns
// state + dt * derivative. Convenience entry point for tests and small
// experiments; the Simulation engine below runs the same kernels over a
// persistent double buffer.
template <class Scalar, class ExpFn = IeeeExp>
StateMatrix<Scalar> euler_step(const StateMatrix<Scalar>& state, const CellParameters& params,
                               const Topology& topo, double t_ms, double dt_ms) {
    const Eigen::ArrayX<Scalar> g_gj = params.g_gj.cast<Scalar>();
    const Eigen::ArrayX<Scalar> i_gj =
        exchange<Scalar, ExpFn>(state.row(state_row::v_dend).transpose(), topo, g_gj);
    StateMatrix<Scalar> deriv = cell_derivatives<Scalar, ExpFn>(state, params, i_gj, t_ms);
    return state + Scalar(dt_ms) * deriv;
}

// A configured network ready to integrate. Construction does all one-time
// work (parameter cast, initial state, thread partition, stimulus event
// table); run() integrates from the initial state and can be called
// repeatedly, always reproducing the same trace bit for bit, for any
// thread count.
class Simulation {
public:
    Simulation(SimulationConfig config, CellParameters params, Topology topology);
    ~Simulation();
    Simulation(Simulation&&) noexcept;
    Simulation& operator=(Simulation&&) noexcept;

    TraceRecord run();

    const SimulationConfig& config() const;
    const Topology& topology() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Setup plus a single run.
TraceRecord run_simulation(const SimulationConfig& config, const CellParameters& params,
                           const Topology& topology);

}  // namespace iosim
