#include "iosim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <cmath>
#include <limits>
#include <thread>
#include <variant>

#include "iosim/errors.hpp"

namespace iosim {

std::string to_string(Precision p) {
    switch (p) {
        case Precision::f64: return "f64";
        case Precision::f32: return "f32";
        case Precision::f32_approx_exp: return "f32-approx-exp";
    }
    return "f64";
}

Precision precision_from_string(const std::string& s) {
    if (s == "f64") return Precision::f64;
    if (s == "f32") return Precision::f32;
    if (s == "f32-approx-exp") return Precision::f32_approx_exp;
    throw ConfigError("unknown precision '" + s + "' (expected f64, f32 or f32-approx-exp)");
}

std::int64_t SimulationConfig::sample_count() const {
    return std::llround(duration_ms / sample_dt_ms());
}

void SimulationConfig::validate() const {
    if (grid_dim < 2) throw ConfigError("grid_dim must be >= 2");
    if (!(dt_ms > 0.0)) throw ConfigError("dt_ms must be positive");
    if (steps_per_sample < 1) throw ConfigError("steps_per_sample must be >= 1");
    if (duration_ms < 0.0) throw ConfigError("duration_ms must be non-negative");
    if (thread_count < 0) throw ConfigError("thread_count must be >= 0");
    const double fit = double(sample_count()) * sample_dt_ms();
    if (std::abs(fit - duration_ms) > 1e-6 * std::max(1.0, duration_ms))
        throw ConfigError("duration_ms must be a multiple of dt_ms * steps_per_sample");
}

namespace {

void atomic_min(std::atomic<std::int64_t>& a, std::int64_t v) {
    std::int64_t cur = a.load(std::memory_order_relaxed);
    while (v < cur && !a.compare_exchange_weak(cur, v)) {
    }
}

constexpr std::int64_t kNoDivergence = std::numeric_limits<std::int64_t>::max();

// The integrator for one scalar type and exponential policy.
//
// Time stepping is bulk-synchronous with two phases per step: first every
// thread gathers gap-junction currents for its own target range (and
// refreshes its slice of the applied current when a pulse edge falls on
// this step), then, after a barrier, every thread evaluates derivatives
// and the Forward-Euler update for its own neuron columns, writing into
// the inactive half of a double buffer. Per-neuron work is elementwise and
// per-target accumulation runs in ascending edge order, so traces are
// bitwise identical for every thread count.
template <class Scalar, class ExpFn>
class Engine {
public:
    Engine(SimulationConfig cfg, const CellParameters& params, Topology topo)
        : cfg_(std::move(cfg)), topo_(std::move(topo)) {
        cfg_.validate();
        params.validate();
        n_ = params.size();
        if (cfg_.neuron_count() != n_)
            throw ContractError("engine: config grid says " + std::to_string(cfg_.neuron_count()) +
                                " neurons, parameters have " + std::to_string(n_));
        if (topo_.neuron_count() != n_)
            throw ContractError("engine: topology and parameters disagree on N");
        check_edges();

        arrays_ = ModelArrays<Scalar>::from(params);
        stimuli_ = params.stimuli;
        init_ = initial_state(params, n_, cfg_.v_rest_mv, cfg_.ca_rest).template cast<Scalar>();

        threads_ = cfg_.thread_count > 0
                       ? cfg_.thread_count
                       : std::max(1u, std::thread::hardware_concurrency());

        col_bounds_.resize(threads_ + 1);
        edge_bounds_.resize(threads_ + 1);
        for (int t = 0; t <= threads_; ++t) {
            col_bounds_[t] = n_ * t / threads_;
            const int* begin = topo_.tgt.data();
            const int* end = begin + topo_.edge_count();
            edge_bounds_[t] = std::lower_bound(begin, end, int(col_bounds_[t])) - begin;
        }

        // Steps at which the active pulse set may change; refreshed slices
        // are recomputed from the schedule, so a conservative superset of
        // boundary steps is fine.
        stim_steps_.push_back(0);
        for (const auto& p : stimuli_.pulses) {
            for (double edge_ms : {p.start_ms, p.end_ms}) {
                const std::int64_t k0 = std::int64_t(std::floor(edge_ms / cfg_.dt_ms)) - 1;
                for (std::int64_t k = std::max<std::int64_t>(k0, 0); k <= k0 + 3; ++k)
                    stim_steps_.push_back(k);
            }
        }
        std::sort(stim_steps_.begin(), stim_steps_.end());
        stim_steps_.erase(std::unique(stim_steps_.begin(), stim_steps_.end()), stim_steps_.end());
    }

    TraceRecord run() {
        const std::int64_t outer = cfg_.sample_count();
        const bool fatal = cfg_.precision != Precision::f32_approx_exp;

        TraceRecord tr;
        tr.config = cfg_;
        tr.times.resize(static_cast<std::size_t>(outer) + 1);
        for (std::int64_t k = 0; k <= outer; ++k)
            tr.times[static_cast<std::size_t>(k)] = double(k) * cfg_.sample_dt_ms();
        tr.v_soma.resize(outer + 1, n_);

        StateMatrix<Scalar> buf[2];
        buf[0] = init_;
        buf[1].resize(init_.rows(), n_);
        Eigen::ArrayX<Scalar> i_gj = Eigen::ArrayX<Scalar>::Zero(n_);
        Eigen::ArrayXd i_app_d = Eigen::ArrayXd::Zero(n_);
        Eigen::ArrayX<Scalar> i_app = Eigen::ArrayX<Scalar>::Zero(n_);
        std::atomic<std::int64_t> first_bad{kNoDivergence};
        std::barrier<> bar(threads_);

        auto worker = [&](int tid) {
            const Eigen::Index c0 = col_bounds_[tid];
            const Eigen::Index len = col_bounds_[tid + 1] - c0;
            const Eigen::Index e0 = edge_bounds_[tid];
            const Eigen::Index e1 = edge_bounds_[tid + 1];
            std::size_t stim_cursor = 0;

            if (len > 0) {
                tr.v_soma.row(0).segment(c0, len) =
                    buf[0].row(state_row::v_soma).segment(c0, len).template cast<double>();
                if (!buf[0].middleCols(c0, len).isFinite().all()) atomic_min(first_bad, 0);
            }
            bar.arrive_and_wait();
            if (fatal && first_bad.load(std::memory_order_relaxed) != kNoDivergence) return;

            std::int64_t step = 0;
            for (std::int64_t samp = 1; samp <= outer; ++samp) {
                for (int k = 0; k < cfg_.steps_per_sample; ++k, ++step) {
                    const StateMatrix<Scalar>& cur = buf[step & 1];
                    StateMatrix<Scalar>& nxt = buf[1 - (step & 1)];
                    const double t_ms = double(step) * cfg_.dt_ms;

                    // phase A: currents flowing between neurons
                    if (stim_cursor < stim_steps_.size() && stim_steps_[stim_cursor] == step) {
                        if (len > 0) {
                            applied_current_range(stimuli_, t_ms, c0, len, i_app_d);
                            i_app.segment(c0, len) =
                                i_app_d.segment(c0, len).template cast<Scalar>();
                        }
                        ++stim_cursor;
                    }
                    if (len > 0)
                        exchange_segment<Scalar, ExpFn>(&cur(state_row::v_dend, 0), topo_,
                                                        arrays_.g_gj.data(), e0, e1, c0, len,
                                                        i_gj.data());
                    bar.arrive_and_wait();

                    // phase B: local dynamics and the Euler update
                    if (len > 0) {
                        cell_derivatives_block<Scalar, ExpFn>(cur, arrays_, i_gj, i_app, c0, len,
                                                              nxt);
                        nxt.middleCols(c0, len) =
                            cur.middleCols(c0, len) + Scalar(cfg_.dt_ms) * nxt.middleCols(c0, len);
                    }
                    bar.arrive_and_wait();
                }

                const StateMatrix<Scalar>& now = buf[step & 1];
                if (len > 0) {
                    tr.v_soma.row(samp).segment(c0, len) =
                        now.row(state_row::v_soma).segment(c0, len).template cast<double>();
                    if (!now.middleCols(c0, len).isFinite().all()) atomic_min(first_bad, samp);
                }
                bar.arrive_and_wait();
                if (fatal && first_bad.load(std::memory_order_relaxed) != kNoDivergence) return;
            }
        };

        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads_) - 1);
        for (int t = 1; t < threads_; ++t) pool.emplace_back(worker, t);
        worker(0);
        for (auto& th : pool) th.join();

        const std::int64_t bad = first_bad.load();
        if (bad != kNoDivergence) {
            tr.first_nonfinite_sample = bad;
            if (fatal)
                throw DivergenceError(bad,
                                      "numerical divergence at sample " + std::to_string(bad));
        }
        if (cfg_.record_final_state) {
            const std::int64_t total = outer * cfg_.steps_per_sample;
            tr.final_state = buf[total & 1].template cast<double>();
        }
        return tr;
    }

    const SimulationConfig& config() const { return cfg_; }
    const Topology& topology() const { return topo_; }

private:
    void check_edges() const {
        const Eigen::Index e = topo_.edge_count();
        if (topo_.tgt.size() != e) throw ContractError("engine: src/tgt length mismatch");
        for (Eigen::Index k = 0; k < e; ++k) {
            if (topo_.src[k] < 0 || topo_.src[k] >= n_ || topo_.tgt[k] < 0 || topo_.tgt[k] >= n_)
                throw ContractError("engine: edge index out of range");
            if (k > 0 && (topo_.tgt[k] < topo_.tgt[k - 1] ||
                          (topo_.tgt[k] == topo_.tgt[k - 1] && topo_.src[k] <= topo_.src[k - 1])))
                throw ContractError("engine: edge list must be sorted by (tgt, src)");
        }
    }

    SimulationConfig cfg_;
    Topology topo_;
    ModelArrays<Scalar> arrays_;
    StimulusSchedule stimuli_;
    StateMatrix<Scalar> init_;
    Eigen::Index n_ = 0;
    int threads_ = 1;
    std::vector<Eigen::Index> col_bounds_;
    std::vector<Eigen::Index> edge_bounds_;
    std::vector<std::int64_t> stim_steps_;
};

using EngineVariant =
    std::variant<Engine<double, IeeeExp>, Engine<float, IeeeExp>, Engine<float, ReducedExp>>;

EngineVariant make_engine(const SimulationConfig& cfg, const CellParameters& params,
                          const Topology& topo) {
    switch (cfg.precision) {
        case Precision::f32:
            return EngineVariant(std::in_place_type<Engine<float, IeeeExp>>, cfg, params, topo);
        case Precision::f32_approx_exp:
            return EngineVariant(std::in_place_type<Engine<float, ReducedExp>>, cfg, params, topo);
        case Precision::f64:
        default:
            return EngineVariant(std::in_place_type<Engine<double, IeeeExp>>, cfg, params, topo);
    }
}

}  // namespace

struct Simulation::Impl {
    EngineVariant engine;
};

Simulation::Simulation(SimulationConfig config, CellParameters params, Topology topology)
    : impl_(new Impl{make_engine(config, params, topology)}) {}

Simulation::~Simulation() = default;
Simulation::Simulation(Simulation&&) noexcept = default;
Simulation& Simulation::operator=(Simulation&&) noexcept = default;

TraceRecord Simulation::run() {
    return std::visit([](auto& e) { return e.run(); }, impl_->engine);
}

const SimulationConfig& Simulation::config() const {
    return std::visit([](const auto& e) -> const SimulationConfig& { return e.config(); },
                      impl_->engine);
}

const Topology& Simulation::topology() const {
    return std::visit([](const auto& e) -> const Topology& { return e.topology(); },
                      impl_->engine);
}

TraceRecord run_simulation(const SimulationConfig& config, const CellParameters& params,
                           const Topology& topology) {
    return Simulation(config, params, topology).run();
}

}  // namespace iosim
