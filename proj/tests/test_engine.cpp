#include <doctest.h>

#include <cmath>
#include <random>

#include "iosim/engine.hpp"
#include "iosim/kinetics.hpp"
#include "iosim/trace.hpp"
#include "support/tmpdir.hpp"

using namespace iosim;
namespace row = state_row;

namespace {

SimulationConfig small_config() {
    SimulationConfig cfg;
    cfg.grid_dim = 4;
    cfg.duration_ms = 20.0;
    cfg.thread_count = 1;
    return cfg;
}

Topology topo_for(const SimulationConfig& cfg) {
    return cfg.connected ? generate_topology(cfg.grid_dim, cfg.avg_degree, cfg.r_max, cfg.seed)
                         : Topology::unconnected(cfg.grid_dim);
}

bool traces_equal(const TraceRecord& a, const TraceRecord& b) {
    return a.times == b.times && a.v_soma.rows() == b.v_soma.rows() &&
           a.v_soma.cols() == b.v_soma.cols() && (a.v_soma == b.v_soma).all();
}

}  // namespace

TEST_CASE("config validation") {
    SimulationConfig cfg = small_config();
    CHECK_NOTHROW(cfg.validate());
    cfg.duration_ms = 20.3;  // not a multiple of 1 ms
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.dt_ms = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.steps_per_sample = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.duration_ms = 0.0;  // degenerate timing-sanity run
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.sample_count() == 0);
}

TEST_CASE("a 100 ms run yields 101 sample rows") {
    SimulationConfig cfg = small_config();
    cfg.duration_ms = 100.0;
    const TraceRecord t =
        run_simulation(cfg, CellParameters::reference(cfg.neuron_count()), topo_for(cfg));
    CHECK(t.sample_count() == 101);
    CHECK(t.neuron_count() == 64);
    CHECK(t.times.front() == 0.0);
    CHECK(t.times.back() == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(t.first_nonfinite_sample == -1);
    CHECK(t.v_soma.isFinite().all());
}

TEST_CASE("identical unconnected neurons stay bitwise identical") {
    SimulationConfig cfg = small_config();
    cfg.connected = false;
    const TraceRecord t =
        run_simulation(cfg, CellParameters::reference(cfg.neuron_count()), topo_for(cfg));
    for (Eigen::Index i = 1; i < t.neuron_count(); ++i)
        CHECK((t.v_soma.col(i) == t.v_soma.col(0)).all());
}

TEST_CASE("unconnected flag equals connected run over an empty edge list") {
    SimulationConfig cfg = small_config();
    cfg.connected = false;
    const CellParameters params = CellParameters::reference(cfg.neuron_count());
    const TraceRecord unconnected = run_simulation(cfg, params, Topology::unconnected(4));

    SimulationConfig cfg2 = cfg;
    cfg2.connected = true;
    Topology empty = Topology::unconnected(4);
    const TraceRecord connected_empty = run_simulation(cfg2, params, empty);
    CHECK(traces_equal(unconnected, connected_empty));
}

TEST_CASE("runs are bitwise reproducible and thread-count invariant") {
    SimulationConfig cfg = small_config();
    const CellParameters params = CellParameters::reference(cfg.neuron_count());
    const Topology topo = topo_for(cfg);

    const TraceRecord base = run_simulation(cfg, params, topo);
    const TraceRecord again = run_simulation(cfg, params, topo);
    CHECK(traces_equal(base, again));

    for (int threads : {2, 3, 8}) {
        SimulationConfig c = cfg;
        c.thread_count = threads;
        CHECK(traces_equal(base, run_simulation(c, params, topo)));
    }
}

TEST_CASE("doubling steps_per_sample only thins the sampling grid") {
    SimulationConfig a = small_config();
    const CellParameters params = CellParameters::reference(a.neuron_count());
    const Topology topo = topo_for(a);
    SimulationConfig b = a;
    b.steps_per_sample = 80;

    const TraceRecord ta = run_simulation(a, params, topo);
    const TraceRecord tb = run_simulation(b, params, topo);
    REQUIRE(tb.sample_count() == (ta.sample_count() + 1) / 2);
    for (Eigen::Index k = 0; k < tb.sample_count(); ++k)
        CHECK((tb.v_soma.row(k) == ta.v_soma.row(2 * k)).all());
}

TEST_CASE("euler_step at a constructed fixed point returns the state unchanged") {
    const Eigen::Index n = 8;
    CellParameters p = CellParameters::reference(n);
    for (const auto& f : conductance_fields()) (p.*(f.second)).setZero();
    p.g_int.setZero();
    p.g_gj.setZero();
    const StateMatrix<double> s = initial_state(p, n, -60.0, /*ca_rest=*/0.0);
    const StateMatrix<double> next = euler_step<double>(s, p, Topology::unconnected(2), 0.0, 0.025);
    CHECK((next == s).all());
}

TEST_CASE("k Euler steps of an isolated gate match the closed form") {
    // constant-coefficient relaxation: n_k = n_inf + (n0 - n_inf) (1 - dt/tau)^k
    const double n_inf = 0.73, tau = 2.5, dt = 0.025, n0 = 0.1;
    double n = n0;
    double worst = 0.0;
    for (int k = 1; k <= 10000; ++k) {
        n += dt * gate_derivative(n, n_inf, tau);
        const double closed = n_inf + (n0 - n_inf) * std::pow(1.0 - dt / tau, k);
        worst = std::max(worst, std::abs(n - closed));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("pure gap-junction diffusion contracts the dendritic voltage range") {
    const Eigen::Index n = 27;
    CellParameters p = CellParameters::reference(n);
    for (const auto& f : conductance_fields()) (p.*(f.second)).setZero();
    p.g_int.setZero();  // junctions only
    const Topology topo = generate_topology(3, 4.0, 2.0, 11);

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uv(-70.0, -20.0);
    StateMatrix<double> s = initial_state(p, n, -60.0, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) s(row::v_dend, i) = uv(rng);

    double prev_max = s.row(row::v_dend).maxCoeff();
    double prev_min = s.row(row::v_dend).minCoeff();
    for (int step = 0; step < 4000; ++step) {
        s = euler_step<double>(s, p, topo, step * 0.025, 0.025);
        const double cur_max = s.row(row::v_dend).maxCoeff();
        const double cur_min = s.row(row::v_dend).minCoeff();
        if (step % 40 == 0) {
            CHECK(cur_max <= prev_max);
            CHECK(cur_min >= prev_min);
        }
        prev_max = cur_max;
        prev_min = cur_min;
    }
    // coupling really happened: the spread shrank
    CHECK(prev_max - prev_min < 40.0);
}

TEST_CASE("divergence aborts strict-precision runs with the sample index") {
    SimulationConfig cfg = small_config();
    cfg.dt_ms = 10.0;  // way past the stability limit
    cfg.steps_per_sample = 2;
    cfg.duration_ms = 200.0;
    const CellParameters params = CellParameters::reference(cfg.neuron_count());
    const Topology topo = topo_for(cfg);
    CHECK_THROWS_AS(run_simulation(cfg, params, topo), DivergenceError);

    // the approximate-exp mode records it instead of failing
    cfg.precision = Precision::f32_approx_exp;
    const TraceRecord t = run_simulation(cfg, params, topo);
    CHECK(t.first_nonfinite_sample >= 0);
    CHECK(t.sample_count() == cfg.sample_count() + 1);
}

TEST_CASE("engine rejects inconsistent inputs") {
    SimulationConfig cfg = small_config();
    CHECK_THROWS_AS(run_simulation(cfg, CellParameters::reference(27), topo_for(cfg)),
                    ContractError);

    Topology bad = topo_for(cfg);
    bad.src[0] = 1000;  // out of range
    CHECK_THROWS_AS(run_simulation(cfg, CellParameters::reference(cfg.neuron_count()), bad),
                    ContractError);

    Topology unsorted = topo_for(cfg);
    std::swap(unsorted.src[0], unsorted.src[1]);
    std::swap(unsorted.tgt[0], unsorted.tgt[1]);
    CHECK_THROWS_AS(run_simulation(cfg, CellParameters::reference(cfg.neuron_count()), unsorted),
                    ContractError);
}

TEST_CASE("f32 and f32-approx-exp runs produce float-representable samples") {
    SimulationConfig cfg = small_config();
    for (Precision prec : {Precision::f32, Precision::f32_approx_exp}) {
        cfg.precision = prec;
        const TraceRecord t =
            run_simulation(cfg, CellParameters::reference(cfg.neuron_count()), topo_for(cfg));
        for (Eigen::Index k = 0; k < t.sample_count(); ++k)
            for (Eigen::Index i = 0; i < t.neuron_count(); ++i)
                CHECK(double(float(t.v_soma(k, i))) == t.v_soma(k, i));
    }
}

TEST_CASE("stimulus pulses reach the engine where the schedule says") {
    SimulationConfig cfg = small_config();
    cfg.connected = false;
    cfg.duration_ms = 10.0;
    CellParameters params = CellParameters::reference(cfg.neuron_count());
    params.stimuli.pulses.push_back({0, 2.0, 8.0, -10.0});  // depolarizing

    const TraceRecord with = run_simulation(cfg, params, Topology::unconnected(4));
    const TraceRecord without = run_simulation(
        cfg, CellParameters::reference(cfg.neuron_count()), Topology::unconnected(4));

    // before onset the traces agree; afterwards the pulsed neuron departs
    CHECK((with.v_soma.row(2).segment(0, 1) == without.v_soma.row(2).segment(0, 1)).all());
    CHECK(with.v_soma(5, 0) != without.v_soma(5, 0));
    CHECK((with.v_soma.col(1) == without.v_soma.col(1)).all());  // untouched neuron
}

TEST_CASE("trace CSV round-trips and keeps float-shortest formatting") {
    testutil::TmpDir tmp;
    SimulationConfig cfg = small_config();
    cfg.duration_ms = 5.0;
    const TraceRecord t =
        run_simulation(cfg, CellParameters::reference(cfg.neuron_count()), topo_for(cfg));
    write_trace_csv(t, tmp.file("t.csv"));
    write_trace_sidecar(t, tmp.file("t.csv.json"));
    const TraceRecord back = read_trace_csv(tmp.file("t.csv"));
    CHECK(back.sample_count() == t.sample_count());
    CHECK(back.neuron_count() == t.neuron_count());
    CHECK((back.v_soma == t.v_soma).all());  // shortest round-trip decimals
    for (std::size_t k = 0; k < t.times.size(); ++k) CHECK(back.times[k] == t.times[k]);
}

TEST_CASE("final state dump has the full 14 x N shape") {
    SimulationConfig cfg = small_config();
    cfg.duration_ms = 2.0;
    cfg.record_final_state = true;
    const TraceRecord t =
        run_simulation(cfg, CellParameters::reference(cfg.neuron_count()), topo_for(cfg));
    REQUIRE(t.final_state.has_value());
    CHECK(t.final_state->rows() == 14);
    CHECK(t.final_state->cols() == 64);
}
