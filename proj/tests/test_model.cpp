#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "iosim/kinetics.hpp"
#include "iosim/model.hpp"
#include "support/generators.hpp"
#include "support/scalar_reference.hpp"

using namespace iosim;
namespace row = state_row;

namespace {

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("vectorized derivatives match the scalar reference") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ui(-5.0, 5.0);

    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Eigen::Index n = 1 + (rng() % 8);
        const StateMatrix<double> s = gen::random_state(rng, n);
        const CellParameters p = gen::random_parameters(rng, n);
        Eigen::ArrayXd i_gj(n);
        for (Eigen::Index i = 0; i < n; ++i) i_gj[i] = ui(rng);

        const StateMatrix<double> got = cell_derivatives<double>(s, p, i_gj, 0.0);
        const Eigen::ArrayXXd want = oracle::scalar_cell_derivatives(s, p, i_gj, 0.0);
        for (Eigen::Index r = 0; r < s.rows(); ++r)
            for (Eigen::Index c = 0; c < n; ++c)
                worst = std::max(worst, rel_err(got(r, c), want(r, c)));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("identical neurons produce identical derivative columns") {
    const Eigen::Index n = 16;
    const CellParameters p = CellParameters::reference(n);
    const StateMatrix<double> s = initial_state(p, n);
    const Eigen::ArrayXd i_gj = Eigen::ArrayXd::Zero(n);
    const StateMatrix<double> d = cell_derivatives<double>(s, p, i_gj, 0.0);
    for (Eigen::Index c = 1; c < n; ++c) CHECK((d.col(c) == d.col(0)).all());
}

TEST_CASE("constructed fixed point has an all-zero derivative") {
    const Eigen::Index n = 3;
    CellParameters p = CellParameters::reference(n);
    for (const auto& f : conductance_fields()) (p.*(f.second)).setZero();
    p.g_int.setZero();
    p.g_gj.setZero();

    const StateMatrix<double> s = initial_state(p, n, -60.0, /*ca_rest=*/0.0);
    const Eigen::ArrayXd i_gj = Eigen::ArrayXd::Zero(n);
    const StateMatrix<double> d = cell_derivatives<double>(s, p, i_gj, 0.0);
    CHECK((d == 0.0).all());
}

TEST_CASE("permuting neurons permutes derivative columns bitwise") {
    std::mt19937_64 rng(99);
    const Eigen::Index n = 12;
    const StateMatrix<double> s = gen::random_state(rng, n);
    const CellParameters p = gen::random_parameters(rng, n);
    Eigen::ArrayXd i_gj(n);
    std::uniform_real_distribution<double> ui(-5.0, 5.0);
    for (Eigen::Index i = 0; i < n; ++i) i_gj[i] = ui(rng);

    std::vector<Eigen::Index> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);

    StateMatrix<double> s2(s.rows(), n);
    CellParameters p2 = p;
    Eigen::ArrayXd i_gj2(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        s2.col(i) = s.col(perm[i]);
        i_gj2[i] = i_gj[perm[i]];
        for (const auto& f : conductance_fields()) (p2.*(f.second))[i] = (p.*(f.second))[perm[i]];
        p2.g_gj[i] = p.g_gj[perm[i]];
    }

    const StateMatrix<double> d = cell_derivatives<double>(s, p, i_gj, 0.0);
    const StateMatrix<double> d2 = cell_derivatives<double>(s2, p2, i_gj2, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) CHECK((d2.col(i) == d.col(perm[i])).all());
}

TEST_CASE("gates stay in [0,1] under Euler steps with dt below tau_min") {
    std::mt19937_64 rng(4242);
    const Eigen::Index n = 8;
    const CellParameters p = CellParameters::reference(n);
    const Eigen::ArrayXd i_gj = Eigen::ArrayXd::Zero(n);
    const double dt = 0.025;

    StateMatrix<double> s = gen::random_state(rng, n);
    for (int step = 0; step < 2000; ++step) {
        StateMatrix<double> d = cell_derivatives<double>(s, p, i_gj, 0.0);
        // freeze the voltages and calcium; this probes the gate rows only
        d.row(row::v_soma).setZero();
        d.row(row::v_dend).setZero();
        d.row(row::v_axon).setZero();
        d.row(row::ca).setZero();
        s += dt * d;
        for (Eigen::Index r = row::cal_k; r <= row::h_q; ++r) {
            CHECK(s.row(r).minCoeff() >= 0.0);
            CHECK(s.row(r).maxCoeff() <= 1.0);
        }
    }
}

TEST_CASE("initial state: shape, determinism, steady-state gates") {
    const Eigen::Index n = 64;
    const CellParameters p = CellParameters::reference(n);
    const StateMatrix<double> a = initial_state(p, n);
    const StateMatrix<double> b = initial_state(p, n);
    CHECK(a.rows() == 14);
    CHECK(a.cols() == 64);
    CHECK((a == b).all());

    // every stored gate is a fixed point of its relaxation
    for (const GateKinetics& g : gate_table()) {
        if (g.instantaneous) continue;
        const double input = a(g.input_row, 0);
        CHECK(gate_derivative(a(g.state_row, 0), g.steady_state(input), g.time_constant(input)) ==
              0.0);
    }

    // and the full kernel agrees: gate rows of the derivative vanish
    const StateMatrix<double> d =
        cell_derivatives<double>(a, p, Eigen::ArrayXd::Zero(n), 0.0);
    for (Eigen::Index r = row::cal_k; r <= row::h_q; ++r)
        CHECK(d.row(r).abs().maxCoeff() <= 1e-14);
}

TEST_CASE("dimension mismatches are contract errors") {
    const Eigen::Index n = 4;
    const CellParameters p = CellParameters::reference(n);
    const StateMatrix<double> s = initial_state(p, n);
    CHECK_THROWS_AS(cell_derivatives<double>(s, p, Eigen::ArrayXd::Zero(n + 1), 0.0),
                    ContractError);
    CHECK_THROWS_AS(cell_derivatives<double>(s, CellParameters::reference(n + 1),
                                             Eigen::ArrayXd::Zero(n), 0.0),
                    ContractError);
    StateMatrix<double> short_state = s.topRows(7);
    CHECK_THROWS_AS(cell_derivatives<double>(short_state, p, Eigen::ArrayXd::Zero(n), 0.0),
                    ContractError);
}

TEST_CASE("applied current sums overlapping pulses") {
    StimulusSchedule sched;
    sched.pulses.push_back({1, 10.0, 20.0, 2.0});
    sched.pulses.push_back({1, 15.0, 30.0, 3.0});
    sched.pulses.push_back({0, 0.0, 5.0, -1.0});

    CHECK(applied_current(sched, 3, 0.0)[0] == -1.0);
    CHECK(applied_current(sched, 3, 12.0)[1] == 2.0);
    CHECK(applied_current(sched, 3, 17.5)[1] == 5.0);
    CHECK(applied_current(sched, 3, 25.0)[1] == 3.0);
    CHECK(applied_current(sched, 3, 30.0)[1] == 0.0);  // end is exclusive
    CHECK(applied_current(sched, 3, 17.5)[2] == 0.0);
}
