#include <doctest.h>

#include <cmath>
#include <random>

#include "iosim/kinetics.hpp"

using namespace iosim;

TEST_CASE("axonal sodium kinetics hit the reference points") {
    CHECK(na_axon_kinetics(-30.0).m_inf == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(na_axon_kinetics(-60.0).h_inf == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(na_axon_kinetics(-40.0).tau_h == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(std::abs(na_axon_kinetics(-24.5).m_inf - 1.0 / (1.0 + std::exp(-1.0))) < 1e-15);
}

TEST_CASE("channel current") {
    CHECK(channel_current(2.0, {{0.3, 2}}, 55.0, 55.0) == 0.0);  // zero driving force
    CHECK(channel_current(2.0, {{0.0, 1}, {0.9, 2}}, -30.0, 55.0) == 0.0);  // closed gate
    CHECK(channel_current(1.0, {{0.5, 3}, {0.25, 1}}, -30.0, 55.0) ==
          doctest::Approx(-2.65625).epsilon(1e-14));
}

TEST_CASE("channel current is linear in g_bar and driving force") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ug(0.0, 1.0);
    std::uniform_real_distribution<double> uv(-90.0, 50.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double g = 10.0 * ug(rng);
        const double gate = ug(rng);
        const double v = uv(rng);
        // power-of-two factors scale exactly
        CHECK(channel_current(2.0 * g, {{gate, 3}}, v, 0.0) ==
              2.0 * channel_current(g, {{gate, 3}}, v, 0.0));
        CHECK(channel_current(g, {{gate, 3}}, 2.0 * v, 0.0) ==
              2.0 * channel_current(g, {{gate, 3}}, v, 0.0));
        const double a = 3.7;
        CHECK(channel_current(a * g, {{gate, 2}}, v, 0.0) ==
              doctest::Approx(a * channel_current(g, {{gate, 2}}, v, 0.0)).epsilon(1e-13));
    }
}

TEST_CASE("gate derivative") {
    CHECK(gate_derivative(0.42, 0.42, 3.0) == 0.0);
    CHECK(gate_derivative(0.0, 1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(gate_derivative(0.8, 0.5, 1.5) == doctest::Approx(-0.2).epsilon(1e-14));
}

TEST_CASE("compartment current") {
    CHECK(compartment_current(0.3, -55.0, -55.0) == 0.0);
    CHECK(compartment_current(0.0, -20.0, 77.0) == 0.0);
    CHECK(compartment_current(0.1, -60.0, -40.0) == doctest::Approx(2.0).epsilon(1e-14));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uv(-100.0, 100.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double g = 0.5 * (uv(rng) + 100.0) / 100.0;
        const double a = uv(rng), b = uv(rng);
        CHECK(compartment_current(g, a, b) == -compartment_current(g, b, a));  // exact
    }
}

TEST_CASE("gate table: steady states in [0,1], time constants positive") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> uv(-120.0, 60.0);
    std::uniform_real_distribution<double> uc(0.0, 50.0);
    for (const GateKinetics& g : gate_table()) {
        CHECK(g.exponent >= 1);
        for (int trial = 0; trial < 500; ++trial) {
            const double input = g.input_row == state_row::ca ? uc(rng) : uv(rng);
            const double inf = g.steady_state(input);
            CHECK(inf >= 0.0);
            CHECK(inf <= 1.0);
            if (!g.instantaneous) CHECK(g.time_constant(input) > 0.0);
        }
    }
}

TEST_CASE("gate table covers the ten stored gates plus two instantaneous ones") {
    int stored = 0, instantaneous = 0;
    for (const GateKinetics& g : gate_table()) {
        if (g.instantaneous) {
            ++instantaneous;
            CHECK(g.state_row == -1);
            CHECK(g.time_constant == nullptr);
        } else {
            ++stored;
            CHECK(g.state_row >= state_row::cal_k);
            CHECK(g.state_row <= state_row::h_q);
        }
    }
    CHECK(stored == 10);
    CHECK(instantaneous == 2);
}

TEST_CASE("rate kinetics are continuous through their removable singularities") {
    // soma/axon fast-K alpha at V = -25, dendritic CaH beta at V = -8.5
    const GateKinetics* kx = nullptr;
    const GateKinetics* r = nullptr;
    for (const GateKinetics& g : gate_table()) {
        if (std::string(g.name) == "soma_k_x") kx = &g;
        if (std::string(g.name) == "dend_cah_r") r = &g;
    }
    REQUIRE(kx != nullptr);
    REQUIRE(r != nullptr);
    CHECK(std::isfinite(kx->steady_state(-25.0)));
    CHECK(kx->steady_state(-25.0) ==
          doctest::Approx(kx->steady_state(-25.0 + 1e-7)).epsilon(1e-6));
    CHECK(std::isfinite(r->steady_state(-8.5)));
    CHECK(r->steady_state(-8.5) == doctest::Approx(r->steady_state(-8.5 + 1e-7)).epsilon(1e-6));
}
