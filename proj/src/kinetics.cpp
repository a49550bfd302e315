#include "iosim/kinetics.hpp"

#include <array>
#include <cmath>

namespace iosim {
namespace {

// x / (1 - exp(-x/k)) and x / (exp(x/k) - 1), each patched with its
// analytic limit k where the denominator rounds to zero.
double rise_over_exp(double x, double k) {
    const double den = 1.0 - std::exp(-x / k);
    return den == 0.0 ? k : x / den;
}

double fall_over_exp(double x, double k) {
    const double den = std::exp(x / k) - 1.0;
    return den == 0.0 ? k : x / den;
}

// --- soma -------------------------------------------------------------
double cal_k_inf(double v) { return 1.0 / (1.0 + std::exp(-(v + 61.0) / 4.2)); }
double cal_k_tau(double) { return 1.0; }

double cal_l_inf(double v) { return 1.0 / (1.0 + std::exp((v + 85.5) / 8.5)); }
double cal_l_tau(double v) {
    return 20.0 * std::exp((v + 160.0) / 30.0) / (1.0 + std::exp((v + 84.0) / 7.3)) + 35.0;
}

double na_s_m_inf(double v) { return 1.0 / (1.0 + std::exp(-(v + 30.0) / 5.5)); }
double na_s_h_inf(double v) { return 1.0 / (1.0 + std::exp((v + 70.0) / 5.8)); }
double na_s_h_tau(double v) { return 3.0 * std::exp(-(v + 40.0) / 33.0); }

double kdr_n_inf(double v) { return 1.0 / (1.0 + std::exp(-(v + 3.0) / 10.0)); }
double kdr_n_tau(double v) { return 5.0 + 47.0 * std::exp((v + 50.0) / 900.0); }

double k_x_alpha(double v) { return 0.13 * rise_over_exp(v + 25.0, 10.0); }
double k_x_beta(double v) { return 1.69 * std::exp(-(v + 35.0) / 80.0); }
double k_x_inf(double v) { return k_x_alpha(v) / (k_x_alpha(v) + k_x_beta(v)); }
double k_x_tau(double v) { return 1.0 / (k_x_alpha(v) + k_x_beta(v)); }

// --- axon -------------------------------------------------------------
double na_a_m_inf(double v) { return 1.0 / (1.0 + std::exp(-(v + 30.0) / 5.5)); }
double na_a_h_inf(double v) { return 1.0 / (1.0 + std::exp((v + 60.0) / 5.8)); }
double na_a_h_tau(double v) { return 1.5 * std::exp(-(v + 40.0) / 33.0); }

// --- dendrite -----------------------------------------------------------
double cah_r_alpha(double v) { return 1.7 / (1.0 + std::exp(-(v - 5.0) / 13.9)); }
double cah_r_beta(double v) { return 0.02 * fall_over_exp(v + 8.5, 5.0); }
double cah_r_inf(double v) { return cah_r_alpha(v) / (cah_r_alpha(v) + cah_r_beta(v)); }
double cah_r_tau(double v) { return 5.0 / (cah_r_alpha(v) + cah_r_beta(v)); }

double kca_s_alpha(double ca) { return std::min(0.00002 * ca, 0.01); }
double kca_s_inf(double ca) { return kca_s_alpha(ca) / (kca_s_alpha(ca) + 0.015); }
double kca_s_tau(double ca) { return 1.0 / (kca_s_alpha(ca) + 0.015); }

double h_q_inf(double v) { return 1.0 / (1.0 + std::exp((v + 80.0) / 4.0)); }
double h_q_tau(double v) {
    return 1.0 / (std::exp(-0.086 * v - 14.6) + std::exp(0.070 * v - 1.87));
}

namespace row = state_row;

constexpr int kNoRow = -1;

const std::array<GateKinetics, 12> kGates{{
    {"soma_cal_k", int(row::cal_k), int(row::v_soma), 3, false, cal_k_inf, cal_k_tau},
    {"soma_cal_l", int(row::cal_l), int(row::v_soma), 1, false, cal_l_inf, cal_l_tau},
    {"soma_na_h", int(row::na_h), int(row::v_soma), 1, false, na_s_h_inf, na_s_h_tau},
    {"soma_kdr_n", int(row::kdr_n), int(row::v_soma), 4, false, kdr_n_inf, kdr_n_tau},
    {"soma_k_x", int(row::k_x), int(row::v_soma), 4, false, k_x_inf, k_x_tau},
    {"axon_na_h", int(row::na_h_a), int(row::v_axon), 1, false, na_a_h_inf, na_a_h_tau},
    {"axon_k_x", int(row::k_x_a), int(row::v_axon), 4, false, k_x_inf, k_x_tau},
    {"dend_cah_r", int(row::cah_r), int(row::v_dend), 2, false, cah_r_inf, cah_r_tau},
    {"dend_kca_s", int(row::kca_s), int(row::ca), 1, false, kca_s_inf, kca_s_tau},
    {"dend_h_q", int(row::h_q), int(row::v_dend), 1, false, h_q_inf, h_q_tau},
    {"soma_na_m", kNoRow, int(row::v_soma), 3, true, na_s_m_inf, nullptr},
    {"axon_na_m", kNoRow, int(row::v_axon), 3, true, na_a_m_inf, nullptr},
}};

}  // namespace

NaAxonKinetics na_axon_kinetics(double v_axon) {
    return {na_a_m_inf(v_axon), na_a_h_inf(v_axon), na_a_h_tau(v_axon)};
}

double gate_derivative(double n, double n_inf, double tau_ms) { return (n_inf - n) / tau_ms; }

double channel_current(double g_bar, std::span<const std::pair<double, int>> gates, double v,
                       double e_rev) {
    double open = 1.0;
    for (const auto& [value, exponent] : gates)
        for (int i = 0; i < exponent; ++i) open *= value;
    return g_bar * open * (v - e_rev);
}

double channel_current(double g_bar, std::initializer_list<std::pair<double, int>> gates,
                       double v, double e_rev) {
    return channel_current(g_bar, std::span<const std::pair<double, int>>(gates.begin(), gates.size()),
                           v, e_rev);
}

double compartment_current(double g, double v_self, double v_other) {
    return g * (v_other - v_self);
}

std::span<const GateKinetics> gate_table() { return kGates; }

}  // namespace iosim
