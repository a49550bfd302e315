#pragma once

#include <Eigen/Core>

#include "iosim/errors.hpp"
#include "iosim/parameters.hpp"
#include "iosim/precision.hpp"
#include "iosim/state.hpp"

namespace iosim {

// Cell parameters cast once to the simulation scalar, with the
// compartment-coupling conductances pre-divided by the surface ratios.
// Building one of these is the only per-run "parameter upload"; the
// stepping loops never touch CellParameters again.
template <class Scalar>
struct ModelArrays {
    using Arr = Eigen::ArrayX<Scalar>;

    Arr g_cal, g_na_s, g_kdr_s, g_k_s, g_leak_s;
    Arr g_cah, g_kca, g_h, g_leak_d;
    Arr g_na_a, g_k_a, g_leak_a;
    Arr v_na, v_k, v_ca, v_h, v_leak;
    Arr cm_soma, cm_dend, cm_axon;
    Arr g_soma_dend;  // g_int / p1,       dendrite seen from the soma
    Arr g_soma_axon;  // g_int / (1 - p2), axon seen from the soma
    Arr g_dend_soma;  // g_int / (1 - p1), soma seen from the dendrite
    Arr g_axon_soma;  // g_int / p2,       soma seen from the axon
    Arr g_gj;

    Eigen::Index size() const { return g_cal.size(); }

    static ModelArrays from(const CellParameters& p) {
        p.validate();
        ModelArrays a;
        auto cast = [](const Eigen::ArrayXd& x) { return x.template cast<Scalar>().eval(); };
        a.g_cal = cast(p.g_cal);
        a.g_na_s = cast(p.g_na_s);
        a.g_kdr_s = cast(p.g_kdr_s);
        a.g_k_s = cast(p.g_k_s);
        a.g_leak_s = cast(p.g_leak_s);
        a.g_cah = cast(p.g_cah);
        a.g_kca = cast(p.g_kca);
        a.g_h = cast(p.g_h);
        a.g_leak_d = cast(p.g_leak_d);
        a.g_na_a = cast(p.g_na_a);
        a.g_k_a = cast(p.g_k_a);
        a.g_leak_a = cast(p.g_leak_a);
        a.v_na = cast(p.v_na);
        a.v_k = cast(p.v_k);
        a.v_ca = cast(p.v_ca);
        a.v_h = cast(p.v_h);
        a.v_leak = cast(p.v_leak);
        a.cm_soma = cast(p.cm_soma);
        a.cm_dend = cast(p.cm_dend);
        a.cm_axon = cast(p.cm_axon);
        a.g_soma_dend = cast((p.g_int / p.p1).eval());
        a.g_soma_axon = cast((p.g_int / (1.0 - p.p2)).eval());
        a.g_dend_soma = cast((p.g_int / (1.0 - p.p1)).eval());
        a.g_axon_soma = cast((p.g_int / p.p2).eval());
        a.g_gj = cast(p.g_gj);
        return a;
    }
};

// Applied current per neuron at time t, summed over active pulses
// (start_ms <= t < end_ms). The _range variant only fills [col0, col0+n)
// and is what the engine calls; per-neuron sums are accumulated in pulse
// order either way, so the result does not depend on the partition.
Eigen::ArrayXd applied_current(const StimulusSchedule& stimuli, Eigen::Index n, double t_ms);
void applied_current_range(const StimulusSchedule& stimuli, double t_ms, Eigen::Index col0,
                           Eigen::Index ncols, Eigen::ArrayXd& out);

// Resting state: all compartment voltages at v_rest, every stored gate at
// its steady state for that input, calcium at ca_rest. Deterministic.
StateMatrix<double> initial_state(const CellParameters& params, Eigen::Index n,
                                  double v_rest_mv = -60.0, double ca_rest = 3.7152);

// Full derivative evaluation for the neuron columns [col0, col0+ncols).
//
// The equations are the 2012 three-compartment IO model (see
// kinetics.hpp for the source); they are substituted directly as Eigen
// expressions, one statement per quantity, with every exponential routed
// through ExpFn. i_gj is the gap-junction current entering the dendrite;
// i_app enters the dendritic equation with the cable-equation sign.
// Writes only rows 0..13 of out within the column range; out must not
// alias state.
template <class Scalar, class ExpFn>
void cell_derivatives_block(const StateMatrix<Scalar>& state, const ModelArrays<Scalar>& p,
                            const Eigen::ArrayX<Scalar>& i_gj, const Eigen::ArrayX<Scalar>& i_app,
                            Eigen::Index col0, Eigen::Index ncols, StateMatrix<Scalar>& out) {
    namespace row = state_row;
    using Row = Eigen::Array<Scalar, 1, Eigen::Dynamic>;

    const auto sv = [&](Eigen::Index r) { return state.row(r).segment(col0, ncols); };
    const auto ov = [&](Eigen::Index r) { return out.row(r).segment(col0, ncols); };
    const auto pv = [&](const Eigen::ArrayX<Scalar>& a) {
        return a.segment(col0, ncols).transpose();
    };
    const auto E = [](const auto& x) { return x.unaryExpr(ExpFn{}); };

    const auto vs = sv(row::v_soma);
    const auto vd = sv(row::v_dend);
    const auto va = sv(row::v_axon);

    // --- soma ---------------------------------------------------------
    const auto gate_k = sv(row::cal_k);
    const auto gate_l = sv(row::cal_l);
    const auto gate_h = sv(row::na_h);
    const auto gate_n = sv(row::kdr_n);
    const auto gate_x = sv(row::k_x);

    // Low-threshold calcium (CaL)
    Row k_inf = Scalar(1) / (Scalar(1) + E(-(vs + Scalar(61)) / Scalar(4.2)));
    Row l_inf = Scalar(1) / (Scalar(1) + E((vs + Scalar(85.5)) / Scalar(8.5)));
    Row tau_l = Scalar(20) * E((vs + Scalar(160)) / Scalar(30)) /
                    (Scalar(1) + E((vs + Scalar(84)) / Scalar(7.3))) +
                Scalar(35);

    // Sodium; activation is instantaneous, m = m_inf(V)
    Row m_inf_s = Scalar(1) / (Scalar(1) + E(-(vs + Scalar(30)) / Scalar(5.5)));
    Row h_inf_s = Scalar(1) / (Scalar(1) + E((vs + Scalar(70)) / Scalar(5.8)));
    Row tau_h_s = Scalar(3) * E(-(vs + Scalar(40)) / Scalar(33));

    // Delayed-rectifier potassium
    Row n_inf = Scalar(1) / (Scalar(1) + E(-(vs + Scalar(3)) / Scalar(10)));
    Row tau_n = Scalar(5) + Scalar(47) * E((vs + Scalar(50)) / Scalar(900));

    // Fast potassium, rate-form kinetics. The alpha rate has a removable
    // singularity at V = -25: whenever exp rounds to exactly 1 (a point in
    // f64, a narrow band when exp is evaluated at reduced precision) the
    // select substitutes the analytic limit.
    Row xs_u = vs + Scalar(25);
    Row xs_den = Scalar(1) - E(-xs_u / Scalar(10));
    Row alpha_x_s = Scalar(0.13) * (xs_den == Scalar(0)).select(Scalar(10), xs_u / xs_den);
    Row beta_x_s = Scalar(1.69) * E(-(vs + Scalar(35)) / Scalar(80));
    Row x_inf_s = alpha_x_s / (alpha_x_s + beta_x_s);
    Row tau_x_s = Scalar(1) / (alpha_x_s + beta_x_s);

    Row i_cal = pv(p.g_cal) * gate_k * gate_k * gate_k * gate_l * (vs - pv(p.v_ca));
    Row i_na_s = pv(p.g_na_s) * m_inf_s * m_inf_s * m_inf_s * gate_h * (vs - pv(p.v_na));
    Row i_kdr_s = pv(p.g_kdr_s) * gate_n * gate_n * gate_n * gate_n * (vs - pv(p.v_k));
    Row i_k_s = pv(p.g_k_s) * gate_x * gate_x * gate_x * gate_x * (vs - pv(p.v_k));
    Row i_leak_s = pv(p.g_leak_s) * (vs - pv(p.v_leak));

    ov(row::cal_k) = k_inf - gate_k;  // tau_k = 1 ms
    ov(row::cal_l) = (l_inf - gate_l) / tau_l;
    ov(row::na_h) = (h_inf_s - gate_h) / tau_h_s;
    ov(row::kdr_n) = (n_inf - gate_n) / tau_n;
    ov(row::k_x) = (x_inf_s - gate_x) / tau_x_s;
    ov(row::v_soma) = (-(i_cal + i_na_s + i_kdr_s + i_k_s + i_leak_s) +
                       pv(p.g_soma_dend) * (vd - vs) + pv(p.g_soma_axon) * (va - vs)) /
                      pv(p.cm_soma);

    // --- axon ---------------------------------------------------------
    const auto gate_h_a = sv(row::na_h_a);
    const auto gate_x_a = sv(row::k_x_a);

    Row m_inf_a = Scalar(1) / (Scalar(1) + E(-(va + Scalar(30)) / Scalar(5.5)));
    Row h_inf_a = Scalar(1) / (Scalar(1) + E((va + Scalar(60)) / Scalar(5.8)));
    Row tau_h_a = Scalar(1.5) * E(-(va + Scalar(40)) / Scalar(33));

    Row xa_u = va + Scalar(25);
    Row xa_den = Scalar(1) - E(-xa_u / Scalar(10));
    Row alpha_x_a = Scalar(0.13) * (xa_den == Scalar(0)).select(Scalar(10), xa_u / xa_den);
    Row beta_x_a = Scalar(1.69) * E(-(va + Scalar(35)) / Scalar(80));
    Row x_inf_a = alpha_x_a / (alpha_x_a + beta_x_a);
    Row tau_x_a = Scalar(1) / (alpha_x_a + beta_x_a);

    Row i_na_a = pv(p.g_na_a) * m_inf_a * m_inf_a * m_inf_a * gate_h_a * (va - pv(p.v_na));
    Row i_k_a = pv(p.g_k_a) * gate_x_a * gate_x_a * gate_x_a * gate_x_a * (va - pv(p.v_k));
    Row i_leak_a = pv(p.g_leak_a) * (va - pv(p.v_leak));

    ov(row::na_h_a) = (h_inf_a - gate_h_a) / tau_h_a;
    ov(row::k_x_a) = (x_inf_a - gate_x_a) / tau_x_a;
    ov(row::v_axon) =
        (-(i_na_a + i_k_a + i_leak_a) + pv(p.g_axon_soma) * (vs - va)) / pv(p.cm_axon);

    // --- dendrite -----------------------------------------------------
    const auto gate_r = sv(row::cah_r);
    const auto gate_s = sv(row::kca_s);
    const auto gate_q = sv(row::h_q);
    const auto ca_conc = sv(row::ca);

    // High-threshold calcium; beta has a removable singularity at V = -8.5,
    // handled like the fast-K alpha above.
    Row r_den_u = vd + Scalar(8.5);
    Row r_den = E(r_den_u / Scalar(5)) - Scalar(1);
    Row alpha_r = Scalar(1.7) / (Scalar(1) + E(-(vd - Scalar(5)) / Scalar(13.9)));
    Row beta_r = Scalar(0.02) * (r_den == Scalar(0)).select(Scalar(5), r_den_u / r_den);
    Row r_inf = alpha_r / (alpha_r + beta_r);
    Row tau_r = Scalar(5) / (alpha_r + beta_r);

    // Calcium-dependent potassium
    Row alpha_s = (Scalar(0.00002) * ca_conc).min(Scalar(0.01));
    Row s_inf = alpha_s / (alpha_s + Scalar(0.015));
    Row tau_s = Scalar(1) / (alpha_s + Scalar(0.015));

    // h-current
    Row q_inf = Scalar(1) / (Scalar(1) + E((vd + Scalar(80)) / Scalar(4)));
    Row tau_q = Scalar(1) / (E(Scalar(-0.086) * vd - Scalar(14.6)) +
                             E(Scalar(0.070) * vd - Scalar(1.87)));

    Row i_cah = pv(p.g_cah) * gate_r * gate_r * (vd - pv(p.v_ca));
    Row i_kca = pv(p.g_kca) * gate_s * (vd - pv(p.v_k));
    Row i_h = pv(p.g_h) * gate_q * (vd - pv(p.v_h));
    Row i_leak_d = pv(p.g_leak_d) * (vd - pv(p.v_leak));

    ov(row::cah_r) = (r_inf - gate_r) / tau_r;
    ov(row::kca_s) = (s_inf - gate_s) / tau_s;
    ov(row::h_q) = (q_inf - gate_q) / tau_q;
    ov(row::ca) = -(Scalar(3) * i_cah) - Scalar(0.075) * ca_conc;
    ov(row::v_dend) = (-(i_cah + i_kca + i_h + i_leak_d) + pv(p.g_dend_soma) * (vs - vd) +
                       i_gj.segment(col0, ncols).transpose() -
                       i_app.segment(col0, ncols).transpose()) /
                      pv(p.cm_dend);
}

// Derivative of the whole network at time t. The gap-junction current
// i_gj must already be gathered (see exchange); the applied current is
// evaluated from the schedule in params.
template <class Scalar, class ExpFn = IeeeExp>
StateMatrix<Scalar> cell_derivatives(const StateMatrix<Scalar>& state,
                                     const CellParameters& params,
                                     const Eigen::ArrayX<Scalar>& i_gj, double t_ms) {
    const Eigen::Index n = state.cols();
    if (state.rows() != state_row::count)
        throw ContractError("cell_derivatives: expected " + std::to_string(state_row::count) +
                            " state rows, got " + std::to_string(state.rows()));
    if (params.size() != n || i_gj.size() != n)
        throw ContractError("cell_derivatives: state, parameters and i_gj disagree on N");

    const auto arrays = ModelArrays<Scalar>::from(params);
    Eigen::ArrayXd i_app_d = applied_current(params.stimuli, n, t_ms);
    const Eigen::ArrayX<Scalar> i_app = i_app_d.cast<Scalar>();

    StateMatrix<Scalar> out(state.rows(), n);
    cell_derivatives_block<Scalar, ExpFn>(state, arrays, i_gj, i_app, 0, n, out);
    return out;
}

}  // namespace iosim
