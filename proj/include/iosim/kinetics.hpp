#pragma once

#include <initializer_list>
#include <span>
#include <utility>

#include "iosim/state.hpp"

namespace iosim {

// Channel kinetics of the three-compartment inferior-olive cell.
//
// The gating equations and constants are transcribed from the
// conductance-level IO model of De Gruijl et al. 2012 (PLoS Comput Biol
// 8(12):e1002814), which extends the two-compartment cell of Schweighofer
// et al. 1999 (J Neurophysiol 82:804-817) with an axon hillock. The same
// expressions are hardcoded in the vectorized derivative kernel
// (model.hpp); the scalar forms here drive initialization and tests.

// Axonal sodium channel: activation is instantaneous (m = m_inf(V)),
// inactivation relaxes with tau_h.
struct NaAxonKinetics {
    double m_inf;
    double h_inf;
    double tau_h;  // ms
};
NaAxonKinetics na_axon_kinetics(double v_axon);

// First-order relaxation of a gating variable: (n_inf - n) / tau.
double gate_derivative(double n, double n_inf, double tau_ms);

// Hodgkin-Huxley channel current g_bar * prod(gate^m) * (v - e_rev).
double channel_current(double g_bar, std::span<const std::pair<double, int>> gates,
                       double v, double e_rev);
double channel_current(double g_bar, std::initializer_list<std::pair<double, int>> gates,
                       double v, double e_rev);

// Resistive current flowing into compartment `self` from `other`.
double compartment_current(double g, double v_self, double v_other);

// Closed-form description of one gating variable: a steady state in [0,1]
// and a relaxation time, both functions of the driving state row (a
// compartment voltage, or calcium for the KCa gate). Instantaneous gates
// have no state row and no time constant.
struct GateKinetics {
    const char* name;
    int state_row;  // row the gate integrates into; -1 if instantaneous
    int input_row;  // row the kinetics read (a voltage, or state_row::ca)
    int exponent;   // power the gate is raised to in the channel current
    bool instantaneous;
    double (*steady_state)(double input);
    double (*time_constant)(double input);  // null for instantaneous gates
};

// The full gate complement of the 14-state cell, in state-row order with
// the two instantaneous Na activations appended.
std::span<const GateKinetics> gate_table();

}  // namespace iosim
