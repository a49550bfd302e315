#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace iosim {

// One externally applied current pulse. The amplitude enters the dendritic
// voltage equation with the cable-equation sign, i.e. negative amplitudes
// depolarize.
struct StimulusPulse {
    Eigen::Index neuron = 0;
    double start_ms = 0.0;
    double end_ms = 0.0;
    double amplitude = 0.0;  // uA/cm^2
};

// Piecewise-constant applied current; overlapping pulses sum.
struct StimulusSchedule {
    std::vector<StimulusPulse> pulses;
    void validate(Eigen::Index n) const;
};

// Per-neuron electrical parameters of the three-compartment cell. Every
// field is an array of length N so individual neurons can be heterogeneous.
//
// Units follow the usual Hodgkin-Huxley conventions: conductances mS/cm^2,
// potentials mV, capacitances uF/cm^2, currents uA/cm^2, time ms.
struct CellParameters {
    // Maximal channel conductances.
    Eigen::ArrayXd g_cal;     // soma low-threshold Ca
    Eigen::ArrayXd g_na_s;    // soma Na
    Eigen::ArrayXd g_kdr_s;   // soma delayed-rectifier K
    Eigen::ArrayXd g_k_s;     // soma fast K
    Eigen::ArrayXd g_leak_s;  // soma leak
    Eigen::ArrayXd g_cah;     // dendrite high-threshold Ca
    Eigen::ArrayXd g_kca;     // dendrite Ca-dependent K
    Eigen::ArrayXd g_h;       // dendrite h-current
    Eigen::ArrayXd g_leak_d;  // dendrite leak
    Eigen::ArrayXd g_na_a;    // axon Na
    Eigen::ArrayXd g_k_a;     // axon K
    Eigen::ArrayXd g_leak_a;  // axon leak

    // Reversal potentials.
    Eigen::ArrayXd v_na, v_k, v_ca, v_h, v_leak;

    // Membrane capacitance per compartment.
    Eigen::ArrayXd cm_soma, cm_dend, cm_axon;

    // Intracompartment coupling: conductance g_int with the soma/dendrite
    // surface ratio p1 and axon/soma surface ratio p2.
    Eigen::ArrayXd g_int, p1, p2;

    // Gap-junction conductance; incoming junction currents use the value
    // stored at the receiving (target) neuron.
    Eigen::ArrayXd g_gj;

    StimulusSchedule stimuli;

    // Reference parameter set of the 2012 model, replicated n times.
    static CellParameters reference(Eigen::Index n);

    Eigen::Index size() const { return g_cal.size(); }
    void validate() const;  // equal lengths, non-negative conductances
};

// Name -> member table for the twelve channel conductances, in a fixed
// order shared by the JSON format and the stress-scenario jitter.
using ConductanceField = std::pair<const char*, Eigen::ArrayXd CellParameters::*>;
std::span<const ConductanceField> conductance_fields();

// JSON document I/O. Scalars in the file broadcast to length n; arrays
// must already have length n.
CellParameters load_parameters_json(const std::string& path, Eigen::Index n);
void save_parameters_json(const CellParameters& params, const std::string& path);

}  // namespace iosim
