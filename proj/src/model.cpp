#include "iosim/model.hpp"

#include "iosim/kinetics.hpp"

namespace iosim {

void applied_current_range(const StimulusSchedule& stimuli, double t_ms, Eigen::Index col0,
                           Eigen::Index ncols, Eigen::ArrayXd& out) {
    out.segment(col0, ncols).setZero();
    for (const auto& p : stimuli.pulses) {
        if (p.neuron < col0 || p.neuron >= col0 + ncols) continue;
        if (t_ms >= p.start_ms && t_ms < p.end_ms) out[p.neuron] += p.amplitude;
    }
}

Eigen::ArrayXd applied_current(const StimulusSchedule& stimuli, Eigen::Index n, double t_ms) {
    Eigen::ArrayXd out(n);
    applied_current_range(stimuli, t_ms, 0, n, out);
    return out;
}

StateMatrix<double> initial_state(const CellParameters& params, Eigen::Index n, double v_rest_mv,
                                  double ca_rest) {
    if (n < 1) throw ContractError("initial_state: n must be >= 1");
    if (params.size() != n)
        throw ContractError("initial_state: parameter set has length " +
                            std::to_string(params.size()) + ", expected " + std::to_string(n));

    StateMatrix<double> s(state_row::count, n);
    s.row(state_row::v_soma).setConstant(v_rest_mv);
    s.row(state_row::v_dend).setConstant(v_rest_mv);
    s.row(state_row::v_axon).setConstant(v_rest_mv);
    s.row(state_row::ca).setConstant(ca_rest);
    for (const GateKinetics& g : gate_table()) {
        if (g.instantaneous) continue;
        const double input = g.input_row == state_row::ca ? ca_rest : v_rest_mv;
        s.row(g.state_row).setConstant(g.steady_state(input));
    }
    return s;
}

}  // namespace iosim
