#include "iosim/parameters.hpp"

#include <array>
#include <fstream>

#include "iosim/errors.hpp"
#include "iosim/json_io.hpp"

namespace iosim {

using nlohmann::json;

void StimulusSchedule::validate(Eigen::Index n) const {
    for (const auto& p : pulses) {
        if (p.neuron < 0 || p.neuron >= n)
            throw ContractError("stimulus pulse addresses neuron " + std::to_string(p.neuron) +
                                " outside [0, " + std::to_string(n) + ")");
        if (!(p.start_ms < p.end_ms))
            throw ContractError("stimulus pulse must have start_ms < end_ms");
    }
}

CellParameters CellParameters::reference(Eigen::Index n) {
    auto fill = [n](double v) { return Eigen::ArrayXd::Constant(n, v).eval(); };
    CellParameters p;
    p.g_cal = fill(1.1);
    p.g_na_s = fill(150.0);
    p.g_kdr_s = fill(9.0);
    p.g_k_s = fill(5.0);
    p.g_leak_s = fill(0.016);
    p.g_cah = fill(4.5);
    p.g_kca = fill(35.0);
    p.g_h = fill(0.12);
    p.g_leak_d = fill(0.01532);
    p.g_na_a = fill(240.0);
    p.g_k_a = fill(20.0);
    p.g_leak_a = fill(0.016);
    p.v_na = fill(55.0);
    p.v_k = fill(-75.0);
    p.v_ca = fill(120.0);
    p.v_h = fill(-43.0);
    p.v_leak = fill(10.0);
    p.cm_soma = fill(1.0);
    p.cm_dend = fill(1.0);
    p.cm_axon = fill(1.0);
    p.g_int = fill(0.13);
    p.p1 = fill(0.25);
    p.p2 = fill(0.15);
    p.g_gj = fill(0.05);
    return p;
}

namespace {

struct NamedField {
    const char* group;
    const char* name;
    Eigen::ArrayXd CellParameters::* member;
    bool require_nonnegative;
};

constexpr std::array<ConductanceField, 12> kConductances{{
    {"CaL", &CellParameters::g_cal},
    {"Na_s", &CellParameters::g_na_s},
    {"Kdr_s", &CellParameters::g_kdr_s},
    {"K_s", &CellParameters::g_k_s},
    {"leak_s", &CellParameters::g_leak_s},
    {"CaH", &CellParameters::g_cah},
    {"KCa", &CellParameters::g_kca},
    {"h", &CellParameters::g_h},
    {"leak_d", &CellParameters::g_leak_d},
    {"Na_a", &CellParameters::g_na_a},
    {"K_a", &CellParameters::g_k_a},
    {"leak_a", &CellParameters::g_leak_a},
}};

const std::array<NamedField, 24>& all_fields() {
    static const std::array<NamedField, 24> fields{{
        {"conductances", "CaL", &CellParameters::g_cal, true},
        {"conductances", "Na_s", &CellParameters::g_na_s, true},
        {"conductances", "Kdr_s", &CellParameters::g_kdr_s, true},
        {"conductances", "K_s", &CellParameters::g_k_s, true},
        {"conductances", "leak_s", &CellParameters::g_leak_s, true},
        {"conductances", "CaH", &CellParameters::g_cah, true},
        {"conductances", "KCa", &CellParameters::g_kca, true},
        {"conductances", "h", &CellParameters::g_h, true},
        {"conductances", "leak_d", &CellParameters::g_leak_d, true},
        {"conductances", "Na_a", &CellParameters::g_na_a, true},
        {"conductances", "K_a", &CellParameters::g_k_a, true},
        {"conductances", "leak_a", &CellParameters::g_leak_a, true},
        {"reversal_potentials", "Na", &CellParameters::v_na, false},
        {"reversal_potentials", "K", &CellParameters::v_k, false},
        {"reversal_potentials", "Ca", &CellParameters::v_ca, false},
        {"reversal_potentials", "h", &CellParameters::v_h, false},
        {"reversal_potentials", "leak", &CellParameters::v_leak, false},
        {"capacitances", "soma", &CellParameters::cm_soma, true},
        {"capacitances", "dend", &CellParameters::cm_dend, true},
        {"capacitances", "axon", &CellParameters::cm_axon, true},
        {"coupling", "g_int", &CellParameters::g_int, true},
        {"coupling", "p1", &CellParameters::p1, true},
        {"coupling", "p2", &CellParameters::p2, true},
        {"coupling", "g_gj", &CellParameters::g_gj, true},
    }};
    return fields;
}

json array_or_scalar(const Eigen::ArrayXd& a) {
    if (a.size() > 0 && (a == a[0]).all()) return json(a[0]);
    return json(std::vector<double>(a.data(), a.data() + a.size()));
}

Eigen::ArrayXd broadcast(const json& j, Eigen::Index n, const std::string& what) {
    if (j.is_number()) return Eigen::ArrayXd::Constant(n, j.get<double>());
    if (j.is_array()) {
        if (static_cast<Eigen::Index>(j.size()) != n)
            throw ConfigError(what + ": array length " + std::to_string(j.size()) +
                              " does not match N = " + std::to_string(n));
        Eigen::ArrayXd out(n);
        for (Eigen::Index i = 0; i < n; ++i) out[i] = j[i].get<double>();
        return out;
    }
    throw ConfigError(what + ": expected number or array");
}

}  // namespace

std::span<const ConductanceField> conductance_fields() { return kConductances; }

void CellParameters::validate() const {
    const Eigen::Index n = size();
    if (n < 1) throw ContractError("CellParameters: empty parameter set");
    for (const auto& f : all_fields()) {
        const Eigen::ArrayXd& a = this->*(f.member);
        if (a.size() != n)
            throw ContractError(std::string("CellParameters: field ") + f.group + "." + f.name +
                                " has length " + std::to_string(a.size()) + ", expected " +
                                std::to_string(n));
        if (f.require_nonnegative && (a < 0.0).any())
            throw ContractError(std::string("CellParameters: field ") + f.group + "." + f.name +
                                " must be non-negative");
    }
    stimuli.validate(n);
}

nlohmann::json parameters_to_json(const CellParameters& params) {
    params.validate();
    json j;
    for (const auto& f : all_fields()) j[f.group][f.name] = array_or_scalar(params.*(f.member));
    j["stimuli"] = json::array();
    for (const auto& s : params.stimuli.pulses)
        j["stimuli"].push_back({{"neuron", s.neuron},
                                {"start_ms", s.start_ms},
                                {"end_ms", s.end_ms},
                                {"amplitude", s.amplitude}});
    return j;
}

CellParameters parameters_from_json(const nlohmann::json& j, Eigen::Index n) {
    CellParameters p = CellParameters::reference(n);
    for (const auto& f : all_fields()) {
        if (!j.contains(f.group)) continue;
        const json& g = j.at(f.group);
        if (!g.contains(f.name)) continue;
        p.*(f.member) = broadcast(g.at(f.name), n, std::string(f.group) + "." + f.name);
    }
    p.stimuli.pulses.clear();
    if (j.contains("stimuli")) {
        for (const json& s : j.at("stimuli")) {
            StimulusPulse pulse;
            pulse.neuron = s.at("neuron").get<Eigen::Index>();
            pulse.start_ms = s.at("start_ms").get<double>();
            pulse.end_ms = s.at("end_ms").get<double>();
            pulse.amplitude = s.at("amplitude").get<double>();
            p.stimuli.pulses.push_back(pulse);
        }
    }
    p.validate();
    return p;
}

CellParameters load_parameters_json(const std::string& path, Eigen::Index n) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open parameter file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse " + path + ": " + e.what());
    }
    try {
        return parameters_from_json(j, n);
    } catch (const json::exception& e) {
        throw ConfigError("bad parameter file " + path + ": " + e.what());
    }
}

void save_parameters_json(const CellParameters& params, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write parameter file " + path);
    out << parameters_to_json(params).dump(2) << "\n";
}

}  // namespace iosim
