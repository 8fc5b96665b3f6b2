#pragma once

// JSON (de)serialization of actuator parameter sets. Keys carry explicit SI
// units in their names; no unit inference is performed. A parameter file also
// carries the constant activation voltage used for the uncontrolled baseline.

#include <fstream>
#include <string>

#include <json.hpp>

#include "softland/actuator.hpp"

namespace softland {

/// A shippable parameter document: the physical model plus the constant
/// activation voltage of the uncontrolled reference operation.
struct ParameterSet {
    ActuatorParams actuator;
    double baseline_voltage_V = 0.0;
    std::string notes;  ///< free-form provenance text, preserved on save
};

inline ParameterSet parameter_set_from_json(const nlohmann::json& j) {
    ParameterSet ps;
    ActuatorParams& p = ps.actuator;
    p.kappa1 = j.at("kappa1_Hinv").get<double>();
    p.kappa2 = j.at("kappa2_Wb").get<double>();
    p.kappa3 = j.at("kappa3_Hinv").get<double>();
    p.kappa4 = j.at("kappa4_Hinv_per_m").get<double>();
    p.kappa5 = j.at("kappa5_per_m").get<double>();
    p.kappa6 = j.at("kappa6_m").get<double>();
    p.z_min = j.at("z_min_m").get<double>();
    p.z_max = j.at("z_max_m").get<double>();
    p.mass = j.at("mass_kg").get<double>();
    p.k_sp = j.at("k_sp_N_per_m").get<double>();
    p.z_sp = j.at("z_sp_m").get<double>();
    p.resistance = j.at("resistance_ohm").get<double>();
    // lambda_sat defaults to the kappa2 saturation pole when absent.
    p.lambda_sat = j.value("lambda_sat_Wb", p.kappa2);
    ps.baseline_voltage_V = j.value("baseline_voltage_V", 0.0);
    ps.notes = j.value("notes", std::string{});
    p.validate();
    return ps;
}

inline nlohmann::json parameter_set_to_json(const ParameterSet& ps) {
    const ActuatorParams& p = ps.actuator;
    nlohmann::json j;
    if (!ps.notes.empty()) j["notes"] = ps.notes;
    j["kappa1_Hinv"] = p.kappa1;
    j["kappa2_Wb"] = p.kappa2;
    j["kappa3_Hinv"] = p.kappa3;
    j["kappa4_Hinv_per_m"] = p.kappa4;
    j["kappa5_per_m"] = p.kappa5;
    j["kappa6_m"] = p.kappa6;
    j["z_min_m"] = p.z_min;
    j["z_max_m"] = p.z_max;
    j["mass_kg"] = p.mass;
    j["k_sp_N_per_m"] = p.k_sp;
    j["z_sp_m"] = p.z_sp;
    j["resistance_ohm"] = p.resistance;
    j["lambda_sat_Wb"] = p.lambda_sat;
    j["baseline_voltage_V"] = ps.baseline_voltage_V;
    return j;
}

inline ParameterSet load_parameter_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open parameter file: " + path);
    nlohmann::json j;
    in >> j;
    return parameter_set_from_json(j);
}

inline void save_parameter_set(const ParameterSet& ps, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write parameter file: " + path);
    out << parameter_set_to_json(ps).dump(2) << '\n';
}

}  // namespace softland
