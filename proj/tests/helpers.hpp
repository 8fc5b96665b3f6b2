#pragma once

#include <cmath>
#include <string>

#include "softland/params_json.hpp"

namespace testutil {

inline std::string source_dir() { return SOFTLAND_SOURCE_DIR; }

inline softland::ParameterSet table1() {
    return softland::load_parameter_set(source_dir() + "/params/paper_table1.json");
}

inline softland::ParameterSet desk() {
    return softland::load_parameter_set(source_dir() + "/params/desk_default.json");
}

inline double rel_err(double got, double want, double scale = 0.0) {
    const double denom = std::max(std::abs(want), scale);
    return denom > 0.0 ? std::abs(got - want) / denom : std::abs(got - want);
}

}  // namespace testutil
