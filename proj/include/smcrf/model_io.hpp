#pragma once

#include <iosfwd>
#include <string>

#include "smcrf/features.hpp"

namespace smcrf {

// Tab-separated text model file. Weights are printed with 17 significant
// digits, so save -> load -> save is byte-identical.
void save_model(std::ostream& out, const Model& m);
void save_model(const std::string& path, const Model& m);

Model load_model(std::istream& in);
Model load_model(const std::string& path);

// "%.17g" rendering used by the model file and the duration-fit output.
std::string format_g17(double v);

}  // namespace smcrf
