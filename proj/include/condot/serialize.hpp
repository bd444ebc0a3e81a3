#pragma once

#include <string>

#include "condot/measures.hpp"

namespace condot {

struct Plan4;
struct VelocityModel;
struct GmmModel;

// Measure interchange document: {"d":int,"m":int,"atoms":[{"y":[...],"x":[...],"w":real}]}
std::string measure_to_json(const DiscreteJointMeasure& mu);
DiscreteJointMeasure measure_from_json(const std::string& text);

// Plan document: {"entries":[{"i":int,"j":int,"m":real}],"y_diagonal":bool,"value":real}
std::string plan_to_json(const Plan4& plan, double value);

// Versioned model checkpoint: layer layout plus flat parameter array.
// Doubles round-trip exactly.
std::string model_to_json(const VelocityModel& model);
VelocityModel model_from_json(const std::string& text);

std::string gmm_to_json(const GmmModel& gmm);
GmmModel gmm_from_json(const std::string& text);

} // namespace condot
