#pragma once

// JSON helpers shared by config and report code. Private to the library.

#include <json.hpp>

#include "ifsm/config.hpp"

namespace ifsm::detail {

using Json = nlohmann::ordered_json;

Json config_to_json_value(const ExperimentConfig& config);
ExperimentConfig config_from_json_value(const Json& root);

Json schedule_to_json(const StepSchedule& schedule);

}  // namespace ifsm::detail
