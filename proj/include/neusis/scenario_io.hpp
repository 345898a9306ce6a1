#pragma once

#include <stdexcept>
#include <string>

#include "neusis/scenario.hpp"

namespace neusis {

struct ScenarioParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScenarioValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses the line-oriented scenario format and validates the result; throws
// ScenarioParseError on malformed input and ScenarioValidationError (with the
// violated invariant names in the message) on a well-formed but invalid
// scenario.
Scenario load_scenario(const std::string& path);

// Parse without the validation gate (the validator itself is under test).
Scenario parse_scenario_file(const std::string& path);

// Canonical serialization: stable section order, shortest round-trip float
// formatting, so identical scenarios produce identical bytes.
std::string serialize_scenario(const Scenario& s,
                               const std::string& occupancy_file = "");
void save_scenario(const Scenario& s, const std::string& path,
                   bool external_grid = false);

std::string format_double(double v);

}  // namespace neusis
