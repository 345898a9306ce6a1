#pragma once

#include <string>

#include "neusis/mission.hpp"

namespace neusis {

// Line-delimited records, one ordered-key JSON object per line. Identical
// missions serialize to identical bytes.
std::string serialize_trace(const MissionTrace& trace);
void save_trace(const MissionTrace& trace, const std::string& path);
MissionTrace load_trace(const std::string& path);

}  // namespace neusis
