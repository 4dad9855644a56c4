#pragma once

#include <string>

#include <json.hpp>

#include "signstab/verify.hpp"

namespace signstab {

/// Versioned machine-readable report ("schema": 1). Key order and float
/// formatting are deterministic, so identical runs serialize byte-identically.
nlohmann::json report_to_json(const StabilityReport& report);

std::string report_to_text(const StabilityReport& report);

}  // namespace signstab
