#pragma once

// JSON and plain-text renderings of reports. Field names follow the symbol
// names used in config files; all values are SI base units.

#include "thybal/oracle.hpp"
#include "thybal/selector.hpp"
#include "thybal/sweep.hpp"
#include "thybal/types.hpp"

#include <json.hpp>

#include <string>

namespace thybal {

nlohmann::ordered_json to_json(const CircuitSpec& circuit);
nlohmann::ordered_json to_json(const DeviceParams& dev);
nlohmann::ordered_json to_json(const ToleranceSpec& tol);
nlohmann::ordered_json to_json(const BalancingDesign& design);
nlohmann::ordered_json to_json(const TransientReport& report);
nlohmann::ordered_json to_json(const DesignConstraints& constraints);
nlohmann::ordered_json to_json(const DesignReport& report);
nlohmann::ordered_json to_json(const oracle::VerificationResult& result);

/// Grid axes, base parameters and row counts of a sweep.
nlohmann::ordered_json sweep_manifest(const SweepGrid& grid, const SweepResult& result);

std::string to_text(const CircuitSpec& circuit, const BalancingDesign& design, const TransientReport& report);
std::string to_text(const DesignReport& report);

}  // namespace thybal
