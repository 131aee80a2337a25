#pragma once

// Strict JSON config: one document, SI base units, unknown keys rejected.
//
// {
//   "circuit":     {"V_s": 12000, "N": 6, "L": 250e-6},
//   "device":      {"t_dmax": 3e-6, "t_dmin": 0, "t_on": 5e-6, "I_Dmax": 350e-6, "I_Dmin": 100e-6,
//                   "Q_max": 2300e-6, "Q_min": 1000e-6, "V_Ddc": 3300, "I_Trms": 550, "I_TSM": 4500},
//   "tolerances":  {"a_c": 0.1, "a_R": 0.05},
//   "design":      {"R_s": 2.5e6, "R_d": 3, "C_d": 40e-9},                       optional
//   "constraints": {"max_overvoltage_pct": 50, "max_charge_current": 100,
//                   "max_discharge_current": 100, "max_steady_voltage": 2700,
//                   "snap": "none", "min_damping_resistance": 3},               optional
//   "sweep":       {"cd_axis": [...], "rd_values": [...], "tdtol_values": [...],
//                   "ton_values": [...], "l_values": [...]}                      optional
// }
//
// V_Ddc, I_Trms, I_TSM, snap and min_damping_resistance may be omitted. A
// missing sweep axis defaults to the base value (64 log points over
// [5 nF, 300 nF] for cd_axis).

#include "thybal/selector.hpp"
#include "thybal/sweep.hpp"
#include "thybal/types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace thybal {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SweepAxes {
    std::optional<std::vector<double>> cd_axis;
    std::optional<std::vector<double>> rd_values;
    std::optional<std::vector<double>> tdtol_values;
    std::optional<std::vector<double>> ton_values;
    std::optional<std::vector<double>> l_values;
};

struct ConfigFile {
    CircuitSpec circuit;
    DeviceParams device;
    ToleranceSpec tolerances;
    std::optional<BalancingDesign> design;
    std::optional<DesignConstraints> constraints;
    std::optional<SweepAxes> sweep;

    SweepBase base() const { return {circuit, device, tolerances}; }
};

/// Throws ConfigError naming the offending key path.
ConfigFile parse_config(const std::string& text);
ConfigFile load_config(const std::filesystem::path& path);

/// Sweep grid from the config's axes; throws ConfigError without a sweep block.
SweepGrid make_grid(const ConfigFile& config);

}  // namespace thybal
