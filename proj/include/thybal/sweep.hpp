#pragma once

// Design-curve tabulation over Cartesian parameter grids.

#include "thybal/types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace thybal {

struct SweepBase {
    CircuitSpec circuit;
    DeviceParams device;
    ToleranceSpec tolerances;
};

struct SweepGrid {
    std::vector<double> capacitances;    // C_d axis
    std::vector<double> damping_values;  // R_d
    std::vector<double> spread_values;   // t_dTol; t_dmax = t_dmin + t_dTol
    std::vector<double> fall_times;      // t_on
    std::vector<double> inductances;     // L
    SweepBase base;

    /// Grid with every parameter axis pinned to the base value and the
    /// default 64-point log-spaced C_d axis over [5 nF, 300 nF].
    static SweepGrid around(const SweepBase& base, double damping_resistance);

    std::size_t point_count() const;
};

std::vector<double> log_space(double lo, double hi, std::size_t count);

/// 64 points, log spaced in [5 nF, 300 nF].
std::vector<double> default_capacitance_axis();

struct SweepRow {
    double capacitance = 0.0;
    double damping_resistance = 0.0;
    double delay_spread = 0.0;
    double fall_time = 0.0;
    double inductance = 0.0;
    bool skipped = false;  // not underdamped; metrics empty
    double overvoltage_pct = 0.0;
    double peak_charge_current = 0.0;
    double peak_discharge_current = 0.0;  // signed
    std::optional<double> current_ratio;  // I_ch_max / |I_dis_max| when |I_dis_max| > 0
};

struct SweepResult {
    std::vector<SweepRow> rows;

    std::size_t skipped_count() const;
};

/// Validates the grid: every axis non-empty and strictly increasing with
/// positive physical values. Returns the violations found.
ValidationOutcome validate(const SweepGrid& grid);

/// Evaluates every grid point. Rows are ordered lexicographically over
/// (C_d, R_d, t_dTol, t_on, L) regardless of how many worker threads run.
/// Throws EmptyGrid for an empty axis, InvalidInput for other grid defects.
SweepResult run_sweep(const SweepGrid& grid, unsigned threads = 0);

/// Design for one sweep point. R_s is not part of the transient and is
/// pinned to 1 ohm.
struct SweepPoint {
    CircuitSpec circuit;
    DeviceParams device;
    BalancingDesign design;
};
SweepPoint sweep_point(const SweepBase& base, double capacitance, double damping_resistance, double delay_spread,
                       double fall_time, double inductance);

void export_csv(const SweepResult& result, const std::filesystem::path& path);
std::string to_csv(const SweepResult& result);

}  // namespace thybal
