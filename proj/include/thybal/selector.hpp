#pragma once

// Balancing network selection: smallest C_d meeting the overvoltage target,
// current checks, damping/back-off adjustments, static resistor sizing,
// reverse-recovery comparison and optional E-series snapping.

#include "thybal/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace thybal {

enum class Snap { None, E12, E24 };

std::string_view to_string(Snap snap);
std::optional<Snap> parse_snap(std::string_view text);

/// Preferred values of one decade, scaled to [1, 10).
std::span<const double> series_values(Snap snap);

/// Smallest series value >= value (returns value unchanged for Snap::None).
double snap_up(double value, Snap snap);
/// Largest series value <= value.
double snap_down(double value, Snap snap);

struct DesignConstraints {
    double max_overvoltage_pct = 0.0;
    double max_charge_current = 0.0;
    double max_discharge_current = 0.0;
    double max_steady_voltage = 0.0;  // V_d1 for the static resistor
    Snap snap = Snap::None;
    double min_damping_resistance = 3.0;  // kept even when currents allow 0 ohm; 0 disables
};

ValidationOutcome validate(const DesignConstraints& constraints, const CircuitSpec& circuit);

/// R_d values tried, in order, when the currents exceed their limits.
inline constexpr double kDampingLadder[] = {0.0, 1.0, 2.0, 5.0, 10.0, 15.0, 20.0, 30.0};
inline constexpr double kDampingCap = 30.0;
inline constexpr double kBackOffFactor = 0.9;
inline constexpr int kMaxBackOffSteps = 60;

/// Bisection stops once hi / lo <= this.
inline constexpr double kBisectionWidth = 1.005;

struct BisectionTrace {
    std::vector<std::pair<double, double>> brackets;  // (infeasible lo, feasible hi) after each step
};

/// Smallest C_d whose peak overvoltage is at or below target_pct, by
/// bisection on log C_d down to a 0.5% bracket; the feasible end is
/// returned. Throws TargetUnreachable when even the largest admissible
/// (underdamped) C_d misses the target.
double solve_min_cd(const CircuitSpec& circuit, const DeviceParams& dev, const ToleranceSpec& tol, double target_pct,
                    double damping_resistance, BisectionTrace* trace = nullptr);

enum class Step {
    SolveMinCd,       // C_d := solve_min_cd(R_d)
    CheckCurrents,    // evaluation only
    BackOffProbe,     // reduced-C_d alternative evaluated, not applied
    StaticResistor,   // R_s := static_resistor(V_d1)
    SnapComponents,   // C_d rounded up, R_s rounded down
    VerifySnapped,    // evaluation only
    ReverseRecovery,  // comparison only
    Accept,
    Reject,
};

std::string_view to_string(Step step);

struct Adjustment {
    Step step = Step::CheckCurrents;
    double damping_resistance = 0.0;
    double capacitance = 0.0;
    double static_resistance = 0.0;
    std::string note;
};

struct ReverseRecoveryComparison {
    double capacitance = 0.0;  // C_d_rr
    TransientReport stresses;  // at R_d = 0, as a bare-capacitor network
    double ratio = 0.0;        // C_d_rr / chosen C_d
};

struct DesignReport {
    BalancingDesign chosen;
    TransientReport stresses;
    std::optional<ReverseRecoveryComparison> rr_comparison;
    bool feasible = false;
    std::string binding_constraint;               // empty when feasible
    std::optional<BalancingDesign> relaxed;       // back-off alternative, reported only
    std::optional<TransientReport> relaxed_stresses;
    double steady_voltage = 0.0;                  // worst-case steady voltage with chosen R_s
    std::vector<Adjustment> adjustments;
};

DesignReport select_network(const CircuitSpec& circuit, const DeviceParams& dev, const ToleranceSpec& tol,
                            const DesignConstraints& constraints);

/// Re-applies the value-changing steps of an adjustments log and returns
/// the resulting design. Throws Error if a recomputed value disagrees with
/// the logged one.
BalancingDesign replay(const CircuitSpec& circuit, const DeviceParams& dev, const ToleranceSpec& tol,
                       const DesignConstraints& constraints, const std::vector<Adjustment>& log);

}  // namespace thybal
