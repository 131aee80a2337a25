#pragma once

// Closed-form turn-on transient of the slowest device's RC balancing network.
//
// Charging cycle (t_dmin <= t <= t_dmax): the other N-1 devices ramp their
// anode voltage down linearly, driving L + R_d + (1 - a_c) C_d with a ramp
// (Regime1) or a ramp followed by a constant V_s (Regime2). Discharging cycle
// (t >= t_dmax): the slow device fires and C_d dumps into it through R_d.
//
// Sign convention: charging current is positive, discharging current is
// negative. Limits are compared against magnitudes.

#include "thybal/types.hpp"

#include <optional>

namespace thybal {

/// State carried across the ramp-to-constant drive transition at
/// t_1 = t_dmin + t_on in Regime2.
struct Regime2Constants {
    double boundary_time = 0.0;      // t_1
    double current = 0.0;            // i_ch(t_1)
    double device_voltage = 0.0;     // v_AK1(t_1)
    double capacitor_voltage = 0.0;  // v_AK1(t_1) - i_ch(t_1) R_d
    double cos_coeff = 0.0;          // K_1
    double sin_coeff = 0.0;          // K_2
};

/// Voltage across L and the slow device while the other devices fall.
/// Throws DomainError for t < t_dmin.
double drive_voltage(double t, const CircuitSpec& circuit, const DeviceParams& dev);

/// Slope of the other devices' summed fall, V_s (N - 1) / (N t_on).
double drive_slope(const CircuitSpec& circuit, const DeviceParams& dev);

/// Forced discharge current V_s (1 - a_c) C_d / (N t_on). The slow device's
/// anode voltage falls with the same slope as the others.
double discharge_forcing_current(const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design);

/// Evaluates the charging-cycle closed forms for one design point. Second
/// order parameters and the Regime2 continuation are computed once here.
class ChargingModel {
public:
    /// Throws NotUnderdamped.
    ChargingModel(const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design);

    /// Charging current at t in [t_dmin, t_dmax]; DomainError outside.
    double current(double t) const;
    /// First-device anode voltage at t in [t_dmin, t_dmax]; DomainError outside.
    double device_voltage(double t) const;

    Regime regime() const { return regime_; }
    const SecondOrderParams& params() const { return params_; }
    const std::optional<Regime2Constants>& continuation() const { return continuation_; }

    // Closed forms without the domain check. The ramp solution is valid for
    // t <= t_1, the continuation for t >= t_1 in Regime2.
    double ramp_current(double t) const;
    double ramp_device_voltage(double t) const;
    double continuation_current(double t) const;
    double continuation_device_voltage(double t) const;

private:
    void check_domain(double t) const;

    CircuitSpec circuit_;
    DeviceParams dev_;
    BalancingDesign design_;
    SecondOrderParams params_;
    Regime regime_;
    std::optional<Regime2Constants> continuation_;
};

double charging_current(double t, const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design);
double vak1(double t, const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design);

struct ChargingPeak {
    double current = 0.0;         // I_ch_max
    double device_voltage = 0.0;  // V_AK1_max
};

/// Charging current and device voltage at the instant the slow device
/// fires, t = t_dmax.
ChargingPeak peak_charging(const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design);

/// First-order RC discharge starting from `initial_current` = i_ch(t_dmax).
/// Throws DomainError for t < t_dmax. At R_d = 0 the capacitor current jumps
/// to the forced value for every t > t_dmax.
double discharge_current(double t, const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design,
                         double initial_current);

/// Time at which the slow device reaches forward conduction, falling from
/// `peak_device_voltage` with slope V_s / (N t_on).
double first_device_turnon_time(const CircuitSpec& circuit, const DeviceParams& dev, double peak_device_voltage);

/// Signed discharge current at t_on1.
double peak_discharge(const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design);

double overvoltage_percent(const CircuitSpec& circuit, double peak_device_voltage);

/// Full set of peak stresses for one design point.
TransientReport analyze(const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design);

/// Static sharing resistor that holds the worst device at or below
/// `max_steady_voltage` given leakage mismatch and resistor tolerance.
/// Throws InfeasibleStatic when no positive resistance works.
double static_resistor(const CircuitSpec& circuit, const DeviceParams& dev, const ToleranceSpec& tol,
                       double max_steady_voltage);

/// Inverse of static_resistor: worst-case steady device voltage obtained
/// with a given R_s.
double steady_voltage_for(const CircuitSpec& circuit, const DeviceParams& dev, const ToleranceSpec& tol,
                          double static_resistance);

/// Conventional C_d sized from the reverse-recovery charge spread.
/// Throws InfeasibleRR when the bracketed denominator is not positive.
double reverse_recovery_cd(const CircuitSpec& circuit, const DeviceParams& dev, const ToleranceSpec& tol,
                           double max_device_voltage);

}  // namespace thybal
