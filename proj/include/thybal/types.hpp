#pragma once

// Domain value objects for the series-thyristor balancing network.
// All quantities are SI base units: volts, amperes, seconds, henries,
// farads, ohms. Unit suffixes only appear at the CLI boundary.

#include <string>
#include <string_view>
#include <vector>

namespace thybal {

/// Crowbar-level electrical context.
struct CircuitSpec {
    double source_voltage = 0.0;  // V_s
    int device_count = 0;         // N series thyristors
    double inductance = 0.0;      // di/dt limiting inductor L

    /// Blocking voltage each device sees in steady state.
    double static_share() const { return source_voltage / device_count; }
};

/// Thyristor datasheet values.
struct DeviceParams {
    double max_delay = 0.0;       // t_dmax
    double min_delay = 0.0;       // t_dmin
    double fall_time = 0.0;       // linearised anode-voltage fall time t_on
    double max_leakage = 0.0;     // I_Dmax
    double min_leakage = 0.0;     // I_Dmin
    double rated_dc_voltage = 0.0;
    double rms_current = 0.0;
    double surge_current = 0.0;
    double max_recovery_charge = 0.0;
    double min_recovery_charge = 0.0;

    /// Turn-on delay mismatch t_dmax - t_dmin.
    double delay_spread() const { return max_delay - min_delay; }
};

/// Fractional component tolerances.
struct ToleranceSpec {
    double capacitor = 0.0;  // a_c
    double resistor = 0.0;   // a_R
};

/// Candidate static + dynamic balancing network.
struct BalancingDesign {
    double static_resistance = 0.0;   // R_s
    double damping_resistance = 0.0;  // R_d
    double capacitance = 0.0;         // nominal C_d
    ToleranceSpec tolerances;

    /// Worst-case capacitance across the slowest device, (1 - a_c) * C_d.
    double effective_capacitance() const { return (1.0 - tolerances.capacitor) * capacitance; }
};

struct SecondOrderParams {
    double damping_rate = 0.0;     // R_d / 2L
    double damped_frequency = 0.0; // rad/s
    double phase = 0.0;            // atan(damping_rate / damped_frequency)
};

/// Which drive shape the charging cycle sees. Regime1 when the delay
/// spread fits inside the fall time, Regime2 when the other devices finish
/// falling before the slow one fires.
enum class Regime { Regime1, Regime2 };

std::string_view to_string(Regime regime);

/// Regime is decided purely by the delay spread against the fall time.
Regime regime_of(const DeviceParams& dev);

struct TransientReport {
    double peak_device_voltage = 0.0;    // V_AK1_max
    double overvoltage_pct = 0.0;        // V_d_ov
    double peak_charge_current = 0.0;    // I_ch_max
    double peak_discharge_current = 0.0; // I_dis_max, signed (negative while discharging)
    double conduction_time = 0.0;        // t_on1
    Regime regime = Regime::Regime1;

    double discharge_magnitude() const;
};

enum class Channel { Drive, ChargeCurrent, DeviceVoltage, DischargeCurrent };

std::string_view to_string(Channel channel);

/// Sampled channel. Sample times are strictly increasing and `t` and `y`
/// always have equal length.
struct Waveform {
    Channel channel = Channel::Drive;
    std::vector<double> t;
    std::vector<double> y;

    std::size_t size() const { return t.size(); }
    bool well_formed() const;
};

struct Violation {
    std::string field;
    std::string message;
};

struct ValidationOutcome {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    bool mentions(std::string_view field) const;
};

ValidationOutcome validate(const CircuitSpec& circuit);
ValidationOutcome validate(const DeviceParams& dev);
ValidationOutcome validate(const ToleranceSpec& tol);
ValidationOutcome validate(const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design);

/// Damping rate, damped frequency and phase of the charging loop (L, R_d,
/// worst-case C_d). Throws NotUnderdamped when the characteristic roots are
/// real.
SecondOrderParams second_order_params(const CircuitSpec& circuit, const BalancingDesign& design);

bool is_underdamped(const CircuitSpec& circuit, const BalancingDesign& design);

}  // namespace thybal
