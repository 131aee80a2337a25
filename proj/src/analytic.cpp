#include "thybal/analytic.hpp"

#include "thybal/errors.hpp"

#include <cmath>
#include <sstream>

namespace thybal {

namespace {

std::string out_of_window(double t, double lo, double hi)
{
    std::ostringstream msg;
    msg << "t = " << t << " s is outside the charging window [" << lo << ", " << hi << "] s";
    return msg.str();
}

}  // namespace

double drive_slope(const CircuitSpec& circuit, const DeviceParams& dev)
{
    return circuit.source_voltage * (circuit.device_count - 1) / (circuit.device_count * dev.fall_time);
}

double drive_voltage(double t, const CircuitSpec& circuit, const DeviceParams& dev)
{
    if (t < dev.min_delay) {
        std::ostringstream msg;
        msg << "drive voltage undefined before t_dmin (t = " << t << " s)";
        throw DomainError(msg.str());
    }
    // The other devices stop falling once they reach zero at t_dmin + t_on.
    if (t > dev.min_delay + dev.fall_time)
        return circuit.source_voltage;
    return circuit.static_share() + drive_slope(circuit, dev) * (t - dev.min_delay);
}

double discharge_forcing_current(const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design)
{
    return circuit.source_voltage * design.effective_capacitance() / (circuit.device_count * dev.fall_time);
}

ChargingModel::ChargingModel(const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design)
    : circuit_(circuit), dev_(dev), design_(design), params_(second_order_params(circuit, design)), regime_(regime_of(dev))
{
    if (regime_ == Regime::Regime2) {
        Regime2Constants k;
        k.boundary_time = dev_.min_delay + dev_.fall_time;
        k.current = ramp_current(k.boundary_time);
        k.device_voltage = ramp_device_voltage(k.boundary_time);
        k.capacitor_voltage = k.device_voltage - k.current * design_.damping_resistance;
        k.cos_coeff = k.current;
        k.sin_coeff = (circuit_.source_voltage - k.capacitor_voltage - k.current * circuit_.inductance * params_.damping_rate) /
                      (circuit_.inductance * params_.damped_frequency);
        continuation_ = k;
    }
}

double ChargingModel::ramp_current(double t) const
{
    const double s = t - dev_.min_delay;
    const double c_eff = design_.effective_capacitance();
    const double amplitude = drive_slope(circuit_, dev_) * c_eff;
    const double delta = params_.damping_rate;
    const double omega = params_.damped_frequency;
    // 1/(omega_d sqrt(L C)) * cos(omega_d s - phi) expanded, which is exactly 1 at s = 0
    const double oscillation = std::cos(omega * s) + (delta / omega) * std::sin(omega * s);
    return amplitude * (1.0 - std::exp(-delta * s) * oscillation);
}

double ChargingModel::ramp_device_voltage(double t) const
{
    const double s = t - dev_.min_delay;
    const double omega = params_.damped_frequency;
    const double transient = std::exp(-params_.damping_rate * s) * std::sin(omega * s) / omega;
    return circuit_.static_share() + drive_slope(circuit_, dev_) * (s - transient);
}

double ChargingModel::continuation_current(double t) const
{
    const auto& k = continuation_.value();
    const double s = t - k.boundary_time;
    const double omega = params_.damped_frequency;
    return std::exp(-params_.damping_rate * s) * (k.cos_coeff * std::cos(omega * s) + k.sin_coeff * std::sin(omega * s));
}

double ChargingModel::continuation_device_voltage(double t) const
{
    const auto& k = continuation_.value();
    const double s = t - k.boundary_time;
    const double omega = params_.damped_frequency;
    const double delta = params_.damping_rate;
    const double sin_part = (k.cos_coeff * omega + k.sin_coeff * delta) * std::sin(omega * s);
    const double cos_part = (k.cos_coeff * delta - k.sin_coeff * omega) * std::cos(omega * s);
    return circuit_.source_voltage + circuit_.inductance * std::exp(-delta * s) * (sin_part + cos_part);
}

void ChargingModel::check_domain(double t) const
{
    if (!(t >= dev_.min_delay && t <= dev_.max_delay))
        throw DomainError(out_of_window(t, dev_.min_delay, dev_.max_delay));
}

double ChargingModel::current(double t) const
{
    check_domain(t);
    if (continuation_ && t > continuation_->boundary_time)
        return continuation_current(t);
    return ramp_current(t);
}

double ChargingModel::device_voltage(double t) const
{
    check_domain(t);
    if (continuation_ && t > continuation_->boundary_time)
        return continuation_device_voltage(t);
    return ramp_device_voltage(t);
}

double charging_current(double t, const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design)
{
    return ChargingModel(circuit, dev, design).current(t);
}

double vak1(double t, const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design)
{
    return ChargingModel(circuit, dev, design).device_voltage(t);
}

ChargingPeak peak_charging(const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design)
{
    const ChargingModel model(circuit, dev, design);
    return {model.current(dev.max_delay), model.device_voltage(dev.max_delay)};
}

double discharge_current(double t, const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design,
                         double initial_current)
{
    if (t < dev.max_delay) {
        std::ostringstream msg;
        msg << "discharge current undefined before t_dmax (t = " << t << " s)";
        throw DomainError(msg.str());
    }
    const double forced = discharge_forcing_current(circuit, dev, design);
    const double elapsed = t - dev.max_delay;
    const double tau = design.damping_resistance * design.effective_capacitance();
    double decay = 0.0;
    if (elapsed == 0.0)
        decay = 1.0;
    else if (tau > 0.0)
        decay = std::exp(-elapsed / tau);
    return (initial_current + forced) * decay - forced;
}

double first_device_turnon_time(const CircuitSpec& circuit, const DeviceParams& dev, double peak_device_voltage)
{
    return peak_device_voltage * circuit.device_count * dev.fall_time / circuit.source_voltage + dev.max_delay;
}

double peak_discharge(const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design)
{
    const ChargingPeak peak = peak_charging(circuit, dev, design);
    const double t_on1 = first_device_turnon_time(circuit, dev, peak.device_voltage);
    return discharge_current(t_on1, circuit, dev, design, peak.current);
}

double overvoltage_percent(const CircuitSpec& circuit, double peak_device_voltage)
{
    const double share = circuit.static_share();
    return 100.0 * (peak_device_voltage - share) / share;
}

TransientReport analyze(const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design)
{
    const ChargingPeak peak = peak_charging(circuit, dev, design);
    TransientReport r;
    r.regime = regime_of(dev);
    r.peak_charge_current = peak.current;
    r.peak_device_voltage = peak.device_voltage;
    r.overvoltage_pct = overvoltage_percent(circuit, peak.device_voltage);
    r.conduction_time = first_device_turnon_time(circuit, dev, peak.device_voltage);
    r.peak_discharge_current = discharge_current(r.conduction_time, circuit, dev, design, peak.current);
    return r;
}

double static_resistor(const CircuitSpec& circuit, const DeviceParams& dev, const ToleranceSpec& tol,
                       double max_steady_voltage)
{
    const double n = circuit.device_count;
    const double a = tol.resistor;
    const double leakage_spread = dev.max_leakage - dev.min_leakage;
    if (!(leakage_spread > 0.0))
        throw InvalidInput("static resistor needs I_Dmax > I_Dmin");
    const double numerator = max_steady_voltage * (n * (1.0 - a) + 2.0 * a) - (1.0 + a) * circuit.source_voltage;
    if (numerator < 0.0) {
        std::ostringstream msg;
        msg << "steady-state limit V_d1 = " << max_steady_voltage << " V is unreachable for N = " << circuit.device_count
            << " at a_R = " << a;
        throw InfeasibleStatic(msg.str());
    }
    return numerator / ((n - 1.0) * (1.0 - a * a) * leakage_spread);
}

double steady_voltage_for(const CircuitSpec& circuit, const DeviceParams& dev, const ToleranceSpec& tol,
                          double static_resistance)
{
    const double n = circuit.device_count;
    const double a = tol.resistor;
    const double leakage_spread = dev.max_leakage - dev.min_leakage;
    return (static_resistance * (n - 1.0) * (1.0 - a * a) * leakage_spread + (1.0 + a) * circuit.source_voltage) /
           (n * (1.0 - a) + 2.0 * a);
}

double reverse_recovery_cd(const CircuitSpec& circuit, const DeviceParams& dev, const ToleranceSpec& tol,
                           double max_device_voltage)
{
    const double a = tol.capacitor;
    const double sharing = 1.0 + (circuit.device_count - 1) * (1.0 - a) / (1.0 + a);
    const double headroom = max_device_voltage * sharing - circuit.source_voltage;
    if (!(headroom > 0.0) || !(1.0 - a > 0.0)) {
        std::ostringstream msg;
        msg << "reverse-recovery sizing has no headroom at V_d1 = " << max_device_voltage << " V";
        throw InfeasibleRR(msg.str());
    }
    return sharing * (dev.max_recovery_charge - dev.min_recovery_charge) / ((1.0 - a) * headroom);
}

}  // namespace thybal
