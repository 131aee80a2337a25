#include "thybal/types.hpp"

#include "thybal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace thybal {

std::string_view to_string(Regime regime)
{
    return regime == Regime::Regime1 ? "Regime1" : "Regime2";
}

Regime regime_of(const DeviceParams& dev)
{
    return dev.delay_spread() <= dev.fall_time ? Regime::Regime1 : Regime::Regime2;
}

double TransientReport::discharge_magnitude() const
{
    return std::abs(peak_discharge_current);
}

std::string_view to_string(Channel channel)
{
    switch (channel) {
    case Channel::Drive: return "v_drive";
    case Channel::ChargeCurrent: return "i_ch";
    case Channel::DeviceVoltage: return "v_AK1";
    case Channel::DischargeCurrent: return "i_dis";
    }
    return "unknown";
}

bool Waveform::well_formed() const
{
    if (t.size() != y.size())
        return false;
    return std::adjacent_find(t.begin(), t.end(), std::greater_equal<>{}) == t.end();
}

bool ValidationOutcome::mentions(std::string_view field) const
{
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.field == field; });
}

namespace {

// NaN fails every comparison, so `!(x > 0)` also rejects NaN.
void require(ValidationOutcome& out, bool condition, std::string field, std::string message)
{
    if (!condition)
        out.violations.push_back({std::move(field), std::move(message)});
}

void append(ValidationOutcome& out, const ValidationOutcome& more)
{
    out.violations.insert(out.violations.end(), more.violations.begin(), more.violations.end());
}

}  // namespace

ValidationOutcome validate(const CircuitSpec& circuit)
{
    ValidationOutcome out;
    require(out, circuit.source_voltage > 0.0 && std::isfinite(circuit.source_voltage), "V_s", "V_s > 0");
    require(out, circuit.device_count >= 2, "N", "N >= 2");
    require(out, circuit.inductance > 0.0 && std::isfinite(circuit.inductance), "L", "L > 0");
    return out;
}

ValidationOutcome validate(const DeviceParams& dev)
{
    ValidationOutcome out;
    require(out, dev.min_delay >= 0.0, "t_dmin", "t_dmin >= 0");
    require(out, dev.min_delay <= dev.max_delay, "t_dmax", "t_dmin <= t_dmax");
    require(out, dev.fall_time > 0.0 && std::isfinite(dev.fall_time), "t_on", "t_on > 0");
    require(out, dev.min_leakage >= 0.0, "I_Dmin", "I_Dmin >= 0");
    require(out, dev.max_leakage > dev.min_leakage, "I_Dmax", "I_Dmax > I_Dmin");
    require(out, dev.min_recovery_charge >= 0.0, "Q_min", "Q_min >= 0");
    require(out, dev.max_recovery_charge >= dev.min_recovery_charge, "Q_max", "Q_max >= Q_min");
    return out;
}

ValidationOutcome validate(const ToleranceSpec& tol)
{
    ValidationOutcome out;
    require(out, tol.capacitor >= 0.0 && 1.0 - tol.capacitor > 0.0, "a_c", "0 <= a_c and (1 - a_c) > 0");
    require(out, tol.resistor >= 0.0 && 1.0 - tol.resistor * tol.resistor > 0.0, "a_R",
            "0 <= a_R and (1 - a_R^2) > 0");
    return out;
}

ValidationOutcome validate(const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design)
{
    ValidationOutcome out = validate(circuit);
    append(out, validate(dev));
    append(out, validate(design.tolerances));
    require(out, design.static_resistance > 0.0, "R_s", "R_s > 0");
    require(out, design.damping_resistance >= 0.0 && std::isfinite(design.damping_resistance), "R_d", "R_d >= 0");
    require(out, design.capacitance > 0.0 && std::isfinite(design.capacitance), "C_d", "C_d > 0");
    return out;
}

bool is_underdamped(const CircuitSpec& circuit, const BalancingDesign& design)
{
    const double c_eff = design.effective_capacitance();
    if (!(c_eff > 0.0) || !(circuit.inductance > 0.0))
        return false;
    const double delta = design.damping_resistance / (2.0 * circuit.inductance);
    return 1.0 / (circuit.inductance * c_eff) > delta * delta;
}

SecondOrderParams second_order_params(const CircuitSpec& circuit, const BalancingDesign& design)
{
    const double c_eff = design.effective_capacitance();
    if (!(c_eff > 0.0))
        throw InvalidInput("effective capacitance (1 - a_c) * C_d must be positive");
    if (!is_underdamped(circuit, design)) {
        std::ostringstream msg;
        msg << "R_d = " << design.damping_resistance << " ohm is at or above critical damping 2*sqrt(L/C_eff) = "
            << 2.0 * std::sqrt(circuit.inductance / c_eff) << " ohm";
        throw NotUnderdamped(msg.str());
    }
    SecondOrderParams p;
    p.damping_rate = design.damping_resistance / (2.0 * circuit.inductance);
    p.damped_frequency = std::sqrt(1.0 / (circuit.inductance * c_eff) - p.damping_rate * p.damping_rate);
    p.phase = std::atan(p.damping_rate / p.damped_frequency);
    return p;
}

}  // namespace thybal
