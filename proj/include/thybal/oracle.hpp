#pragma once

// Fixed-step numerical integration of the charging and discharging ODEs.
// Only the ODE right-hand sides and the piecewise drive are discretised here;
// none of the closed forms are reused, so the results are an independent
// check on the analytic module.

#include "thybal/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace thybal::oracle {

enum class Method { RK4, Trapezoidal };

std::string_view to_string(Method method);

struct IntegratorConfig {
    double dt = 0.0;             // requested step; the last step of each segment is shortened to land on breakpoints
    Method method = Method::RK4;
    double t_end = 0.0;          // 0 selects the default horizon of each integration
};

/// Steps per damped period demanded of the charging integration.
inline constexpr double kMinStepsPerPeriod = 200.0;

/// Largest step allowed for the charging ODE: a 200th of the damped period
/// when underdamped, unbounded otherwise.
double max_resolved_step(const CircuitSpec& circuit, const BalancingDesign& design);

/// Step used when the caller does not choose one.
IntegratorConfig default_config(const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design);

struct ChargingWaveforms {
    Waveform drive;
    Waveform current;
    Waveform device_voltage;
};

/// Integrates L i'' + R_d i' + i / ((1 - a_c) C_d) = d(drive)/dt from
/// t_dmin with i = 0 and zero inductor voltage, up to cfg.t_end (default
/// t_dmax). Works for any damping. Throws StepTooLarge when cfg.dt exceeds
/// max_resolved_step.
ChargingWaveforms integrate_charging(const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design,
                                     const IntegratorConfig& cfg);

/// Integrates R_d i' + i / ((1 - a_c) C_d) = -V_s / (N t_on) from t_dmax
/// with i(t_dmax) = initial_current up to cfg.t_end (default t_dmax + 2 t_on).
///
/// The first 64 time constants are resolved with steps of at most tau/64;
/// past that the transient has decayed below rounding and the remainder is
/// stepped at cfg.dt with the A-stable trapezoidal rule. At R_d = 0 the ODE
/// degenerates to the algebraic constraint i = -V_s (1 - a_c) C_d / (N t_on).
Waveform integrate_discharge(const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design,
                             double initial_current, const IntegratorConfig& cfg);

struct Peak {
    double time = 0.0;
    double value = 0.0;
};

/// Largest-magnitude sample of a waveform (sign retained).
Peak peak_of(const Waveform& wave);

/// Closed-form channels under test. Kept as callables so a deliberately
/// broken model can be substituted in negative-control tests.
struct AnalyticChannels {
    std::function<double(double)> charge_current;
    std::function<double(double)> device_voltage;
    std::function<double(double, double)> discharge_current;  // (t, i_ch(t_dmax))
};

/// Channels backed by the analytic module. Throws NotUnderdamped.
AnalyticChannels analytic_channels(const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design);

struct ChannelError {
    Channel channel;
    double sup_error = 0.0;  // max |analytic - oracle|
    double scale = 0.0;      // max |oracle|
    double relative() const;
};

struct VerificationResult {
    bool analytic_available = false;
    std::string note;
    ChargingWaveforms charging;
    Waveform discharge;
    std::vector<ChannelError> errors;

    double worst_relative() const;
    bool passed(double tolerance) const;
};

/// Runs the oracle over the charging and discharging cycles and measures the
/// sup-norm error of `model` on the oracle's sample grid. With no model and
/// an overdamped design only the oracle waveforms are produced.
VerificationResult verify(const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design,
                          const IntegratorConfig& cfg, const std::optional<AnalyticChannels>& model);

/// Same, using the analytic module when the design is underdamped.
VerificationResult verify(const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design,
                          const IntegratorConfig& cfg);

}  // namespace thybal::oracle
