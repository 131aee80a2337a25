#include "thybal/oracle.hpp"

#include "thybal/analytic.hpp"
#include "thybal/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

namespace thybal::oracle {

namespace {

// x' = A x + b with constant A and b over one segment.
template <std::size_t D>
struct LinearSegment {
    using State = std::array<double, D>;
    std::array<State, D> a{};
    State b{};

    State rhs(const State& x) const
    {
        State out = b;
        for (std::size_t r = 0; r < D; ++r)
            for (std::size_t c = 0; c < D; ++c)
                out[r] += a[r][c] * x[c];
        return out;
    }
};

template <std::size_t D>
std::array<double, D> axpy(const std::array<double, D>& x, double h, const std::array<double, D>& k)
{
    std::array<double, D> out;
    for (std::size_t i = 0; i < D; ++i)
        out[i] = x[i] + h * k[i];
    return out;
}

template <std::size_t D>
std::array<double, D> rk4_step(const LinearSegment<D>& seg, const std::array<double, D>& x, double h)
{
    const auto k1 = seg.rhs(x);
    const auto k2 = seg.rhs(axpy(x, h / 2, k1));
    const auto k3 = seg.rhs(axpy(x, h / 2, k2));
    const auto k4 = seg.rhs(axpy(x, h, k3));
    std::array<double, D> out;
    for (std::size_t i = 0; i < D; ++i)
        out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

// (I - h/2 A) x1 = x0 + h/2 (A x0 + 2 b)
template <std::size_t D>
std::array<double, D> trapezoidal_step(const LinearSegment<D>& seg, const std::array<double, D>& x, double h)
{
    const auto f0 = seg.rhs(x);
    std::array<double, D> rhs;
    for (std::size_t i = 0; i < D; ++i)
        rhs[i] = x[i] + h / 2 * (f0[i] + seg.b[i]);
    if constexpr (D == 1) {
        return {rhs[0] / (1.0 - h / 2 * seg.a[0][0])};
    } else {
        static_assert(D == 2);
        const double m00 = 1.0 - h / 2 * seg.a[0][0];
        const double m01 = -h / 2 * seg.a[0][1];
        const double m10 = -h / 2 * seg.a[1][0];
        const double m11 = 1.0 - h / 2 * seg.a[1][1];
        const double det = m00 * m11 - m01 * m10;
        return {(rhs[0] * m11 - m01 * rhs[1]) / det, (m00 * rhs[1] - m10 * rhs[0]) / det};
    }
}

template <std::size_t D>
std::array<double, D> step(Method method, const LinearSegment<D>& seg, const std::array<double, D>& x, double h)
{
    return method == Method::RK4 ? rk4_step(seg, x, h) : trapezoidal_step(seg, x, h);
}

// Uniform sub-steps across [t0, t1] no longer than max_step.
struct Subdivision {
    std::size_t count;
    double h;
};

Subdivision subdivide(double t0, double t1, double max_step)
{
    const double span = t1 - t0;
    if (!(span > 0.0))
        return {0, 0.0};
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(span / max_step * (1.0 - 1e-12))));
    return {n, span / static_cast<double>(n)};
}

// Drive across L and the slow device: the other N-1 devices fall linearly
// from t_dmin for t_on, then sit at zero.
struct Drive {
    double start;
    double stop;
    double floor;
    double slope;
    double ceiling;

    Drive(const CircuitSpec& circuit, const DeviceParams& dev)
        : start(dev.min_delay),
          stop(dev.min_delay + dev.fall_time),
          floor(circuit.source_voltage / circuit.device_count),
          slope(circuit.source_voltage * (circuit.device_count - 1) / (circuit.device_count * dev.fall_time)),
          ceiling(circuit.source_voltage)
    {
    }

    double value(double t) const { return t >= stop ? ceiling : floor + slope * (t - start); }
};

double fastest_rate(const CircuitSpec& circuit, const BalancingDesign& design)
{
    const double delta = design.damping_resistance / (2.0 * circuit.inductance);
    const double w0_sq = 1.0 / (circuit.inductance * design.effective_capacitance());
    if (delta * delta < w0_sq)
        return std::sqrt(w0_sq);
    return delta + std::sqrt(delta * delta - w0_sq);
}

}  // namespace

std::string_view to_string(Method method)
{
    return method == Method::RK4 ? "rk4" : "trapezoidal";
}

double max_resolved_step(const CircuitSpec& circuit, const BalancingDesign& design)
{
    if (!is_underdamped(circuit, design))
        return std::numeric_limits<double>::infinity();
    const SecondOrderParams p = second_order_params(circuit, design);
    return 2.0 * std::numbers::pi / p.damped_frequency / kMinStepsPerPeriod;
}

IntegratorConfig default_config(const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design)
{
    IntegratorConfig cfg;
    const double bound = max_resolved_step(circuit, design);
    if (std::isfinite(bound)) {
        cfg.dt = bound / 2.0;
    } else {
        cfg.dt = 0.01 / fastest_rate(circuit, design);
    }
    const double window = std::max(dev.delay_spread(), dev.fall_time);
    cfg.dt = std::min(cfg.dt, window / 500.0);
    return cfg;
}

ChargingWaveforms integrate_charging(const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design,
                                     const IntegratorConfig& cfg)
{
    if (!(cfg.dt > 0.0))
        throw InvalidInput("integrator step must be positive");
    const double bound = max_resolved_step(circuit, design);
    if (cfg.dt > bound * (1.0 + 1e-9)) {
        std::ostringstream msg;
        msg << "dt = " << cfg.dt << " s exceeds " << bound << " s (" << kMinStepsPerPeriod
            << " steps per damped period)";
        throw StepTooLarge(msg.str());
    }

    const double t_begin = dev.min_delay;
    const double t_end = cfg.t_end > 0.0 ? cfg.t_end : dev.max_delay;
    const Drive drive(circuit, dev);
    const double inv_lc = 1.0 / (circuit.inductance * design.effective_capacitance());
    const double r_over_l = design.damping_resistance / circuit.inductance;

    ChargingWaveforms out;
    out.drive.channel = Channel::Drive;
    out.current.channel = Channel::ChargeCurrent;
    out.device_voltage.channel = Channel::DeviceVoltage;

    // State (i, di/dt). The drive derivative is constant on each side of the
    // point where the other devices finish falling, so integrate in segments.
    std::array<double, 2> x{0.0, 0.0};
    auto record = [&](double t) {
        const double v = drive.value(t);
        out.drive.t.push_back(t);
        out.drive.y.push_back(v);
        out.current.t.push_back(t);
        out.current.y.push_back(x[0]);
        out.device_voltage.t.push_back(t);
        out.device_voltage.y.push_back(v - circuit.inductance * x[1]);
    };
    record(t_begin);

    std::vector<double> breaks{t_begin};
    if (drive.stop > t_begin && drive.stop < t_end)
        breaks.push_back(drive.stop);
    breaks.push_back(t_end);

    for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
        const double a = breaks[s];
        const double b = breaks[s + 1];
        LinearSegment<2> seg;
        seg.a = {{{0.0, 1.0}, {-inv_lc, -r_over_l}}};
        seg.b = {0.0, (a < drive.stop ? drive.slope : 0.0) / circuit.inductance};
        const Subdivision sub = subdivide(a, b, cfg.dt);
        for (std::size_t k = 1; k <= sub.count; ++k) {
            x = step(cfg.method, seg, x, sub.h);
            record(k == sub.count ? b : a + static_cast<double>(k) * sub.h);
        }
    }
    return out;
}

Waveform integrate_discharge(const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design,
                             double initial_current, const IntegratorConfig& cfg)
{
    if (!(cfg.dt > 0.0))
        throw InvalidInput("integrator step must be positive");
    const double t_begin = dev.max_delay;
    const double t_end = cfg.t_end > 0.0 ? cfg.t_end : dev.max_delay + 2.0 * dev.fall_time;
    const double c_eff = design.effective_capacitance();
    const double forcing_voltage = -circuit.source_voltage / (circuit.device_count * dev.fall_time);

    Waveform out;
    out.channel = Channel::DischargeCurrent;
    out.t.push_back(t_begin);
    out.y.push_back(initial_current);

    const double r = design.damping_resistance;
    if (r == 0.0) {
        const double constrained = forcing_voltage * c_eff;
        const Subdivision sub = subdivide(t_begin, t_end, cfg.dt);
        for (std::size_t k = 1; k <= sub.count; ++k) {
            out.t.push_back(k == sub.count ? t_end : t_begin + static_cast<double>(k) * sub.h);
            out.y.push_back(constrained);
        }
        return out;
    }

    const double tau = r * c_eff;
    LinearSegment<1> seg;
    seg.a = {{{-1.0 / tau}}};
    seg.b = {forcing_voltage / r};

    std::array<double, 1> x{initial_current};
    auto run = [&](double a, double b, double max_step, Method method) {
        const Subdivision sub = subdivide(a, b, max_step);
        for (std::size_t k = 1; k <= sub.count; ++k) {
            x = step(method, seg, x, sub.h);
            out.t.push_back(k == sub.count ? b : a + static_cast<double>(k) * sub.h);
            out.y.push_back(x[0]);
        }
    };

    const double fine = tau / 64.0;
    if (cfg.dt <= fine) {
        run(t_begin, t_end, cfg.dt, cfg.method);
        return out;
    }
    const double settled = std::min(t_end, t_begin + 64.0 * tau);
    run(t_begin, settled, fine, cfg.method);
    run(settled, t_end, cfg.dt, Method::Trapezoidal);
    return out;
}

Peak peak_of(const Waveform& wave)
{
    Peak p;
    for (std::size_t i = 0; i < wave.size(); ++i) {
        if (i == 0 || std::abs(wave.y[i]) > std::abs(p.value))
            p = {wave.t[i], wave.y[i]};
    }
    return p;
}

AnalyticChannels analytic_channels(const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design)
{
    const auto model = std::make_shared<ChargingModel>(circuit, dev, design);
    AnalyticChannels ch;
    ch.charge_current = [model](double t) { return model->current(t); };
    ch.device_voltage = [model](double t) { return model->device_voltage(t); };
    ch.discharge_current = [circuit, dev, design](double t, double init) {
        return discharge_current(t, circuit, dev, design, init);
    };
    return ch;
}

double ChannelError::relative() const
{
    if (scale > 0.0)
        return sup_error / scale;
    return sup_error;
}

double VerificationResult::worst_relative() const
{
    double worst = 0.0;
    for (const auto& e : errors)
        worst = std::max(worst, e.relative());
    return worst;
}

bool VerificationResult::passed(double tolerance) const
{
    return !analytic_available || worst_relative() < tolerance;
}

namespace {

ChannelError compare(const Waveform& reference, const std::function<double(double)>& model)
{
    ChannelError e{reference.channel};
    for (std::size_t i = 0; i < reference.size(); ++i) {
        e.scale = std::max(e.scale, std::abs(reference.y[i]));
        e.sup_error = std::max(e.sup_error, std::abs(model(reference.t[i]) - reference.y[i]));
    }
    return e;
}

}  // namespace

VerificationResult verify(const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design,
                          const IntegratorConfig& cfg, const std::optional<AnalyticChannels>& model)
{
    VerificationResult result;
    IntegratorConfig charging_cfg = cfg;
    charging_cfg.t_end = dev.max_delay;
    result.charging = integrate_charging(circuit, dev, design, charging_cfg);

    // Horizon: the oracle's own conduction instant plus a 10% margin.
    const double oracle_peak_voltage = result.charging.device_voltage.y.back();
    const double fall = oracle_peak_voltage * circuit.device_count * dev.fall_time / circuit.source_voltage;
    IntegratorConfig discharge_cfg = cfg;
    discharge_cfg.t_end = dev.max_delay + 1.1 * std::max(fall, dev.fall_time * 1e-3);
    result.discharge = integrate_discharge(circuit, dev, design, result.charging.current.y.back(), discharge_cfg);

    if (!model) {
        result.note = "analytic model unavailable; oracle waveforms only";
        return result;
    }
    result.analytic_available = true;
    result.errors.push_back(compare(result.charging.current, model->charge_current));
    result.errors.push_back(compare(result.charging.device_voltage, model->device_voltage));
    const double analytic_initial = model->charge_current(dev.max_delay);
    result.errors.push_back(compare(result.discharge, [&](double t) {
        return model->discharge_current(t, analytic_initial);
    }));
    return result;
}

VerificationResult verify(const CircuitSpec& circuit, const DeviceParams& dev, const BalancingDesign& design,
                          const IntegratorConfig& cfg)
{
    if (!is_underdamped(circuit, design)) {
        VerificationResult r = verify(circuit, dev, design, cfg, std::nullopt);
        r.note = "design is not underdamped (R_d >= 2 sqrt(L / C_eff)); closed forms skipped, oracle waveforms only";
        return r;
    }
    return verify(circuit, dev, design, cfg, analytic_channels(circuit, dev, design));
}

}  // namespace thybal::oracle
