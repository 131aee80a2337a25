#pragma once

// Shared parameter sets: the 12 kV / 6-device crowbar and the 480 V bench
// setup, plus a random generator of valid underdamped design points.

#include "thybal/types.hpp"

#include <cmath>
#include <optional>
#include <random>

namespace thybal::testing {

inline CircuitSpec crowbar_circuit()
{
    return {12e3, 6, 250e-6};
}

inline DeviceParams crowbar_device()
{
    DeviceParams d;
    d.max_delay = 3e-6;
    d.min_delay = 0.0;
    d.fall_time = 5e-6;
    d.max_leakage = 350e-6;
    d.min_leakage = 100e-6;
    d.rated_dc_voltage = 3.3e3;
    d.rms_current = 550.0;
    d.surge_current = 4500.0;
    d.max_recovery_charge = 2300e-6;
    d.min_recovery_charge = 1000e-6;
    return d;
}

inline ToleranceSpec crowbar_tolerances()
{
    return {0.1, 0.05};
}

inline BalancingDesign design_of(double capacitance, double damping, ToleranceSpec tol = crowbar_tolerances(),
                                 double static_resistance = 2.5e6)
{
    BalancingDesign d;
    d.static_resistance = static_resistance;
    d.damping_resistance = damping;
    d.capacitance = capacitance;
    d.tolerances = tol;
    return d;
}

/// 480 V bench: 47 nF, 3 ohm, t_on = 3 us; other values as the crowbar.
inline CircuitSpec bench_circuit()
{
    return {480.0, 6, 250e-6};
}

inline DeviceParams bench_device(double delay_spread)
{
    DeviceParams d = crowbar_device();
    d.fall_time = 3e-6;
    d.min_delay = 0.0;
    d.max_delay = delay_spread;
    return d;
}

struct RandomPoint {
    CircuitSpec circuit;
    DeviceParams device;
    BalancingDesign design;
};

/// Valid underdamped point: C_d log-uniform over [5 nF, 5 uF], R_d uniform
/// over [0, 30] ohm, both drive regimes.
class PointGenerator {
public:
    explicit PointGenerator(std::uint64_t seed) : rng_(seed) {}

    RandomPoint next() { return draw(std::nullopt); }

    /// Same distribution with C_d pinned, for stratified coverage of the C_d range.
    RandomPoint next_with_capacitance(double capacitance) { return draw(capacitance); }

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

private:
    RandomPoint draw(std::optional<double> capacitance)
    {
        for (;;) {
            RandomPoint p;
            p.circuit.source_voltage = log_uniform(100.0, 20e3);
            p.circuit.device_count = std::uniform_int_distribution<int>(2, 12)(rng_);
            p.circuit.inductance = log_uniform(10e-6, 1e-3);
            p.device = crowbar_device();
            p.device.fall_time = uniform(1e-6, 10e-6);
            p.device.min_delay = uniform(0.0, 1e-6);
            p.device.max_delay = p.device.min_delay + uniform(0.0, 2.0) * p.device.fall_time;
            ToleranceSpec tol{uniform(0.0, 0.2), 0.05};
            const double c = log_uniform(5e-9, 5e-6);
            p.design = design_of(capacitance.value_or(c), uniform(0.0, 30.0), tol);
            if (is_underdamped(p.circuit, p.design))
                return p;
        }
    }

    std::mt19937_64 rng_;
};

inline double rel_diff(double a, double b)
{
    return std::abs(a - b) / std::abs(b);
}

}  // namespace thybal::testing
