#include "thybal/sweep.hpp"

#include "thybal/analytic.hpp"
#include "thybal/csv.hpp"
#include "thybal/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace thybal {

std::vector<double> log_space(double lo, double hi, std::size_t count)
{
    std::vector<double> out;
    if (count == 0)
        return out;
    if (count == 1)
        return {lo};
    out.reserve(count);
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1)));
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> default_capacitance_axis()
{
    return log_space(5e-9, 300e-9, 64);
}

SweepGrid SweepGrid::around(const SweepBase& base, double damping_resistance)
{
    SweepGrid g;
    g.base = base;
    g.capacitances = default_capacitance_axis();
    g.damping_values = {damping_resistance};
    g.spread_values = {base.device.delay_spread()};
    g.fall_times = {base.device.fall_time};
    g.inductances = {base.circuit.inductance};
    return g;
}

std::size_t SweepGrid::point_count() const
{
    return capacitances.size() * damping_values.size() * spread_values.size() * fall_times.size() *
           inductances.size();
}

std::size_t SweepResult::skipped_count() const
{
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.skipped; }));
}

namespace {

void check_axis(ValidationOutcome& out, const std::vector<double>& axis, const char* name, bool allow_zero)
{
    if (axis.empty()) {
        out.violations.push_back({name, "axis must be non-empty"});
        return;
    }
    for (std::size_t i = 0; i < axis.size(); ++i) {
        const double v = axis[i];
        if (!std::isfinite(v) || v < 0.0 || (!allow_zero && v == 0.0)) {
            out.violations.push_back({name, allow_zero ? "values must be >= 0" : "values must be > 0"});
            return;
        }
        if (i > 0 && !(v > axis[i - 1])) {
            out.violations.push_back({name, "axis must be strictly increasing"});
            return;
        }
    }
}

}  // namespace

ValidationOutcome validate(const SweepGrid& grid)
{
    ValidationOutcome out;
    check_axis(out, grid.capacitances, "cd_axis", false);
    check_axis(out, grid.damping_values, "rd_values", true);
    check_axis(out, grid.spread_values, "tdtol_values", true);
    check_axis(out, grid.fall_times, "ton_values", false);
    check_axis(out, grid.inductances, "l_values", false);
    for (const auto& v : validate(grid.base.circuit).violations)
        out.violations.push_back(v);
    for (const auto& v : validate(grid.base.device).violations)
        out.violations.push_back(v);
    for (const auto& v : validate(grid.base.tolerances).violations)
        out.violations.push_back(v);
    return out;
}

SweepPoint sweep_point(const SweepBase& base, double capacitance, double damping_resistance, double delay_spread,
                       double fall_time, double inductance)
{
    SweepPoint p{base.circuit, base.device, {}};
    p.circuit.inductance = inductance;
    p.device.fall_time = fall_time;
    p.device.max_delay = base.device.min_delay + delay_spread;
    p.design.static_resistance = 1.0;
    p.design.damping_resistance = damping_resistance;
    p.design.capacitance = capacitance;
    p.design.tolerances = base.tolerances;
    return p;
}

SweepResult run_sweep(const SweepGrid& grid, unsigned threads)
{
    const ValidationOutcome check = validate(grid);
    if (!check.ok()) {
        std::string msg;
        for (const auto& v : check.violations)
            msg += (msg.empty() ? "" : "; ") + v.field + ": " + v.message;
        const bool empty = grid.point_count() == 0;
        if (empty)
            throw EmptyGrid(msg);
        throw InvalidInput(msg);
    }

    const std::size_t nl = grid.inductances.size();
    const std::size_t nt = grid.fall_times.size();
    const std::size_t ns = grid.spread_values.size();
    const std::size_t nr = grid.damping_values.size();
    const std::size_t total = grid.point_count();

    SweepResult result;
    result.rows.resize(total);

    auto evaluate = [&](std::size_t index) {
        std::size_t rest = index;
        const std::size_t li = rest % nl;
        rest /= nl;
        const std::size_t ti = rest % nt;
        rest /= nt;
        const std::size_t si = rest % ns;
        rest /= ns;
        const std::size_t ri = rest % nr;
        const std::size_t ci = rest / nr;

        SweepRow& row = result.rows[index];
        row.capacitance = grid.capacitances[ci];
        row.damping_resistance = grid.damping_values[ri];
        row.delay_spread = grid.spread_values[si];
        row.fall_time = grid.fall_times[ti];
        row.inductance = grid.inductances[li];

        const SweepPoint p = sweep_point(grid.base, row.capacitance, row.damping_resistance, row.delay_spread,
                                         row.fall_time, row.inductance);
        if (!is_underdamped(p.circuit, p.design)) {
            row.skipped = true;
            return;
        }
        const TransientReport r = analyze(p.circuit, p.device, p.design);
        row.overvoltage_pct = r.overvoltage_pct;
        row.peak_charge_current = r.peak_charge_current;
        row.peak_discharge_current = r.peak_discharge_current;
        if (r.discharge_magnitude() > 0.0)
            row.current_ratio = r.peak_charge_current / r.discharge_magnitude();
    };

    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, total / 64)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < total; ++i)
            evaluate(i);
        return result;
    }
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> workers;
        for (unsigned w = 0; w < threads; ++w)
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < total; i = next++)
                    evaluate(i);
            });
    }
    return result;
}

std::string to_csv(const SweepResult& result)
{
    std::string out = csv::join_row({"C_d", "R_d", "t_dTol", "t_on", "L", "skipped", "V_d_ov", "I_ch_max",
                                     "I_dis_max_signed", "I_ratio"});
    for (const auto& r : result.rows) {
        std::vector<std::string> fields{csv::format_double(r.capacitance), csv::format_double(r.damping_resistance),
                                        csv::format_double(r.delay_spread), csv::format_double(r.fall_time),
                                        csv::format_double(r.inductance), r.skipped ? "true" : "false"};
        if (r.skipped) {
            fields.insert(fields.end(), 4, "");
        } else {
            fields.push_back(csv::format_double(r.overvoltage_pct));
            fields.push_back(csv::format_double(r.peak_charge_current));
            fields.push_back(csv::format_double(r.peak_discharge_current));
            fields.push_back(r.current_ratio ? csv::format_double(*r.current_ratio) : "");
        }
        out += csv::join_row(fields);
    }
    return out;
}

void export_csv(const SweepResult& result, const std::filesystem::path& path)
{
    csv::write_file(path, to_csv(result));
}

}  // namespace thybal
