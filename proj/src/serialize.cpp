#include "thybal/serialize.hpp"

#include <iomanip>
#include <sstream>

namespace thybal {

using nlohmann::ordered_json;

ordered_json to_json(const CircuitSpec& circuit)
{
    return {{"V_s", circuit.source_voltage}, {"N", circuit.device_count}, {"L", circuit.inductance}};
}

ordered_json to_json(const DeviceParams& dev)
{
    return {{"t_dmax", dev.max_delay},
            {"t_dmin", dev.min_delay},
            {"t_on", dev.fall_time},
            {"I_Dmax", dev.max_leakage},
            {"I_Dmin", dev.min_leakage},
            {"V_Ddc", dev.rated_dc_voltage},
            {"I_Trms", dev.rms_current},
            {"I_TSM", dev.surge_current},
            {"Q_max", dev.max_recovery_charge},
            {"Q_min", dev.min_recovery_charge}};
}

ordered_json to_json(const ToleranceSpec& tol)
{
    return {{"a_c", tol.capacitor}, {"a_R", tol.resistor}};
}

ordered_json to_json(const BalancingDesign& design)
{
    return {{"R_s", design.static_resistance},
            {"R_d", design.damping_resistance},
            {"C_d", design.capacitance},
            {"tolerances", to_json(design.tolerances)}};
}

ordered_json to_json(const TransientReport& r)
{
    return {{"V_AK1_max", r.peak_device_voltage},
            {"V_d_ov", r.overvoltage_pct},
            {"I_ch_max", r.peak_charge_current},
            {"I_dis_max", r.discharge_magnitude()},
            {"I_dis_max_signed", r.peak_discharge_current},
            {"t_on1", r.conduction_time},
            {"regime", std::string(to_string(r.regime))}};
}

ordered_json to_json(const DesignConstraints& c)
{
    return {{"max_overvoltage_pct", c.max_overvoltage_pct},
            {"max_charge_current", c.max_charge_current},
            {"max_discharge_current", c.max_discharge_current},
            {"max_steady_voltage", c.max_steady_voltage},
            {"snap", std::string(to_string(c.snap))},
            {"min_damping_resistance", c.min_damping_resistance}};
}

ordered_json to_json(const DesignReport& r)
{
    ordered_json j;
    j["feasible"] = r.feasible;
    j["binding_constraint"] = r.binding_constraint.empty() ? ordered_json(nullptr) : ordered_json(r.binding_constraint);
    j["chosen"] = to_json(r.chosen);
    j["stresses"] = to_json(r.stresses);
    j["steady_voltage"] = r.steady_voltage;
    if (r.rr_comparison) {
        j["rr_comparison"] = {{"C_d_rr", r.rr_comparison->capacitance},
                              {"stresses_rr", to_json(r.rr_comparison->stresses)},
                              {"ratio", r.rr_comparison->ratio}};
    } else {
        j["rr_comparison"] = nullptr;
    }
    if (r.relaxed) {
        j["relaxed"] = {{"design", to_json(*r.relaxed)}, {"stresses", to_json(*r.relaxed_stresses)}};
    } else {
        j["relaxed"] = nullptr;
    }
    ordered_json log = ordered_json::array();
    for (const auto& a : r.adjustments) {
        log.push_back({{"step", std::string(to_string(a.step))},
                       {"R_d", a.damping_resistance},
                       {"C_d", a.capacitance},
                       {"R_s", a.static_resistance},
                       {"note", a.note}});
    }
    j["adjustments"] = std::move(log);
    return j;
}

ordered_json to_json(const oracle::VerificationResult& r)
{
    ordered_json j;
    j["analytic_available"] = r.analytic_available;
    j["note"] = r.note;
    ordered_json errors = ordered_json::array();
    for (const auto& e : r.errors) {
        errors.push_back({{"channel", std::string(to_string(e.channel))},
                          {"sup_error", e.sup_error},
                          {"scale", e.scale},
                          {"relative", e.relative()}});
    }
    j["errors"] = std::move(errors);
    j["worst_relative"] = r.worst_relative();
    return j;
}

ordered_json sweep_manifest(const SweepGrid& grid, const SweepResult& result)
{
    ordered_json j;
    j["grid"] = {{"cd_axis", grid.capacitances},
                 {"rd_values", grid.damping_values},
                 {"tdtol_values", grid.spread_values},
                 {"ton_values", grid.fall_times},
                 {"l_values", grid.inductances}};
    j["base"] = {{"circuit", to_json(grid.base.circuit)},
                 {"device", to_json(grid.base.device)},
                 {"tolerances", to_json(grid.base.tolerances)}};
    j["row_order"] = {"C_d", "R_d", "t_dTol", "t_on", "L"};
    j["rows"] = result.rows.size();
    j["skipped"] = result.skipped_count();
    return j;
}

namespace {

void stress_lines(std::ostream& os, const TransientReport& r)
{
    os << "  regime            " << to_string(r.regime) << '\n'
       << "  V_AK1_max         " << r.peak_device_voltage << " V\n"
       << "  V_d_ov            " << r.overvoltage_pct << " %\n"
       << "  I_ch_max          " << r.peak_charge_current << " A\n"
       << "  I_dis_max         " << r.peak_discharge_current << " A (magnitude " << r.discharge_magnitude() << " A)\n"
       << "  t_on1             " << r.conduction_time << " s\n";
}

void design_lines(std::ostream& os, const BalancingDesign& d)
{
    os << "  R_s               " << d.static_resistance << " ohm\n"
       << "  R_d               " << d.damping_resistance << " ohm\n"
       << "  C_d               " << d.capacitance << " F\n"
       << "  a_c, a_R          " << d.tolerances.capacitor << ", " << d.tolerances.resistor << '\n';
}

}  // namespace

std::string to_text(const CircuitSpec& circuit, const BalancingDesign& design, const TransientReport& report)
{
    std::ostringstream os;
    os << std::setprecision(6);
    os << "Transient report\n"
       << "  V_s = " << circuit.source_voltage << " V, N = " << circuit.device_count << ", L = " << circuit.inductance
       << " H\n";
    design_lines(os, design);
    stress_lines(os, report);
    return os.str();
}

std::string to_text(const DesignReport& r)
{
    std::ostringstream os;
    os << std::setprecision(6);
    os << "Design report: " << (r.feasible ? "feasible" : "INFEASIBLE") << '\n';
    if (!r.feasible)
        os << "  binding constraint: " << r.binding_constraint << '\n';
    os << "Chosen network\n";
    design_lines(os, r.chosen);
    os << "  steady voltage    " << r.steady_voltage << " V\n";
    os << "Peak stresses\n";
    stress_lines(os, r.stresses);
    if (r.rr_comparison) {
        os << "Reverse-recovery sizing\n"
           << "  C_d_rr            " << r.rr_comparison->capacitance << " F (" << r.rr_comparison->ratio
           << "x chosen)\n";
        stress_lines(os, r.rr_comparison->stresses);
    }
    if (r.relaxed) {
        os << "Relaxed alternative (not applied)\n";
        design_lines(os, *r.relaxed);
        stress_lines(os, *r.relaxed_stresses);
    }
    os << "Adjustments\n";
    for (std::size_t i = 0; i < r.adjustments.size(); ++i) {
        const auto& a = r.adjustments[i];
        os << "  " << std::setw(2) << i + 1 << ". " << to_string(a.step) << "  R_d=" << a.damping_resistance
           << " C_d=" << a.capacitance << " R_s=" << a.static_resistance << "  " << a.note << '\n';
    }
    return os.str();
}

}  // namespace thybal
