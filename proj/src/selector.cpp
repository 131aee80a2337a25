#include "thybal/selector.hpp"

#include "thybal/analytic.hpp"
#include "thybal/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <sstream>

namespace thybal {

namespace {

constexpr std::array<double, 12> kE12{1.0, 1.2, 1.5, 1.8, 2.2, 2.7, 3.3, 3.9, 4.7, 5.6, 6.8, 8.2};
constexpr std::array<double, 24> kE24{1.0, 1.1, 1.2, 1.3, 1.5, 1.6, 1.8, 2.0, 2.2, 2.4, 2.7, 3.0,
                                      3.3, 3.6, 3.9, 4.3, 4.7, 5.1, 5.6, 6.2, 6.8, 7.5, 8.2, 9.1};

// Relative slack so that a value already on the series maps to itself.
constexpr double kSnapSlack = 1e-9;

constexpr double kSmallestCapacitance = 1e-12;
constexpr double kLargestCapacitance = 1.0;

}  // namespace

std::string_view to_string(Snap snap)
{
    switch (snap) {
    case Snap::None: return "none";
    case Snap::E12: return "e12";
    case Snap::E24: return "e24";
    }
    return "none";
}

std::optional<Snap> parse_snap(std::string_view text)
{
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "none")
        return Snap::None;
    if (lower == "e12")
        return Snap::E12;
    if (lower == "e24")
        return Snap::E24;
    return std::nullopt;
}

std::span<const double> series_values(Snap snap)
{
    switch (snap) {
    case Snap::E12: return kE12;
    case Snap::E24: return kE24;
    case Snap::None: break;
    }
    return {};
}

double snap_up(double value, Snap snap)
{
    const auto series = series_values(snap);
    if (series.empty() || !(value > 0.0))
        return value;
    const int decade = static_cast<int>(std::floor(std::log10(value)));
    for (int d = decade - 1; d <= decade + 1; ++d) {
        const double scale = std::pow(10.0, d);
        for (double m : series) {
            const double candidate = m * scale;
            if (candidate >= value * (1.0 - kSnapSlack))
                return candidate;
        }
    }
    return std::pow(10.0, decade + 2);
}

double snap_down(double value, Snap snap)
{
    const auto series = series_values(snap);
    if (series.empty() || !(value > 0.0))
        return value;
    const int decade = static_cast<int>(std::floor(std::log10(value)));
    for (int d = decade + 1; d >= decade - 1; --d) {
        const double scale = std::pow(10.0, d);
        for (auto it = series.rbegin(); it != series.rend(); ++it) {
            const double candidate = *it * scale;
            if (candidate <= value * (1.0 + kSnapSlack))
                return candidate;
        }
    }
    return std::pow(10.0, decade - 1);
}

ValidationOutcome validate(const DesignConstraints& c, const CircuitSpec& circuit)
{
    ValidationOutcome out;
    auto require = [&](bool ok, const char* field, const char* message) {
        if (!ok)
            out.violations.push_back({field, message});
    };
    require(c.max_overvoltage_pct > 0.0, "max_overvoltage_pct", "must be > 0");
    require(c.max_charge_current > 0.0, "max_charge_current", "must be > 0");
    require(c.max_discharge_current > 0.0, "max_discharge_current", "must be > 0");
    require(c.max_steady_voltage > circuit.static_share(), "max_steady_voltage", "must exceed V_s / N");
    require(c.min_damping_resistance >= 0.0, "min_damping_resistance", "must be >= 0");
    return out;
}

namespace {

BalancingDesign make_design(const ToleranceSpec& tol, double damping, double capacitance, double static_resistance = 1.0)
{
    BalancingDesign d;
    d.static_resistance = static_resistance;
    d.damping_resistance = damping;
    d.capacitance = capacitance;
    d.tolerances = tol;
    return d;
}

double overvoltage_at(const CircuitSpec& circuit, const DeviceParams& dev, const ToleranceSpec& tol, double damping,
                      double capacitance)
{
    const ChargingPeak peak = peak_charging(circuit, dev, make_design(tol, damping, capacitance));
    return overvoltage_percent(circuit, peak.device_voltage);
}

}  // namespace

double solve_min_cd(const CircuitSpec& circuit, const DeviceParams& dev, const ToleranceSpec& tol, double target_pct,
                    double damping_resistance, BisectionTrace* trace)
{
    // Largest admissible C_d: just short of critical damping when R_d > 0.
    double hi = kLargestCapacitance;
    if (damping_resistance > 0.0) {
        const double critical = 4.0 * circuit.inductance / (damping_resistance * damping_resistance * (1.0 - tol.capacitor));
        hi = std::min(hi, critical * (1.0 - 1e-6));
    }
    double lo = std::min(kSmallestCapacitance, hi / 2.0);

    const double asymptote = overvoltage_at(circuit, dev, tol, damping_resistance, hi);
    if (!(asymptote <= target_pct)) {
        std::ostringstream msg;
        msg << "overvoltage target " << target_pct << "% unreachable at R_d = " << damping_resistance
            << " ohm; best achievable is " << asymptote << "% at C_d = " << hi << " F";
        throw TargetUnreachable(msg.str());
    }
    if (overvoltage_at(circuit, dev, tol, damping_resistance, lo) <= target_pct)
        return lo;

    if (trace)
        trace->brackets.emplace_back(lo, hi);
    while (hi / lo > kBisectionWidth) {
        const double mid = std::sqrt(lo * hi);
        if (overvoltage_at(circuit, dev, tol, damping_resistance, mid) <= target_pct)
            hi = mid;
        else
            lo = mid;
        if (trace)
            trace->brackets.emplace_back(lo, hi);
    }
    return hi;
}

std::string_view to_string(Step step)
{
    switch (step) {
    case Step::SolveMinCd: return "solve_min_cd";
    case Step::CheckCurrents: return "check_currents";
    case Step::BackOffProbe: return "back_off_probe";
    case Step::StaticResistor: return "static_resistor";
    case Step::SnapComponents: return "snap_components";
    case Step::VerifySnapped: return "verify_snapped";
    case Step::ReverseRecovery: return "reverse_recovery";
    case Step::Accept: return "accept";
    case Step::Reject: return "reject";
    }
    return "unknown";
}

namespace {

std::vector<std::string> violated(const TransientReport& s, const DesignConstraints& c, bool include_overvoltage)
{
    std::vector<std::string> out;
    if (include_overvoltage && s.overvoltage_pct > c.max_overvoltage_pct)
        out.emplace_back("max_overvoltage_pct");
    if (s.peak_charge_current > c.max_charge_current)
        out.emplace_back("max_charge_current");
    if (s.discharge_magnitude() > c.max_discharge_current)
        out.emplace_back("max_discharge_current");
    return out;
}

std::string join(const std::vector<std::string>& names)
{
    std::string out;
    for (const auto& n : names)
        out += (out.empty() ? "" : ",") + n;
    return out;
}

std::string describe(const TransientReport& s)
{
    std::ostringstream os;
    os << "V_d_ov=" << s.overvoltage_pct << "% I_ch_max=" << s.peak_charge_current
       << " A |I_dis_max|=" << s.discharge_magnitude() << " A";
    return os.str();
}

class Selection {
public:
    Selection(const CircuitSpec& circuit, const DeviceParams& dev, const ToleranceSpec& tol, const DesignConstraints& c)
        : circuit_(circuit), dev_(dev), tol_(tol), c_(c)
    {
    }

    DesignReport run()
    {
        const ValidationOutcome check = validate(c_, circuit_);
        if (!check.ok())
            throw InvalidInput(check.violations.front().field + ": " + check.violations.front().message);

        bool ok = try_damping(0.0) && currents_ok_;
        if (c_.min_damping_resistance > 0.0)
            ok = try_damping(c_.min_damping_resistance) && currents_ok_;
        if (!ok)
            ok = climb_ladder();

        if (!ok) {
            report_.feasible = false;
            report_.binding_constraint = join(last_violations_);
            back_off();
        } else {
            report_.feasible = true;
        }

        size_static();
        if (report_.feasible && c_.snap != Snap::None)
            snap();
        compare_reverse_recovery();

        const Step last = report_.feasible ? Step::Accept : Step::Reject;
        log(last, report_.feasible ? "all constraints met" : "binding constraint: " + report_.binding_constraint);
        return std::move(report_);
    }

private:
    void log(Step step, std::string note)
    {
        report_.adjustments.push_back({step, design_.damping_resistance, design_.capacitance,
                                       design_.static_resistance, std::move(note)});
    }

    // Re-solves C_d at the given R_d; returns false if the target is
    // unreachable there.
    bool try_damping(double damping)
    {
        double capacitance = 0.0;
        try {
            capacitance = solve_min_cd(circuit_, dev_, tol_, c_.max_overvoltage_pct, damping);
        } catch (const TargetUnreachable& e) {
            report_.adjustments.push_back({Step::CheckCurrents, damping, 0.0, design_.static_resistance, e.what()});
            last_violations_ = {"max_overvoltage_pct"};
            return false;
        }
        design_ = make_design(tol_, damping, capacitance, design_.static_resistance);
        log(Step::SolveMinCd, "smallest C_d meeting the overvoltage target");
        report_.stresses = analyze(circuit_, dev_, design_);
        const auto bad = violated(report_.stresses, c_, false);
        currents_ok_ = bad.empty();
        if (!currents_ok_)
            last_violations_ = bad;
        log(Step::CheckCurrents, describe(report_.stresses) + (currents_ok_ ? " within limits" : " exceeds " + join(bad)));
        return true;
    }

    bool climb_ladder()
    {
        const double floor = std::max(design_.damping_resistance, c_.min_damping_resistance);
        for (double r : kDampingLadder) {
            if (r <= floor || r > kDampingCap)
                continue;
            if (try_damping(r) && currents_ok_)
                return true;
        }
        return false;
    }

    void back_off()
    {
        const double damping = c_.min_damping_resistance;
        double capacitance = 0.0;
        try {
            capacitance = solve_min_cd(circuit_, dev_, tol_, c_.max_overvoltage_pct, damping);
        } catch (const TargetUnreachable&) {
            return;
        }
        for (int k = 1; k <= kMaxBackOffSteps; ++k) {
            capacitance *= kBackOffFactor;
            const BalancingDesign probe = make_design(tol_, damping, capacitance);
            const TransientReport s = analyze(circuit_, dev_, probe);
            if (violated(s, c_, false).empty()) {
                report_.relaxed = probe;
                report_.relaxed_stresses = s;
                std::ostringstream note;
                note << "C_d reduced to " << capacitance << " F at R_d = " << damping
                     << " ohm meets current limits only by relaxing overvoltage to " << s.overvoltage_pct
                     << "%; not applied";
                report_.adjustments.push_back({Step::BackOffProbe, damping, capacitance, 0.0, note.str()});
                return;
            }
        }
        report_.adjustments.push_back({Step::BackOffProbe, damping, capacitance, 0.0,
                                       "no reduced C_d meets the current limits"});
    }

    void size_static()
    {
        try {
            design_.static_resistance = static_resistor(circuit_, dev_, tol_, c_.max_steady_voltage);
        } catch (const InfeasibleStatic& e) {
            report_.adjustments.push_back({Step::Reject, design_.damping_resistance, design_.capacitance, 0.0, e.what()});
            if (report_.feasible) {
                report_.feasible = false;
                report_.binding_constraint = "max_steady_voltage";
            }
            report_.chosen = design_;
            return;
        }
        report_.steady_voltage = steady_voltage_for(circuit_, dev_, tol_, design_.static_resistance);
        report_.chosen = design_;
        log(Step::StaticResistor, "R_s for the steady-state voltage limit");
    }

    void snap()
    {
        design_.capacitance = snap_up(design_.capacitance, c_.snap);
        design_.static_resistance = snap_down(design_.static_resistance, c_.snap);
        log(Step::SnapComponents, std::string("C_d rounded up, R_s rounded down to ") + std::string(to_string(c_.snap)));

        report_.stresses = analyze(circuit_, dev_, design_);
        report_.steady_voltage = steady_voltage_for(circuit_, dev_, tol_, design_.static_resistance);
        auto bad = violated(report_.stresses, c_, true);
        if (report_.steady_voltage > c_.max_steady_voltage * (1.0 + 1e-12))
            bad.emplace_back("max_steady_voltage");
        std::ostringstream note;
        note << describe(report_.stresses) << " steady=" << report_.steady_voltage << " V";
        if (!bad.empty()) {
            report_.feasible = false;
            report_.binding_constraint = "post-snap " + join(bad);
            note << " violates " << join(bad);
        }
        log(Step::VerifySnapped, note.str());
        report_.chosen = design_;
    }

    void compare_reverse_recovery()
    {
        const double limit = circuit_.static_share() * (1.0 + c_.max_overvoltage_pct / 100.0);
        try {
            ReverseRecoveryComparison rr;
            rr.capacitance = reverse_recovery_cd(circuit_, dev_, tol_, limit);
            if (rr.capacitance > 0.0) {
                rr.stresses = analyze(circuit_, dev_, make_design(tol_, 0.0, rr.capacitance));
                rr.ratio = rr.capacitance / design_.capacitance;
            }
            report_.rr_comparison = rr;
            std::ostringstream note;
            note << "reverse-recovery C_d = " << rr.capacitance << " F (" << rr.ratio << "x chosen)";
            log(Step::ReverseRecovery, note.str());
        } catch (const InfeasibleRR& e) {
            log(Step::ReverseRecovery, e.what());
        }
    }

    CircuitSpec circuit_;
    DeviceParams dev_;
    ToleranceSpec tol_;
    DesignConstraints c_;
    BalancingDesign design_ = make_design(tol_, 0.0, 0.0);
    bool currents_ok_ = false;
    std::vector<std::string> last_violations_;
    DesignReport report_;
};

}  // namespace

DesignReport select_network(const CircuitSpec& circuit, const DeviceParams& dev, const ToleranceSpec& tol,
                            const DesignConstraints& constraints)
{
    return Selection(circuit, dev, tol, constraints).run();
}

BalancingDesign replay(const CircuitSpec& circuit, const DeviceParams& dev, const ToleranceSpec& tol,
                       const DesignConstraints& constraints, const std::vector<Adjustment>& log)
{
    BalancingDesign design = make_design(tol, 0.0, 0.0);
    auto expect = [](double recomputed, double logged, const char* what) {
        if (recomputed != logged) {
            std::ostringstream msg;
            msg << "replay mismatch in " << what << ": recomputed " << recomputed << ", logged " << logged;
            throw Error(msg.str());
        }
    };
    for (const auto& entry : log) {
        switch (entry.step) {
        case Step::SolveMinCd:
            design.damping_resistance = entry.damping_resistance;
            design.capacitance = solve_min_cd(circuit, dev, tol, constraints.max_overvoltage_pct, entry.damping_resistance);
            expect(design.capacitance, entry.capacitance, "C_d");
            break;
        case Step::StaticResistor:
            design.static_resistance = static_resistor(circuit, dev, tol, constraints.max_steady_voltage);
            expect(design.static_resistance, entry.static_resistance, "R_s");
            break;
        case Step::SnapComponents:
            design.capacitance = snap_up(design.capacitance, constraints.snap);
            design.static_resistance = snap_down(design.static_resistance, constraints.snap);
            expect(design.capacitance, entry.capacitance, "snapped C_d");
            expect(design.static_resistance, entry.static_resistance, "snapped R_s");
            break;
        default:
            break;
        }
    }
    return design;
}

}  // namespace thybal
