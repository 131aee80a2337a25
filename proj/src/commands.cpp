#include "thybal/commands.hpp"

#include "thybal/analytic.hpp"
#include "thybal/config.hpp"
#include "thybal/csv.hpp"
#include "thybal/errors.hpp"
#include "thybal/serialize.hpp"
#include "thybal/sweep.hpp"

#include <CLI11.hpp>

#include <ostream>

namespace thybal::cli {

namespace {

namespace fs = std::filesystem;

void report_violations(std::ostream& diag, const ValidationOutcome& outcome)
{
    for (const auto& v : outcome.violations)
        diag << "invalid " << v.field << ": " << v.message << '\n';
}

ValidationOutcome validate_base(const ConfigFile& cfg)
{
    ValidationOutcome out = validate(cfg.circuit);
    for (const auto& v : validate(cfg.device).violations)
        out.violations.push_back(v);
    for (const auto& v : validate(cfg.tolerances).violations)
        out.violations.push_back(v);
    return out;
}

void prepare_out_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw IoError("cannot create output directory " + dir.string());
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j)
{
    csv::write_file(path, j.dump(2) + "\n");
}

Waveform sample(Channel channel, double t0, double t1, std::size_t count, const std::function<double(double)>& fn)
{
    Waveform w;
    w.channel = channel;
    if (!(t1 > t0) || count < 2) {
        w.t.push_back(t0);
        w.y.push_back(fn(t0));
        return w;
    }
    for (std::size_t i = 0; i < count; ++i) {
        const double t = i + 1 == count ? t1 : t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(count - 1);
        w.t.push_back(t);
        w.y.push_back(fn(t));
    }
    return w;
}

void write_waveform(const fs::path& dir, const std::string& prefix, const Waveform& w)
{
    csv::write_file(dir / (prefix + std::string(to_string(w.channel)) + ".csv"), csv::waveform_to_csv(w));
}

// Loads the config and checks the base blocks; nullopt after reporting on
// failure.
std::optional<ConfigFile> load(const Options& opts, std::ostream& diag)
{
    try {
        ConfigFile cfg = load_config(opts.config);
        const ValidationOutcome base = validate_base(cfg);
        if (!base.ok()) {
            report_violations(diag, base);
            return std::nullopt;
        }
        return cfg;
    } catch (const ConfigError& e) {
        diag << "config error: " << e.what() << '\n';
        return std::nullopt;
    }
}

template <typename Body>
int guarded(std::ostream& diag, Body&& body)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        diag << "config error: " << e.what() << '\n';
    } catch (const Error& e) {
        diag << "error: " << e.what() << '\n';
    }
    return kInvalidInput;
}

bool check_design(const ConfigFile& cfg, std::ostream& diag)
{
    if (!cfg.design) {
        diag << "config error: missing block 'design'\n";
        return false;
    }
    const ValidationOutcome v = validate(cfg.circuit, cfg.device, *cfg.design);
    if (!v.ok()) {
        report_violations(diag, v);
        return false;
    }
    return true;
}

}  // namespace

int cmd_analyze(const Options& opts, std::ostream& diag)
{
    return guarded(diag, [&]() -> int {
        const auto cfg = load(opts, diag);
        if (!cfg || !check_design(*cfg, diag))
            return kInvalidInput;
        const BalancingDesign& design = *cfg->design;
        const ChargingModel model(cfg->circuit, cfg->device, design);
        const TransientReport report = analyze(cfg->circuit, cfg->device, design);

        prepare_out_dir(opts.out_dir);
        csv::write_file(opts.out_dir / "report.txt", to_text(cfg->circuit, design, report));
        nlohmann::ordered_json j;
        j["circuit"] = to_json(cfg->circuit);
        j["device"] = to_json(cfg->device);
        j["design"] = to_json(design);
        j["report"] = to_json(report);
        write_json(opts.out_dir / "report.json", j);

        const double t0 = cfg->device.min_delay;
        const double t1 = cfg->device.max_delay;
        const double t_end = report.conduction_time + 0.1 * (report.conduction_time - t1);
        const double initial = model.current(t1);
        write_waveform(opts.out_dir, "waveform_", sample(Channel::Drive, t0, t1, kWaveformSamples, [&](double t) {
                           return drive_voltage(t, cfg->circuit, cfg->device);
                       }));
        write_waveform(opts.out_dir, "waveform_", sample(Channel::ChargeCurrent, t0, t1, kWaveformSamples, [&](double t) {
                           return model.current(t);
                       }));
        write_waveform(opts.out_dir, "waveform_", sample(Channel::DeviceVoltage, t0, t1, kWaveformSamples, [&](double t) {
                           return model.device_voltage(t);
                       }));
        write_waveform(opts.out_dir, "waveform_",
                       sample(Channel::DischargeCurrent, t1, t_end, kWaveformSamples, [&](double t) {
                           return discharge_current(t, cfg->circuit, cfg->device, design, initial);
                       }));
        diag << to_text(cfg->circuit, design, report);
        return kSuccess;
    });
}

int cmd_sweep(const Options& opts, std::ostream& diag)
{
    return guarded(diag, [&]() -> int {
        const auto cfg = load(opts, diag);
        if (!cfg)
            return kInvalidInput;
        if (!cfg->sweep) {
            diag << "config error: missing block 'sweep'\n";
            return kInvalidInput;
        }
        const SweepGrid grid = make_grid(*cfg);
        const ValidationOutcome v = validate(grid);
        if (!v.ok()) {
            report_violations(diag, v);
            return kInvalidInput;
        }
        const SweepResult result = run_sweep(grid);
        prepare_out_dir(opts.out_dir);
        export_csv(result, opts.out_dir / "sweep.csv");
        write_json(opts.out_dir / "sweep_manifest.json", sweep_manifest(grid, result));
        diag << "sweep: " << result.rows.size() << " rows (" << result.skipped_count() << " skipped)\n";
        return kSuccess;
    });
}

int cmd_design(const Options& opts, std::ostream& diag)
{
    return guarded(diag, [&]() -> int {
        const auto cfg = load(opts, diag);
        if (!cfg)
            return kInvalidInput;
        if (!cfg->constraints) {
            diag << "config error: missing block 'constraints'\n";
            return kInvalidInput;
        }
        DesignConstraints constraints = *cfg->constraints;
        if (opts.snap)
            constraints.snap = *opts.snap;
        const ValidationOutcome v = validate(constraints, cfg->circuit);
        if (!v.ok()) {
            report_violations(diag, v);
            return kInvalidInput;
        }
        const DesignReport report = select_network(cfg->circuit, cfg->device, cfg->tolerances, constraints);
        prepare_out_dir(opts.out_dir);
        csv::write_file(opts.out_dir / "design_report.txt", to_text(report));
        nlohmann::ordered_json j;
        j["constraints"] = to_json(constraints);
        j["report"] = to_json(report);
        write_json(opts.out_dir / "design_report.json", j);
        diag << to_text(report);
        return report.feasible ? kSuccess : kInfeasible;
    });
}

int cmd_compare_rr(const Options& opts, std::ostream& diag)
{
    return guarded(diag, [&]() -> int {
        const auto cfg = load(opts, diag);
        if (!cfg)
            return kInvalidInput;
        if (!cfg->constraints) {
            diag << "config error: missing block 'constraints'\n";
            return kInvalidInput;
        }
        const DesignConstraints& c = *cfg->constraints;
        const double limit = cfg->circuit.static_share() * (1.0 + c.max_overvoltage_pct / 100.0);
        const double rr_cd = reverse_recovery_cd(cfg->circuit, cfg->device, cfg->tolerances, limit);
        const double delay_cd = solve_min_cd(cfg->circuit, cfg->device, cfg->tolerances, c.max_overvoltage_pct, 0.0);

        BalancingDesign bare;
        bare.static_resistance = 1.0;
        bare.tolerances = cfg->tolerances;
        bare.capacitance = delay_cd;
        const TransientReport delay_stress = analyze(cfg->circuit, cfg->device, bare);
        bare.capacitance = rr_cd;
        const TransientReport rr_stress = analyze(cfg->circuit, cfg->device, bare);

        nlohmann::ordered_json j;
        j["V_d1"] = limit;
        j["C_d_rr"] = rr_cd;
        j["stresses_rr"] = to_json(rr_stress);
        j["C_d"] = delay_cd;
        j["stresses"] = to_json(delay_stress);
        j["ratio"] = rr_cd / delay_cd;
        prepare_out_dir(opts.out_dir);
        write_json(opts.out_dir / "compare_rr.json", j);
        diag << "reverse-recovery C_d = " << rr_cd << " F, turn-on-delay C_d = " << delay_cd << " F, ratio "
             << rr_cd / delay_cd << '\n';
        return kSuccess;
    });
}

int cmd_verify(const Options& opts, std::ostream& diag, const ModelFactory& factory)
{
    return guarded(diag, [&]() -> int {
        const auto cfg = load(opts, diag);
        if (!cfg || !check_design(*cfg, diag))
            return kInvalidInput;
        const BalancingDesign& design = *cfg->design;
        oracle::IntegratorConfig icfg = oracle::default_config(cfg->circuit, cfg->device, design);
        if (opts.dt)
            icfg.dt = *opts.dt;

        const bool underdamped = is_underdamped(cfg->circuit, design);
        std::optional<oracle::AnalyticChannels> model;
        if (underdamped)
            model = factory(cfg->circuit, cfg->device, design);
        oracle::VerificationResult result = oracle::verify(cfg->circuit, cfg->device, design, icfg, model);
        if (!underdamped) {
            result.note = "NotUnderdamped: R_d >= 2 sqrt(L / C_eff), closed forms skipped; oracle waveforms only";
            diag << result.note << '\n';
        }

        prepare_out_dir(opts.out_dir);
        write_waveform(opts.out_dir, "oracle_", result.charging.drive);
        write_waveform(opts.out_dir, "oracle_", result.charging.current);
        write_waveform(opts.out_dir, "oracle_", result.charging.device_voltage);
        write_waveform(opts.out_dir, "oracle_", result.discharge);
        write_json(opts.out_dir / "verify.json", to_json(result));

        for (const auto& e : result.errors)
            diag << to_string(e.channel) << " sup-norm relative error " << e.relative() << '\n';
        if (!result.passed(kVerifyTolerance)) {
            diag << "verification FAILED (tolerance " << kVerifyTolerance << ")\n";
            return kVerificationFailed;
        }
        return kSuccess;
    });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& diag)
{
    CLI::App app{"Voltage-balancing network design for series thyristor crowbars"};
    app.require_subcommand(1);

    Options opts;
    std::string snap_text;
    double dt = 0.0;

    auto add = [&](const char* name, const char* help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opts.config, "JSON config (SI units)")->required();
        sub->add_option("--out", opts.out_dir, "output directory")->required();
        sub->add_option("--snap", snap_text, "E-series snapping: none, e12, e24");
        sub->add_option("--dt", dt, "oracle step override (seconds)");
        return sub;
    };
    auto* analyze_cmd = add("analyze", "peak stresses and waveforms of the configured design");
    auto* sweep_cmd = add("sweep", "tabulate design curves over the configured grid");
    auto* design_cmd = add("design", "select R_d, C_d and R_s for the configured constraints");
    auto* rr_cmd = add("compare-rr", "compare against reverse-recovery-based C_d sizing");
    auto* verify_cmd = add("verify", "check closed forms against numerical integration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, diag);
        return code == 0 ? kSuccess : kInvalidInput;
    }

    if (!snap_text.empty()) {
        opts.snap = parse_snap(snap_text);
        if (!opts.snap) {
            diag << "--snap must be one of none, e12, e24\n";
            return kInvalidInput;
        }
    }
    if (dt != 0.0) {
        if (!(dt > 0.0)) {
            diag << "--dt must be positive\n";
            return kInvalidInput;
        }
        opts.dt = dt;
    }

    if (analyze_cmd->parsed())
        return cmd_analyze(opts, diag);
    if (sweep_cmd->parsed())
        return cmd_sweep(opts, diag);
    if (design_cmd->parsed())
        return cmd_design(opts, diag);
    if (rr_cmd->parsed())
        return cmd_compare_rr(opts, diag);
    if (verify_cmd->parsed())
        return cmd_verify(opts, diag);
    return kInvalidInput;
}

}  // namespace thybal::cli
