#pragma once

// Command-line front end. Commands read a JSON config, write machine output
// under the output directory only, and report diagnostics on `diag`.
//
// Exit codes: 0 success, 2 invalid input, 3 infeasible design,
// 4 verification failure.

#include "thybal/oracle.hpp"
#include "thybal/selector.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>

namespace thybal::cli {

enum ExitCode : int {
    kSuccess = 0,
    kInvalidInput = 2,
    kInfeasible = 3,
    kVerificationFailed = 4,
};

/// Sup-norm relative error allowed between closed forms and the oracle.
inline constexpr double kVerifyTolerance = 1e-3;

/// Samples per analytic waveform written by `analyze`.
inline constexpr std::size_t kWaveformSamples = 1001;

struct Options {
    std::filesystem::path config;
    std::filesystem::path out_dir;
    std::optional<Snap> snap;
    std::optional<double> dt;
};

int cmd_analyze(const Options& opts, std::ostream& diag);
int cmd_sweep(const Options& opts, std::ostream& diag);
int cmd_design(const Options& opts, std::ostream& diag);
int cmd_compare_rr(const Options& opts, std::ostream& diag);

/// Builds the closed-form channels checked by `verify`; substituted in
/// negative-control tests.
using ModelFactory =
    std::function<oracle::AnalyticChannels(const CircuitSpec&, const DeviceParams&, const BalancingDesign&)>;

int cmd_verify(const Options& opts, std::ostream& diag, const ModelFactory& factory = oracle::analytic_channels);

/// Parses argv (subcommand plus flags) and dispatches.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& diag);

}  // namespace thybal::cli
