#ifndef DISP_SCENARIOS_HPP
#define DISP_SCENARIOS_HPP

#include "integrator.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace disp {

/// Named presets reproducing the paper-style figure scenarios: all use
/// ell = 1, nu = 0.01, mu = 0.001, u0 = sin(pi x), dt = 1e-3, T_end = 10.
/// fig1/fig3 run without delay, fig5/fig7 with tau = 1; fig9..fig12 carry a
/// default tau sweep. fig2/4/6/8 alias the norm-plot base case of their
/// family.
const std::vector<std::string>& preset_names();
RunConfig preset(const std::string& name);  // throws ConfigError listing the names
std::vector<double> preset_sweep_defaults(const std::string& name);  // empty when none

/// Damping profile tokens accepted by configs and the sweep profile axis.
const std::vector<std::string>& profile_tokens();
DampingProfile profile_from_token(const std::string& token, double ell);
std::string profile_token(const DampingProfile& profile);  // empty when not a named one

struct RunResult {
    RunConfig config;
    double p = 1.0;
    HypothesisReport hypotheses;
    NormSeries norms;
    std::vector<Snapshot> snapshots;
    RunStatus status;
    PicardStats picard;
    double tau_effective = 0.0;
    bool tau_snapped = false;
    long steps = 0;
    std::optional<StabilityReport> stability;
    std::optional<DecayFit> decay;
};

/// Runs the configuration and attaches the damping hypotheses, the stability
/// constants (at the effective delay) and a decay fit over the trailing
/// [0.2 T_end, T_end] window.
RunResult execute(const RunConfig& config, double p = 1.0, const Forcing* forcing = nullptr);

enum class SweepAxis { tau, nu, mu, profile };
SweepAxis axis_from_name(const std::string& s);
const char* axis_name(SweepAxis a);

/// Validates every value before starting, then runs the members
/// concurrently; results are ordered as given.
std::vector<RunResult> run_sweep(const RunConfig& base, SweepAxis axis,
                                 const std::vector<std::string>& values, double p = 1.0);

/// Directory-name-safe token for one sweep value.
std::string sweep_dir_name(SweepAxis axis, const std::string& value);

/// Writes norms.csv, snapshots.csv and meta.json into out_dir (created if
/// missing). Partial files are removed on failure. Throws IoError.
void emit(const RunResult& result, const std::filesystem::path& out_dir);

nlohmann::json meta_json(const RunResult& result);
nlohmann::json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

/// Flat key=value file with [params] / [profile] / [history] / [run]
/// sections; keys are named after the type fields.
RunConfig load_config_file(const std::filesystem::path& path);

/// Applies a dotted-key override, e.g. "params.tau" = "0.5".
void apply_override(RunConfig& config, const std::string& key, const std::string& value);

/// Re-reads an emitted directory and recomputes the stability report and
/// decay fit from the stored CSV. Returns the report as JSON text.
std::string report_dir(const std::filesystem::path& dir);

} // namespace disp

#endif
