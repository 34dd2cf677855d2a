#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "kshyp/mild_solver.hpp"

namespace kshyp {

/// Bad or incomplete scenario; maps to exit code 2.
class ScenarioError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int { kExitPass = 0, kExitValidation = 2, kExitCheckFailed = 3, kExitBlowUp = 4 };

/// Radial profile family: "zero", "gaussian" a e^{-r^2/(2w^2)}, "sech" a sech(r/w)^2.
/// As a forcing profile (the d/dr component) "bump" is a r e^{-r^2/(2w^2)}.
struct ProfileSpec {
  std::string family = "zero";
  double amplitude = 0.0;
  double width = 1.0;
  RadialField sample(const RadialGrid &grid) const;
};

struct CheckOptions {
  double epsilon = 0.1;          ///< translation tolerance
  double window_start = 0.0;     ///< translation-scan window
  double window_length = 200.0;
  double tau_min = 1.0;
  double burn_in = 0.0;          ///< 0 selects the minimal burn-in
  std::vector<double> snapshots; ///< times of full-field snapshots
  std::vector<double> calibration_times;
};

struct Scenario {
  std::string name = "scenario";
  SolverConfig config;
  ProfileSpec initial;
  ProfileSpec forcing_profile;
  AAPSignal forcing_signal;
  DispersiveConstants constants = DispersiveConstants::defaults(3);
  CheckOptions checks;
  std::filesystem::path source;

  RadialField initial_field() const;
  Forcing forcing() const;
};

/// Parses and fully validates; unknown keys are rejected. Throws ScenarioError.
Scenario parse_scenario(const nlohmann::json &j);
Scenario load_scenario(const std::filesystem::path &path);
/// Overrides delta_n, c_tilde, provenance from a constants file.
void apply_constants_file(Scenario &s, const std::filesystem::path &path);
/// Every resolved field, defaults included.
nlohmann::json manifest(const Scenario &s);

/// 17 significant digits.
std::string format_number(double x);
void write_trajectory_csv(const std::filesystem::path &path, const Trajectory &tr, const Forcing &f);

int cmd_simulate(const Scenario &s, const std::filesystem::path &out);
int cmd_verify_linear(const Scenario &s, const std::filesystem::path &out);
int cmd_verify_fixed_point(const Scenario &s, const std::filesystem::path &out);
int cmd_verify_decay(const Scenario &s, const std::filesystem::path &out);
int cmd_verify_massera(const Scenario &s, const std::filesystem::path &out);
int cmd_calibrate(const Scenario &s, const std::filesystem::path &out);
int cmd_translation_scan(const Scenario &s, const std::filesystem::path &out);

/// Dispatches by subcommand name; catches and maps exceptions to exit codes.
int run_command(const std::string &command, const std::filesystem::path &scenario_path,
                const std::filesystem::path &out, const std::optional<std::filesystem::path> &constants);

/// Full argv front end (CLI11).
int cli_main(int argc, char **argv);

}  // namespace kshyp
