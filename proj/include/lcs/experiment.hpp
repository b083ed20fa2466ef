#pragma once

#include "lcs/runner.hpp"
#include "lcs/verification.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace lcs {

/// Invalid experiment configuration; `path` names the offending field.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : InvalidArgument(path + ": " + message), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct ExperimentConfig {
  std::string system;
  std::vector<double> sigma_params;  ///< empty: catalog defaults
  std::string method;
  std::string discretization = "midpoint";
  double h = 0.1;
  int steps = 10;
  InitialData initial;
  double tol = 1e-12;
  int max_iter = 50;
  std::string output_path;
  std::optional<int> chart;  ///< defaults to the system's first chart
  double core_margin = 0.1;
};

/// Validates field types and values and method/initial-data compatibility.
ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

SystemModel model_for(const ExperimentConfig& cfg);
RunSpec spec_for(const ExperimentConfig& cfg, const SystemModel& model);

nlohmann::json summary_json(const ExperimentConfig& cfg, const RunOutput& run);
nlohmann::json to_json(const ConvergenceResult& res);
nlohmann::json to_json(const CheckResult& check);
nlohmann::json to_json(const VerifyReport& rep);

/// `<output_path without extension>.summary.json`.
std::string summary_path(const std::string& output_path);

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitVerification = 4;

/// Runs the configured method, writes the CSV to output_path and the summary
/// next to it, and returns an exit code.
int cmd_integrate(const ExperimentConfig& cfg, std::ostream& log);

/// Prints the convergence table as JSON (and writes it to output_path's
/// summary location when output_path is set).
int cmd_convergence(const ExperimentConfig& cfg, const std::vector<double>& hs,
                    std::ostream& out, std::ostream& log);

int cmd_verify(const std::string& system, std::uint64_t seed, std::ostream& out,
               std::ostream& log);

}  // namespace lcs
