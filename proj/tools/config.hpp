#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavelab/coefficients.hpp"
#include "wavelab/mode_solver.hpp"
#include "wavelab/norms.hpp"
#include "wavelab/spectra.hpp"
#include "wavelab/veryweak.hpp"

namespace wavelab::cli {

inline constexpr int kConfigVersion = 1;

/// Thrown for malformed or invalid configuration; carries every violation.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct RunConfig {
  nlohmann::json echo;  // validated document with sorted keys

  SpectralModel model{model::Landau2D{}, 0.0};
  double cutoff = 10;
  std::size_t max_modes = 200000;

  std::optional<PropagationSpeed> speed;
  SourceSpec source;
  InitialDataSpec data;

  double T = 1.0;
  std::size_t samples = 64;
  StepPolicy policy;

  std::vector<Mollifier> mollifiers;
  ScaleRule rule;
  std::vector<double> epsilons;

  std::vector<WeightSpec> norms;

  double s = 0;
  std::vector<int> orders{0, 1};
  bool negligibility = false;
  bool consistency = false;
  std::vector<ThresholdConfig> thresholds;

  std::string out_dir = "wavelab_out";
};

/// The built-in configuration used when no file is given.
nlohmann::json default_config_json();

/// Parses JSON text; syntax errors report line and column.
nlohmann::json parse_json_text(const std::string& text, const std::string& origin);

/// Validates a document and builds the run configuration, collecting all
/// violations (with field paths such as "model.B") before throwing.
RunConfig build_config(const nlohmann::json& doc);

RunConfig parse_config(const std::string& path);

}  // namespace wavelab::cli
