#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wavelab::cli {

enum ExitCode : int { kAllPass = 0, kAssertionFailure = 1, kConfigError = 2 };

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"solve", "sweep", "verify", "spectra", "coeff-dump", "report"};
  return names;
}

struct Options {
  std::string command;
  std::optional<std::string> config_path;  // built-in defaults when absent
  std::optional<std::string> out_dir;
  std::optional<std::size_t> jobs;
  std::optional<std::uint64_t> seed;
};

/// Fills unset jobs / output directory from WAVELAB_JOBS and WAVELAB_OUT.
/// Returns an error message for a malformed variable.
std::optional<std::string> apply_environment(Options& opts);

/// Runs one command; diagnostics go to `log`. Returns an ExitCode.
int run(const Options& opts, std::ostream& log);

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// %.17g rendering used in every CSV cell.
std::string format_double(double v);

}  // namespace wavelab::cli
