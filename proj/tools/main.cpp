#include <iostream>

#include <CLI11.hpp>

#include "app.hpp"

int main(int argc, char** argv) {
  using namespace wavelab::cli;
  CLI::App app{"wavelab: mode-wise solver and experiment harness for u'' + a(t) L u = f"};
  Options opts;
  app.add_option("command", opts.command, "solve | sweep | verify | spectra | coeff-dump | report")
      ->required()
      ->check(CLI::IsMember(commands()));
  app.add_option("--config", opts.config_path, "JSON run configuration (built-in defaults when omitted)");
  app.add_option("--out", opts.out_dir, "output directory (overrides outputs.dir and WAVELAB_OUT)");
  app.add_option("--jobs", opts.jobs, "worker threads (overrides WAVELAB_JOBS)")->check(CLI::Range(1, 4096));
  app.add_option("--seed", opts.seed, "seed for random data and verify samples");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }
  if (auto err = apply_environment(opts)) {
    std::cerr << *err << "\n";
    return kConfigError;
  }
  return run(opts, std::cerr);
}
