// fivevec: simulate, verify, derive, transform.

#include <CLI11.hpp>

#include "fivevec/cli.hpp"

int main(int argc, char** argv) {
  using fivevec::cli::Overrides;

  CLI::App app{"Extended-vector mechanics: simulation, verification and field derivatives"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  Overrides flags;
  std::optional<std::string> config;
  app.add_option("--config", config, "JSON config file; flags take precedence");
  app.add_option("--input", flags.input, "input document (JSON)");
  app.add_option("--out", flags.out, "output path (CSV for simulate, JSON otherwise)");
  app.add_option("--summary", flags.summary, "simulate: write the JSON summary here instead of stdout");
  app.add_option("--seed", flags.seed, "RNG seed for verify");
  app.add_option("--dt", flags.dt, "time step (s)");
  app.add_option("--steps", flags.steps, "number of time steps");
  app.add_option("--tolerance", flags.tolerance, "override the pass/fail tolerance");
  app.add_option("--drift-tolerance", flags.drift_tolerance, "simulate: relative momentum drift bound");
  app.add_option("--metric", flags.metric, "metric preset (euclidean3 | minkowski4)");
  app.add_option("--cases", flags.cases, "verify: random cases per property");
  app.add_option("--fd-step", flags.fd_step, "derive: step for the finite-difference check");

  const char* commands[][2] = {{"simulate", "integrate a body and check dM/dt = K along the trajectory"},
                               {"verify", "run the property catalogue and print a JSON report"},
                               {"derive", "bivector derivative of a polynomial field"},
                               {"transform", "apply a motion to a tensor or a field"}};
  for (const auto& [name, help] : commands) {
    app.add_subcommand(name, help)->callback([&flags, n = std::string(name)] { flags.command = n; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return fivevec::cli::kConfigError;
  }
  return fivevec::cli::run_guarded(flags, config, std::cout, std::cerr);
}
