#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qnc/errors.hpp"
#include "qnc/scenario.hpp"

namespace {

using qnc::cli::Json;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
};

// The user document with overrides and seed precedence applied:
// --seed beats QNC_SEED beats run.base_seed.
Json user_document(const Common& opt) {
  Json user = qnc::cli::load_config(opt.config);
  for (const auto& s : opt.sets) qnc::cli::apply_override(user, s);
  std::optional<std::uint64_t> seed = opt.seed;
  if (!seed) {
    if (const char* env = std::getenv("QNC_SEED"); env && *env) {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(env, &end, 10);
      if (*end != '\0' || env[0] == '-')
        throw qnc::cli::ConfigError(std::string("QNC_SEED '") + env + "' is not an unsigned integer");
      seed = v;
    }
  }
  if (seed) qnc::cli::apply_override(user, "run.base_seed=" + std::to_string(*seed));
  return user;
}

void add_common(CLI::App* cmd, Common& opt) {
  cmd->add_option("--config", opt.config, "scenario file (JSON)")->required();
  cmd->add_option("--set", opt.sets, "dotted-path override key=value (repeatable)");
  cmd->add_option("--seed", opt.seed, "base seed (overrides QNC_SEED and the config)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qnc: quantum noise cancellation scenarios"};
  app.require_subcommand(1);

  Common run_opt, sweep_opt, validate_opt;
  std::string run_out, sweep_out;
  std::size_t run_threads = 0, sweep_threads = 0;
  std::string sweep_param, sweep_range;

  auto* run = app.add_subcommand("run", "execute a scenario and write its outputs");
  add_common(run, run_opt);
  run->add_option("--out", run_out, "output directory (default: output.directory)");
  run->add_option("--threads", run_threads, "worker threads, 0 = auto");

  auto* sweep = app.add_subcommand("sweep", "run a scenario over a range of one parameter");
  add_common(sweep, sweep_opt);
  sweep->add_option("--out", sweep_out, "output directory (default: output.directory)");
  sweep->add_option("--threads", sweep_threads, "worker threads, 0 = auto");
  sweep->add_option("--param", sweep_param, "dotted config key to sweep")->required();
  sweep->add_option("--range", sweep_range, "start:stop:count or v1,v2,...")->required();

  auto* validate = app.add_subcommand("validate", "check a scenario and print the resolved form");
  add_common(validate, validate_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      const Json resolved = qnc::cli::resolve(user_document(run_opt));
      const auto result = qnc::cli::run_scenario(resolved, run_threads);
      const std::string dir =
          run_out.empty() ? resolved["output"]["directory"].get<std::string>() : run_out;
      qnc::cli::write_outputs(dir, resolved, result);
      std::cout << "wrote " << dir << "\n";
    } else if (*sweep) {
      const Json user = user_document(sweep_opt);
      const Json resolved = qnc::cli::resolve(user);
      const qnc::cli::SweepSpec spec{sweep_param, qnc::cli::parse_sweep_values(sweep_range)};
      const std::string csv = qnc::cli::run_sweep(user, spec, sweep_threads);
      const std::string dir =
          sweep_out.empty() ? resolved["output"]["directory"].get<std::string>() : sweep_out;
      qnc::cli::RunResult out;
      out.summary = Json{{"schema", qnc::cli::kSchemaVersion},
                         {"scheme", resolved["scheme"]},
                         {"sweep_parameter", spec.parameter},
                         {"sweep_values", spec.values}};
      out.files["sweep.csv"] = csv;
      qnc::cli::write_outputs(dir, resolved, out);
      std::cout << "wrote " << dir << "\n";
    } else if (*validate) {
      std::cout << qnc::cli::resolve(user_document(validate_opt)).dump(2) << "\n";
    }
  } catch (const qnc::Error& e) {
    std::cerr << "qnc: " << e.what() << "\n";
    return qnc::is_numerical(e) ? kExitNumerical : kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "qnc: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
