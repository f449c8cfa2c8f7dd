#pragma once

// Scenario configuration and orchestration behind the `qnc` command line.
//
// A scenario is a JSON document (see README for the key schema). Overrides
// use dotted paths: `run.base_seed=7`, `oscillator.gamma=0.05`.

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "qnc/errors.hpp"
#include "qnc/model.hpp"

namespace qnc::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Configuration problem; maps to exit status 2.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

const std::vector<std::string>& scheme_names();

// Every key with its default; `scheme` and `oscillator.nu` have none.
Json default_config();

Json parse_config(const std::string& text);
Json load_config(const std::string& path);

// Sets a dotted path to a value parsed as JSON, falling back to a string.
void apply_override(Json& config, const std::string& assignment);

// Merges defaults under the user document and checks every field. The result
// is closed: resolving it again yields the same document.
Json resolve(const Json& user);

// Files keyed by name (CSV text or JSON text) plus the summary document.
struct RunResult {
  Json summary;
  std::map<std::string, std::string> files;
};

// threads = 0 picks the hardware concurrency; results do not depend on it.
RunResult run_scenario(const Json& resolved, std::size_t threads = 0);

// Writes resolved_config.json, summary.json and every result file.
void write_outputs(const std::string& directory, const Json& resolved, const RunResult& result);

struct SweepSpec {
  std::string parameter;
  std::vector<double> values;
};

// "start:stop:count" (inclusive, evenly spaced) or "v1,v2,...".
std::vector<double> parse_sweep_values(const std::string& text);

// Applies each value to the user document, resolves and runs it. Long-format
// CSV: value,metric,metric_value,status. Failing points are recorded with
// their error and the sweep continues.
std::string run_sweep(const Json& user, const SweepSpec& spec, std::size_t threads = 0);

// Number formatting used in every CSV: 17 significant digits, '.' decimal.
std::string format_number(double v);

// Hermitian force on the symmetric grid +-half*d_omega, random inside
// |w| <= support and zero outside, with support recorded.
Spectrum synthetic_broadband_force(double d_omega, std::size_t half, double support,
                                   std::mt19937_64& rng);

}  // namespace qnc::cli
