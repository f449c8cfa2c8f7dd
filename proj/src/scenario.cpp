#include "qnc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qnc/budget.hpp"
#include "qnc/langevin.hpp"
#include "qnc/reconstruct.hpp"
#include "qnc/transfer.hpp"

namespace qnc::cli {

namespace {

constexpr cplx kI{0.0, 1.0};

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

const Json& at(const Json& j, const std::string& path) {
  const Json* cur = &j;
  for (const auto& key : split(path, '.')) {
    if (!cur->is_object() || !cur->contains(key)) fail(path, "missing");
    cur = &(*cur)[key];
  }
  return *cur;
}

double num(const Json& j, const std::string& path) {
  const Json& v = at(j, path);
  if (!v.is_number()) fail(path, "must be a number");
  return v.get<double>();
}

std::uint64_t count(const Json& j, const std::string& path) {
  const Json& v = at(j, path);
  if (!v.is_number_integer() || v.get<long long>() < 0) fail(path, "must be a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string str(const Json& j, const std::string& path) {
  const Json& v = at(j, path);
  if (!v.is_string()) fail(path, "must be a string");
  return v.get<std::string>();
}

// Runs a constructor check and rethrows its complaint against a field.
template <class F>
auto checked(const std::string& field, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    fail(field, e.what());
  }
}

bool same_kind(const Json& def, const Json& val) {
  if (def.is_null()) return !val.is_object();
  if (def.is_number_integer()) return val.is_number_integer();
  if (def.is_number()) return val.is_number();
  if (def.is_boolean()) return val.is_boolean();
  if (def.is_string()) return val.is_string();
  if (def.is_array()) return val.is_array();
  if (def.is_object()) return val.is_object();
  return false;
}

const char* kind_name(const Json& def) {
  if (def.is_number_integer()) return "an integer";
  if (def.is_number()) return "a number";
  if (def.is_boolean()) return "a boolean";
  if (def.is_string()) return "a string";
  if (def.is_array()) return "an array";
  if (def.is_object()) return "an object";
  return "a scalar";
}

void merge(Json& base, const Json& user, const std::string& prefix) {
  if (!user.is_object()) fail(prefix.empty() ? "<root>" : prefix, "must be an object");
  for (const auto& [key, val] : user.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!base.contains(key)) fail(path, "unknown key");
    Json& slot = base[key];
    if (!same_kind(slot, val)) fail(path, std::string("must be ") + kind_name(slot));
    if (slot.is_object()) {
      merge(slot, val, path);
    } else {
      slot = val;
    }
  }
}

// --- scenario assembly ------------------------------------------------------

OscillatorParams oscillator(const Json& c) {
  return checked("oscillator", [&] {
    return OscillatorParams(num(c, "oscillator.nu"), num(c, "oscillator.gamma"),
                            num(c, "oscillator.n_T"));
  });
}

double broadband_spacing(const Json& c) {
  const auto ppn = count(c, "grid.points_per_nu");
  if (ppn == 0) fail("grid.points_per_nu", "must be >= 1");
  return num(c, "oscillator.nu") / static_cast<double>(ppn);
}

double narrowband_spacing(const Json& c) {
  const auto ppo = count(c, "grid.points_per_Omega");
  if (ppo == 0) fail("grid.points_per_Omega", "must be >= 1");
  const double Om = num(c, "oscillator.Omega");
  const double dw = Om / static_cast<double>(ppo);
  if (!as_integer(num(c, "oscillator.nu") / dw))
    fail("oscillator.Omega", "nu must be an integer multiple of Omega / grid.points_per_Omega");
  return dw;
}

SimulationPlan tc_plan(const Json& c, std::size_t threads) {
  SimulationPlan plan;
  plan.params1 = oscillator(c);
  plan.params2 = plan.params1;
  plan.meas = checked("measurement", [&] {
    return MeasurementConfig(num(c, "measurement.k"), num(c, "measurement.eta"));
  });
  plan.measured_observable =
      checked("measurement.observable",
              [&] { return observable_from_string(str(c, "measurement.observable")); });
  const std::string kind = str(c, "force.kind");
  if (kind == "sinusoid") {
    plan.force1 = ForceDescriptor::sinusoid(num(c, "force.amplitude"), num(c, "force.frequency"),
                                            num(c, "force.phase"));
    plan.force2 = plan.force1;
  } else if (kind != "zero") {
    fail("force.kind", "tc_pair accepts 'zero' or 'sinusoid'");
  }
  plan.dt = num(c, "run.dt");
  plan.n_steps = count(c, "run.n_steps");
  plan.n_trajectories = count(c, "run.n_trajectories");
  plan.stride = count(c, "run.stride");
  plan.base_seed = count(c, "run.base_seed");
  plan.threads = threads;
  checked("run", [&] {
    plan.validate();
    return 0;
  });
  return plan;
}

// Positive-frequency narrowband force: random lines or a Lorentzian about nu,
// mirrored to a Hermitian spectrum on +-half * dw.
Spectrum narrowband_force(const Json& c, double dw, std::size_t half) {
  const double nu = num(c, "oscillator.nu");
  const double Om = num(c, "oscillator.Omega");
  const double amp = num(c, "force.amplitude");
  const std::string kind = str(c, "force.kind");
  std::vector<cplx> v(2 * half + 1, cplx{0.0, 0.0});
  const double top = static_cast<double>(half) * dw;
  std::optional<double> support = top;
  if (kind == "synthetic") {
    std::mt19937_64 rng(count(c, "run.base_seed"));
    std::normal_distribution<double> g(0.0, 1.0);
    for (std::size_t i = half + 1; i <= 2 * half; ++i) {
      const double w = static_cast<double>(i - half) * dw;
      if (std::abs(w - nu) < Om * (1.0 - 1e-9)) v[i] = amp * cplx{g(rng), g(rng)};
    }
    support = nu + Om;
  } else if (kind == "lorentzian") {
    double bw = num(c, "force.bandwidth");
    if (!(bw > 0.0)) fail("force.bandwidth", "must be > 0");
    for (std::size_t i = half + 1; i <= 2 * half; ++i) {
      const double w = static_cast<double>(i - half) * dw;
      v[i] = amp / (0.5 * bw - kI * (w - nu));
    }
  } else if (kind != "zero") {
    fail("force.kind", "narrowband accepts 'synthetic', 'lorentzian' or 'zero'");
  }
  for (std::size_t m = 1; m <= half; ++m) v[half - m] = std::conj(v[half + m]);
  return Spectrum(-top, dw, std::move(v), Symmetry::hermitian, support);
}

std::size_t case2_terms(const Json& c) {
  const auto n = count(c, "run.n_terms");
  if (n == 0) fail("run.n_terms", "must be >= 1");
  return n;
}

// Half-width (in grid points) of the narrowband force grid.
std::size_t narrowband_half(const Json& c, double dw) {
  const double nu = num(c, "oscillator.nu");
  const double Om = num(c, "oscillator.Omega");
  std::size_t reach = 2;
  if (str(c, "scheme") == "narrowband_case2") reach = 2 * case2_terms(c) + 2;
  return static_cast<std::size_t>(std::ceil((nu + static_cast<double>(reach) * Om) / dw)) + 1;
}

std::string spectrum_csv(const Spectrum& s) {
  std::string out = "omega,re,im\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    out += format_number(s.omega(i)) + "," + format_number(s[i].real()) + "," +
           format_number(s[i].imag()) + "\n";
  return out;
}

// Fills scheme-dependent defaults left open in default_config().
void complete(Json& c) {
  const std::string scheme = c["scheme"].get<std::string>();
  Json& force = c["force"];
  if (force["kind"].is_null()) {
    if (scheme == "tc_pair" || scheme == "budget") force["kind"] = "zero";
    else if (scheme == "narrowband_case2") force["kind"] = "lorentzian";
    else force["kind"] = "synthetic";
  }
  if (scheme == "budget") return;
  if (c["oscillator"]["nu"].is_null()) fail("oscillator.nu", "missing");
  const double nu = num(c, "oscillator.nu");
  if (!(nu > 0.0)) fail("oscillator.nu", "must be > 0");
  if (force["bandwidth"].is_null()) force["bandwidth"] = num(c, "oscillator.Omega");
  if (force["support_max"].is_null()) force["support_max"] = 3.0 * nu;
  if (c["run"]["n_max"].is_null()) {
    const double reach = num(c, "force.support_max") + num(c, "grid.extent") * nu;
    c["run"]["n_max"] = static_cast<std::uint64_t>(std::ceil(reach / nu)) + 1;
  }
  if (c["run"]["n_terms"].is_null()) {
    const double eps = num(c, "run.epsilon");
    const double r = num(c, "oscillator.gamma") / num(c, "oscillator.Omega");
    c["run"]["n_terms"] = checked("run.epsilon", [&] { return case2_term_count(r, eps); });
  }
}

void check(const Json& c) {
  const std::string scheme = str(c, "scheme");
  const auto& formats = at(c, "output.formats");
  for (const auto& f : formats)
    if (!f.is_string() || (f != "csv" && f != "json"))
      fail("output.formats", "entries must be \"csv\" or \"json\"");
  (void)str(c, "output.directory");

  if (scheme == "budget") {
    checked("budget", [&] {
      return s_out(num(c, "budget.k"), num(c, "budget.eta"), num(c, "budget.gamma"),
                   num(c, "budget.n_T"), num(c, "budget.signal_power"),
                   at(c, "budget.cancelled").get<bool>());
    });
    checked("budget.kappa", [&] {
      return coupling_criterion(num(c, "budget.gamma"), num(c, "budget.kappa"),
                                num(c, "budget.n_T"));
    });
    return;
  }
  const auto osc = oscillator(c);
  if (scheme == "tc_pair") {
    (void)tc_plan(c, 1);
    return;
  }
  if (!(osc.gamma > 0.0)) fail("oscillator.gamma", "must be > 0 for frequency-domain schemes");
  if (scheme == "broadband") {
    const double dw = broadband_spacing(c);
    if (!(num(c, "grid.extent") > 0.0)) fail("grid.extent", "must be > 0");
    if (!(num(c, "force.support_max") > 0.0)) fail("force.support_max", "must be > 0");
    const std::string kind = str(c, "force.kind");
    if (kind != "synthetic" && kind != "zero")
      fail("force.kind", "broadband accepts 'synthetic' or 'zero'");
    (void)dw;
    (void)count(c, "run.n_max");
    return;
  }
  checked("oscillator.Omega", [&] {
    return TransferContext::narrowband(osc.nu, osc.gamma, num(c, "oscillator.Omega"));
  });
  const double dw = narrowband_spacing(c);
  if (scheme == "narrowband_case2") {
    const double eps = num(c, "run.epsilon");
    if (!(eps > 0.0 && eps < 1.0)) fail("run.epsilon", "must lie in (0, 1)");
    (void)case2_terms(c);
  }
  (void)narrowband_force(c, dw, 1);
}

RunResult run_tc_pair(const Json& c, std::size_t threads) {
  const auto plan = tc_plan(c, threads);
  const auto mom = simulate_moments(plan, Scheme::tc_pair);
  RunResult res;
  const auto times = mom.times();

  std::string csv = "t";
  for (const auto& [name, _] : mom.mean) csv += ",mean_" + name;
  for (const auto& [name, _] : mom.variance) csv += ",var_" + name;
  csv += "\n";
  for (std::size_t s = 0; s < times.size(); ++s) {
    csv += format_number(times[s]);
    for (const auto& [_, v] : mom.mean) csv += "," + format_number(v[s]);
    for (const auto& [_, v] : mom.variance) csv += "," + format_number(v[s]);
    csv += "\n";
  }
  res.files["moments.csv"] = std::move(csv);

  Json& s = res.summary;
  s["trajectories"] = mom.count;
  s["final_time"] = times.back();
  Json fin = Json::object();
  Json growth = Json::object();
  for (const auto& [name, v] : mom.variance) {
    fin[name] = v.back();
    growth[name] = v.back() - v.front();
  }
  s["final_variance"] = std::move(fin);
  s["variance_growth"] = std::move(growth);
  return res;
}

RunResult run_broadband(const Json& c) {
  const double nu = num(c, "oscillator.nu");
  const auto ctx = TransferContext::broadband(nu, num(c, "oscillator.gamma"));
  const double dw = broadband_spacing(c);
  const auto half = static_cast<std::size_t>(
      std::llround(num(c, "grid.extent") * static_cast<double>(count(c, "grid.points_per_nu"))));
  const double support = num(c, "force.support_max");

  Spectrum F = Spectrum::symmetric_zeros(dw, half).with_support(support);
  if (str(c, "force.kind") == "synthetic") {
    std::mt19937_64 rng(count(c, "run.base_seed"));
    F = synthetic_broadband_force(dw, half, support, rng);
    std::vector<cplx> v(F.values().begin(), F.values().end());
    for (auto& x : v) x *= num(c, "force.amplitude");
    F = F.with_values(std::move(v));
  }
  const auto sig = forward_broadband(F, ctx);
  BroadbandOptions opts;
  opts.n_max = static_cast<int>(count(c, "run.n_max"));
  opts.support_max = support;
  const auto series = reconstruct_broadband(sig.z, sig.z_prime, ctx, opts);
  const auto three = reconstruct_broadband_three_term(sig.z, ctx, opts);

  RunResult res;
  res.files["force.csv"] = spectrum_csv(F);
  res.files["signal_z.csv"] = spectrum_csv(sig.z);
  res.files["signal_z_prime.csv"] = spectrum_csv(sig.z_prime);
  res.files["reconstructed.csv"] = spectrum_csv(series.force);
  res.files["reconstructed_three_term.csv"] = spectrum_csv(three.force);

  Json& s = res.summary;
  s["grid_points"] = F.size();
  s["d_omega"] = dw;
  s["n_max"] = *opts.n_max;
  s["relative_l2_error"] = relative_l2(series.force.values(), F.values());
  s["relative_l2_error_three_term"] = relative_l2(three.force.values(), F.values());
  s["residual"] = series.residual;
  s["residual_three_term"] = three.residual;
  s["truncation_estimate"] = series.truncation_estimate;
  return res;
}

RunResult run_narrowband(const Json& c) {
  const std::string scheme = str(c, "scheme");
  const double nu = num(c, "oscillator.nu");
  const double Om = num(c, "oscillator.Omega");
  const double gamma = num(c, "oscillator.gamma");
  const auto ctx = TransferContext::narrowband(nu, gamma, Om);
  const double dw = narrowband_spacing(c);
  const auto half = narrowband_half(c, dw);
  const Spectrum F = narrowband_force(c, dw, half);
  const auto sig = forward_narrowband(F, ctx);

  const auto per = static_cast<std::size_t>(std::llround(Om / dw));
  const DeltaGrid deltas{-Om + dw, 2 * per};
  ReconstructionReport rep = [&] {
    if (scheme == "narrowband_case1") return reconstruct_narrowband_case1(sig.z_pos, sig.z_tilde_pos, ctx, deltas);
    Case2Options o;
    o.epsilon = num(c, "run.epsilon");
    o.n_terms = case2_terms(c);
    return reconstruct_narrowband_case2(sig.z_pos, sig.z_tilde_pos, ctx, deltas, o);
  }();

  std::vector<cplx> truth(deltas.count);
  for (std::size_t j = 0; j < deltas.count; ++j) truth[j] = F[*F.index_of(rep.force.omega(j))];
  const Spectrum band(rep.force.omega0(), dw, truth, Symmetry::positive_part_only);

  RunResult res;
  res.files["force.csv"] = spectrum_csv(F);
  res.files["signal_z.csv"] = spectrum_csv(sig.z_pos);
  res.files["signal_z_tilde.csv"] = spectrum_csv(sig.z_tilde_pos);
  res.files["force_band.csv"] = spectrum_csv(band);
  res.files["reconstructed.csv"] = spectrum_csv(rep.force);

  Json& s = res.summary;
  s["grid_points"] = F.size();
  s["d_omega"] = dw;
  s["r"] = gamma / Om;
  s["n_terms"] = rep.n_terms_used;
  s["relative_l2_error"] = relative_l2(rep.force.values(), band.values());
  s["truncation_estimate"] = rep.truncation_estimate;
  s["warnings"] = rep.warnings;
  return res;
}

RunResult run_budget(const Json& c) {
  const double k = num(c, "budget.k");
  const double eta = num(c, "budget.eta");
  const double gamma = num(c, "budget.gamma");
  const double n_T = num(c, "budget.n_T");
  const double sig = num(c, "budget.signal_power");
  const bool cancelled = at(c, "budget.cancelled").get<bool>();
  const auto on = s_out(k, eta, gamma, n_T, sig, true);
  const auto off = s_out(k, eta, gamma, n_T, sig, false);
  const auto& chosen = cancelled ? on : off;

  RunResult res;
  std::string csv = "component,value\n";
  csv += "measurement," + format_number(chosen.measurement) + "\n";
  csv += "thermal," + format_number(chosen.thermal) + "\n";
  csv += "signal," + format_number(chosen.signal) + "\n";
  csv += "backaction," + format_number(chosen.backaction) + "\n";
  csv += "backaction_cancelled," + std::string(cancelled ? "1" : "0") + "\n";
  csv += "total," + format_number(chosen.total) + "\n";
  res.files["budget.csv"] = std::move(csv);

  Json& s = res.summary;
  s["cancelled"] = cancelled;
  s["measurement"] = chosen.measurement;
  s["thermal"] = chosen.thermal;
  s["signal"] = chosen.signal;
  s["backaction"] = chosen.backaction;
  s["total"] = chosen.total;
  s["total_cancelled"] = on.total;
  s["total_uncancelled"] = off.total;
  s["k_min"] = backaction_dominance_threshold(gamma, n_T);
  s["coupling_threshold"] = coupling_criterion(gamma, num(c, "budget.kappa"), n_T);
  return res;
}

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, double>>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_number()) {
    out.emplace_back(prefix, j.get<double>());
  } else if (j.is_boolean()) {
    out.emplace_back(prefix, j.get<bool>() ? 1.0 : 0.0);
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

}  // namespace

const std::vector<std::string>& scheme_names() {
  static const std::vector<std::string> names{"tc_pair", "broadband", "narrowband_case1",
                                              "narrowband_case2", "budget"};
  return names;
}

Json default_config() {
  return Json{
      {"schema", kSchemaVersion},
      {"scheme", nullptr},
      {"oscillator", {{"nu", nullptr}, {"gamma", 0.1}, {"n_T", 0.0}, {"Omega", 0.1}}},
      {"measurement",
       {{"k", 0.25}, {"eta", 1.0}, {"rot_freq", 0.0}, {"phase", 0.0}, {"observable", "X_plus"}}},
      {"force",
       {{"kind", nullptr},
        {"amplitude", 1.0},
        {"frequency", 1.0},
        {"phase", 0.0},
        {"support_max", nullptr},
        {"bandwidth", nullptr}}},
      {"grid", {{"points_per_nu", 32}, {"extent", 8.0}, {"points_per_Omega", 16}}},
      {"run",
       {{"dt", 0.005},
        {"n_steps", 2000},
        {"n_trajectories", 200},
        {"stride", 10},
        {"base_seed", 1},
        {"epsilon", 0.01},
        {"n_max", nullptr},
        {"n_terms", nullptr}}},
      {"budget",
       {{"k", 1.0},
        {"eta", 1.0},
        {"gamma", 1.0},
        {"n_T", 0.0},
        {"signal_power", 0.0},
        {"cancelled", true},
        {"kappa", 1.0}}},
      {"output", {{"directory", "qnc_out"}, {"formats", {"csv", "json"}}}}};
}

Json parse_config(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

Json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_override(Json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' must have the form key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  if (!config.is_object()) config = Json::object();
  Json* cur = &config;
  const auto keys = split(path, '.');
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    if (keys[i].empty()) throw ConfigError("override '" + assignment + "' has an empty key");
    Json& next = (*cur)[keys[i]];
    if (next.is_null()) next = Json::object();
    if (!next.is_object()) fail(path, "parent is not an object");
    cur = &next;
  }
  (*cur)[keys.back()] = std::move(value);
}

Json resolve(const Json& user) {
  Json c = default_config();
  merge(c, user, "");
  if (c["schema"] != kSchemaVersion) fail("schema", "unsupported version");
  if (c["scheme"].is_null()) fail("scheme", "missing");
  if (!c["scheme"].is_string()) fail("scheme", "must be a string");
  const auto& names = scheme_names();
  if (std::find(names.begin(), names.end(), c["scheme"].get<std::string>()) == names.end())
    fail("scheme", "must be one of tc_pair, broadband, narrowband_case1, narrowband_case2, budget");
  complete(c);
  check(c);
  return c;
}

RunResult run_scenario(const Json& c, std::size_t threads) {
  const std::string scheme = str(c, "scheme");
  RunResult res;
  if (scheme == "tc_pair") res = run_tc_pair(c, threads);
  else if (scheme == "broadband") res = run_broadband(c);
  else if (scheme == "budget") res = run_budget(c);
  else res = run_narrowband(c);

  Json summary;
  summary["schema"] = kSchemaVersion;
  summary["scheme"] = scheme;
  summary["base_seed"] = at(c, "run.base_seed");
  for (const auto& [k, v] : res.summary.items()) summary[k] = v;
  res.summary = std::move(summary);
  return res;
}

void write_outputs(const std::string& directory, const Json& resolved, const RunResult& result) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw ConfigError("cannot create output directory '" + directory + "': " + ec.message());
  auto put = [&](const std::string& name, const std::string& text) {
    std::ofstream out(fs::path(directory) / name, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + name + "' in '" + directory + "'");
    out << text;
  };
  bool csv = false, json = false;
  for (const auto& f : resolved["output"]["formats"]) {
    csv = csv || f == "csv";
    json = json || f == "json";
  }
  put("resolved_config.json", resolved.dump(2) + "\n");
  if (json) put("summary.json", result.summary.dump(2) + "\n");
  if (csv)
    for (const auto& [name, text] : result.files) put(name, text);
}

std::vector<double> parse_sweep_values(const std::string& text) {
  std::vector<double> out;
  auto to_double = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v))
      throw ConfigError("sweep value '" + s + "' is not a number");
    return v;
  };
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError("sweep range must be start:stop:count");
    const double a = to_double(parts[0]);
    const double b = to_double(parts[1]);
    const double n = to_double(parts[2]);
    if (n < 1.0 || n != std::floor(n)) throw ConfigError("sweep range count must be >= 1");
    const auto cnt = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < cnt; ++i)
      out.push_back(cnt == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(cnt - 1));
  } else if (!text.empty()) {
    for (const auto& s : split(text, ',')) out.push_back(to_double(s));
  }
  if (out.empty()) throw ConfigError("sweep range is empty");
  return out;
}

std::string run_sweep(const Json& user, const SweepSpec& spec, std::size_t threads) {
  if (spec.values.empty()) throw ConfigError("sweep range is empty");
  const Json resolved = resolve(user);
  const Json& slot = at(resolved, spec.parameter);
  if (!slot.is_number()) fail(spec.parameter, "sweep parameter must be a numeric scalar");
  const bool integral = slot.is_number_integer();

  std::string csv = "value,metric,metric_value,status\n";
  for (double v : spec.values) {
    Json point = user;
    std::string status = "ok";
    std::vector<std::pair<std::string, double>> metrics;
    try {
      if (integral) {
        if (v != std::floor(v) || v < 0.0) fail(spec.parameter, "swept value must be a non-negative integer");
        apply_override(point, spec.parameter + "=" + std::to_string(static_cast<long long>(v)));
      } else {
        apply_override(point, spec.parameter + "=" + format_number(v));
      }
      const auto r = run_scenario(resolve(point), threads);
      flatten(r.summary, "", metrics);
    } catch (const Error& e) {
      status = std::string(is_numerical(e) ? "numerical_error: " : "config_error: ") + e.what();
    } catch (const std::exception& e) {
      status = std::string("error: ") + e.what();
    }
    const std::string value = format_number(v);
    if (metrics.empty()) {
      csv += value + ",,," + csv_field(status) + "\n";
      continue;
    }
    for (const auto& [name, x] : metrics)
      csv += value + "," + csv_field(name) + "," + format_number(x) + "," + csv_field(status) + "\n";
  }
  return csv;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}

Spectrum synthetic_broadband_force(double d_omega, std::size_t half, double support,
                                   std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<cplx> v(2 * half + 1, cplx{0.0, 0.0});
  for (std::size_t m = 0; m <= half; ++m) {
    const double w = static_cast<double>(m) * d_omega;
    if (w > support * (1.0 + 1e-12)) break;
    v[half + m] = m == 0 ? cplx{g(rng), 0.0} : cplx{g(rng), g(rng)};
  }
  for (std::size_t m = 1; m <= half; ++m) v[half - m] = std::conj(v[half + m]);
  return Spectrum(-static_cast<double>(half) * d_omega, d_omega, std::move(v), Symmetry::hermitian,
                  support);
}

}  // namespace qnc::cli
