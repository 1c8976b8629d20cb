// hlat: command-line front end for the harmonic-lattice dispersive-dynamics
// library.  Subcommands compute kernel tables, Weyl commutator norms, decay
// verifications, and a build self-test, emitting CSV or JSON.
//
// Exit codes: 0 success, 1 computational failure or failed verification,
// 2 usage error.  Diagnostics go to the error stream only.

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hlat/analysis.hpp"
#include "hlat/dynamics.hpp"
#include "hlat/errors.hpp"
#include "hlat/finitevol.hpp"
#include "hlat/kernels.hpp"
#include "hlat/lattice.hpp"
#include "hlat/model.hpp"
#include "hlat/simd.hpp"
#include "serialize.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;
using namespace hlat;
using cli::csv_row;
using cli::format_complex;
using cli::format_double;
using cli::format_site;
using cli::parse_probe;
using cli::parse_site;

constexpr const char* kVersion = "1.0.0";

// ---------------------------------------------------------------------------
// Error classification: which exit code a library failure maps to, plus the
// failure-mode name used in diagnostics so the cause is recognizable without
// parsing free-form text.

struct FailureInfo {
  int exit_code;
  const char* name;
};

FailureInfo classify(const Error& e) {
  if (dynamic_cast<const NoConvergence*>(&e)) return {1, "NoConvergence"};
  if (dynamic_cast<const BoxTooLarge*>(&e)) return {1, "BoxTooLarge"};
  if (dynamic_cast<const TruncationFailure*>(&e)) return {1, "TruncationFailure"};
  if (dynamic_cast<const NonPositiveValue*>(&e)) return {1, "NonPositiveValue"};
  if (dynamic_cast<const TooFewPoints*>(&e)) return {1, "TooFewPoints"};
  if (dynamic_cast<const InvalidModel*>(&e)) return {2, "InvalidModel"};
  if (dynamic_cast<const DegenerateModel*>(&e)) return {2, "DegenerateModel"};
  if (dynamic_cast<const InvalidKernel*>(&e)) return {2, "InvalidKernel"};
  if (dynamic_cast<const DimensionMismatch*>(&e)) return {2, "DimensionMismatch"};
  if (dynamic_cast<const SizeMismatch*>(&e)) return {2, "SizeMismatch"};
  if (dynamic_cast<const InvalidArgument*>(&e)) return {2, "InvalidArgument"};
  return {1, "Error"};
}

// ---------------------------------------------------------------------------
// Shared option bundles.

struct ModelOpts {
  int d = 1;
  double omega = 1.0;
  std::vector<double> lambdas;
};

struct OutputOpts {
  std::string format = "csv";
  std::string path;
  std::string backend;
  std::string config_path;  // consumed by expand_config; kept for --help
};

void add_model_options(CLI::App* cmd, ModelOpts& m) {
  cmd->add_option("--d", m.d, "Lattice dimension");
  cmd->add_option("--omega", m.omega, "On-site energy (spectral gap)");
  cmd->add_option("--lambda", m.lambdas,
                  "Per-axis coupling; a single value broadcasts to every axis");
}

void add_quadrature_options(CLI::App* cmd, QuadratureSpec& s) {
  cmd->add_option("--tolerance", s.tolerance, "Quadrature refinement tolerance");
  cmd->add_option("--base-points", s.base_points,
                  "Starting quadrature grid points per axis");
  cmd->add_option("--max-doublings", s.max_doublings,
                  "Grid refinement budget");
  cmd->add_option("--truncation-tolerance", s.truncation_tolerance,
                  "Spatial truncation threshold for evolved functions");
}

void add_output_options(CLI::App* cmd, OutputOpts& o) {
  cmd->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--output", o.path,
                  "Write output to this file instead of standard output");
  cmd->add_option("--backend", o.backend, "Numerical backend override")
      ->check(CLI::IsMember({"scalar", "avx2"}));
  cmd->add_option("--config", o.config_path,
                  "Key=value config file supplying option defaults; "
                  "flags override file values")
      ->configurable(false);
}

std::string trim(const std::string& s) {
  const std::size_t first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const std::size_t last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// The argument parser applies a config option only on its top-level command,
// so each subcommand's --config is expanded here before parsing: every
// key=value line becomes the flag --key with the value's whitespace-separated
// tokens, and a key the command line already sets is skipped entirely, which
// is what makes flags override file values for scalar and list options alike.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string found;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) {
        throw InvalidArgument("--config requires a file path");
      }
      found = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
    } else if (args[i].rfind("--config=", 0) == 0) {
      found = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      continue;
    }
    if (!path.empty()) {
      throw InvalidArgument("a config file may be given only once");
    }
    path = found;
    --i;
  }
  if (path.empty()) return args;

  std::ifstream file(path);
  if (!file) throw InvalidArgument("cannot open config file '" + path + "'");
  std::string line;
  while (std::getline(file, line)) {
    const std::string entry = trim(line);
    if (entry.empty() || entry[0] == '#' || entry[0] == ';') continue;
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw InvalidArgument("malformed config line (want key=value): '" + line +
                            "'");
    }
    const std::string key = trim(entry.substr(0, eq));
    std::string value = trim(entry.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    const std::string flag = "--" + key;
    bool overridden = false;
    for (const std::string& arg : args) {
      if (arg == flag || arg.rfind(flag + "=", 0) == 0) {
        overridden = true;
        break;
      }
    }
    if (overridden) continue;
    if (value.find_first_of(" \t") == std::string::npos) {
      args.push_back(flag + "=" + value);
    } else {
      args.push_back(flag);
      std::istringstream tokens(value);
      std::string token;
      while (tokens >> token) args.push_back(token);
    }
  }
  return args;
}

// Resolves the backend before any computation so the whole run uses one
// implementation; returns its name for the config echo.
std::string apply_backend(const OutputOpts& o) {
  if (!o.backend.empty()) {
    simd::force_backend(simd::backend_from_name(o.backend));
  }
  return simd::backend_name(simd::active_backend());
}

ModelParams resolve_model(const ModelOpts& m) {
  std::vector<double> lambdas = m.lambdas;
  if (lambdas.empty()) {
    lambdas.assign(m.d > 0 ? static_cast<std::size_t>(m.d) : 0, 1.0);
  } else if (lambdas.size() == 1 && m.d > 1) {
    lambdas.assign(static_cast<std::size_t>(m.d), lambdas[0]);
  }
  ModelParams params{m.d, m.omega, std::move(lambdas)};
  params.validate();
  return params;
}

std::string lambdas_joined(const ModelParams& p) {
  std::string out;
  for (std::size_t i = 0; i < p.lambdas.size(); ++i) {
    if (i) out += ';';
    out += format_double(p.lambdas[i]);
  }
  return out;
}

std::string probe_literal(const LatticeFunction& f) {
  std::string out;
  bool first = true;
  for (const auto& [site, value] : f.entries()) {
    if (!first) out += ',';
    first = false;
    out += format_site(site) + ":" + format_complex(value);
  }
  return out;
}

ordered_json config_json(const char* command, const ModelParams& params,
                         const QuadratureSpec& spec, const OutputOpts& out,
                         const std::string& backend) {
  ordered_json c;
  c["command"] = command;
  c["model"] = {{"dimension", params.d},
                {"omega", params.omega},
                {"lambdas", params.lambdas}};
  c["quadrature"] = {{"base_points", spec.base_points},
                     {"tolerance", spec.tolerance},
                     {"max_doublings", spec.max_doublings},
                     {"auto_scale", spec.auto_scale},
                     {"truncation_tolerance", spec.truncation_tolerance},
                     {"max_radius_growths", spec.max_radius_growths}};
  c["backend"] = backend;
  c["format"] = out.format;
  return c;
}

// Assembles the complete output (so nothing is printed before the run
// succeeds) and writes it to standard output or the requested file.
void emit(const OutputOpts& o, const std::string& csv, ordered_json config,
          ordered_json results, ordered_json checks) {
  std::string payload;
  if (o.format == "json") {
    ordered_json doc;
    doc["config"] = std::move(config);
    doc["results"] = std::move(results);
    doc["checks"] = std::move(checks);
    doc["version"] = kVersion;
    payload = doc.dump(2) + "\n";
  } else {
    payload = csv;
  }
  if (o.path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream file(o.path, std::ios::binary);
  if (!file) throw InvalidArgument("cannot open output file '" + o.path + "'");
  file << payload;
}

// Lexicographic walk over the closed box [-radius, radius]^d (last axis
// fastest), matching kernel-table storage order.
void for_each_site(int d, int radius,
                   const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> x(static_cast<std::size_t>(d), -radius);
  while (true) {
    fn(x);
    int axis = d - 1;
    for (; axis >= 0; --axis) {
      if (++x[static_cast<std::size_t>(axis)] <= radius) break;
      x[static_cast<std::size_t>(axis)] = -radius;
    }
    if (axis < 0) return;
  }
}

// ---------------------------------------------------------------------------
// kernel: tabulate the three propagator kernels on a box for each time.

struct KernelOpts {
  ModelOpts model;
  QuadratureSpec spec;
  OutputOpts out;
  std::vector<double> times;
  int radius = 0;
};

int run_kernel(const KernelOpts& o) {
  const std::string backend = apply_backend(o.out);
  const ModelParams params = resolve_model(o.model);
  o.spec.validate();

  std::string csv = csv_row({"d", "omega", "lambdas", "m", "t", "x", "value",
                             "resolution", "est_error"});
  ordered_json results = ordered_json::array();
  const std::string d_str = std::to_string(params.d);
  const std::string omega_str = format_double(params.omega);
  const std::string lambdas_str = lambdas_joined(params);
  for (double t : o.times) {
    const KernelTable table = kernel_table(params, t, o.radius, o.spec);
    for (int m : {-1, 0, 1}) {
      for_each_site(params.d, o.radius, [&](const std::vector<int>& x) {
        const double value = table.value(KernelIndex(m), x);
        csv += csv_row({d_str, omega_str, lambdas_str, std::to_string(m),
                        format_double(t), format_site(x), format_double(value),
                        std::to_string(table.resolution),
                        format_double(table.est_error)});
        results.push_back(ordered_json{{"m", m},
                                       {"t", t},
                                       {"x", format_site(x)},
                                       {"value", value},
                                       {"resolution", table.resolution},
                                       {"est_error", table.est_error}});
      });
    }
  }

  ordered_json config = config_json("kernel", params, o.spec, o.out, backend);
  config["times"] = o.times;
  config["radius"] = o.radius;
  emit(o.out, csv, std::move(config), std::move(results),
       ordered_json::array());
  return 0;
}

// ---------------------------------------------------------------------------
// commutator: exact Weyl commutator norm, a-priori bound, and the symplectic
// phase for a probe pair at each time.

struct CommutatorOpts {
  ModelOpts model;
  QuadratureSpec spec;
  OutputOpts out;
  std::vector<double> times;
  std::string f_literal;
  std::string g_literal;
};

int run_commutator(const CommutatorOpts& o) {
  const std::string backend = apply_backend(o.out);
  const ModelParams params = resolve_model(o.model);
  o.spec.validate();
  const LatticeFunction f = parse_probe(o.f_literal, params.d);
  const LatticeFunction g = parse_probe(o.g_literal, params.d);

  std::string csv =
      csv_row({"d", "omega", "lambdas", "t", "norm", "bound", "phase"});
  ordered_json results = ordered_json::array();
  const std::string d_str = std::to_string(params.d);
  const std::string omega_str = format_double(params.omega);
  const std::string lambdas_str = lambdas_joined(params);
  for (double t : o.times) {
    const EvolutionResult evolved =
        evolve_covering(params, f, t, o.spec, g.extent());
    const double phase = symplectic_form(evolved.function, g);
    const double norm = 2.0 * std::abs(std::sin(0.5 * phase));
    const double bound = commutator_bound(params, f, g, t, o.spec);
    csv += csv_row({d_str, omega_str, lambdas_str, format_double(t),
                    format_double(norm), format_double(bound),
                    format_double(phase)});
    results.push_back(ordered_json{
        {"t", t}, {"norm", norm}, {"bound", bound}, {"phase", phase}});
  }

  ordered_json config = config_json("commutator", params, o.spec, o.out, backend);
  config["times"] = o.times;
  config["f"] = probe_literal(f);
  config["g"] = probe_literal(g);
  emit(o.out, csv, std::move(config), std::move(results),
       ordered_json::array());
  return 0;
}

// ---------------------------------------------------------------------------
// verify: decay-statement protocols over the library's analysis drivers.

struct VerifyOpts {
  std::string protocol;
  ModelOpts model;
  QuadratureSpec spec;
  OutputOpts out;
  std::vector<double> times;
  double t_min = 0.0;
  double t_max = 0.0;
  int samples = 25;
  std::string x_literal;
  int x_max = 40;
  bool allow_large_d = false;
  // Which options were given explicitly (protocol defaults fill the rest).
  bool d_given = false;
  bool times_given = false;
  bool t_min_given = false;
  bool t_max_given = false;
  std::string backend;  // resolved name, filled by run_verify
};

std::string verify_result_row(const std::string& key, const double* t,
                              const std::string& x, double value) {
  return csv_row({"result", key, t ? format_double(*t) : std::string(), x,
                  format_double(value), "", ""});
}

ordered_json verify_result_json(const std::string& key, const double* t,
                                const std::string& x, double value) {
  ordered_json row;
  row["key"] = key;
  if (t) {
    row["t"] = *t;
  } else {
    row["t"] = nullptr;
  }
  if (x.empty()) {
    row["x"] = nullptr;
  } else {
    row["x"] = x;
  }
  row["value"] = value;
  return row;
}

std::string verify_check_row(const std::string& name, double value,
                             double threshold, bool pass) {
  return csv_row({"check", name, "", "", format_double(value),
                  format_double(threshold), pass ? "true" : "false"});
}

ordered_json verify_check_json(const std::string& name, double value,
                               double threshold, bool pass) {
  return ordered_json{
      {"name", name}, {"value", value}, {"threshold", threshold}, {"pass", pass}};
}

const char* region_name(Region r) {
  switch (r) {
    case Region::ExponentiallySmall:
      return "exponentially-small";
    case Region::PowerLaw:
      return "power-law";
    case Region::OrderOne:
      return "order-one";
  }
  return "unknown";
}

int run_verify(VerifyOpts o) {
  const std::string backend = apply_backend(o.out);

  // Protocol-specific dimension defaults and constraints.
  if (!o.d_given) {
    o.model.d = (o.protocol == "thm-2.1") ? 2 : 1;
  }
  if (o.model.d > 4 && !o.allow_large_d) {
    throw InvalidArgument("dimension " + std::to_string(o.model.d) +
                          " exceeds the full-scan guard (4); pass "
                          "--allow-large-d to override");
  }
  if (o.protocol == "thm-2.1" && o.model.d < 2) {
    throw InvalidArgument("thm-2.1 covers dimension >= 2; use thm-2.2 for the chain");
  }
  if (o.protocol == "thm-2.2" && o.model.d != 1) {
    throw InvalidArgument("thm-2.2 is the one-dimensional statement");
  }
  if (o.protocol == "thm-2.3" && o.model.d != 1 && o.model.d != 2) {
    throw InvalidArgument(
        "thm-2.3 has pinned exponent bands for dimensions 1 and 2 only");
  }
  if (o.protocol == "figure-1" && o.model.d != 1) {
    throw InvalidArgument("figure-1 is a one-dimensional scan");
  }

  const ModelParams params = resolve_model(o.model);
  o.spec.validate();

  std::string csv =
      csv_row({"row_type", "key", "t", "x", "value", "threshold", "pass"});
  ordered_json results = ordered_json::array();
  ordered_json checks = ordered_json::array();
  ordered_json config = config_json("verify", params, o.spec, o.out, backend);
  config["protocol"] = o.protocol;
  bool all_pass = true;

  auto push_result = [&](const std::string& key, const double* t,
                         const std::string& x, double value) {
    csv += verify_result_row(key, t, x, value);
    results.push_back(verify_result_json(key, t, x, value));
  };
  auto push_check = [&](const std::string& name, double value, double threshold,
                        bool pass) {
    csv += verify_check_row(name, value, threshold, pass);
    checks.push_back(verify_check_json(name, value, threshold, pass));
    all_pass = all_pass && pass;
  };

  if (o.protocol == "thm-2.1" || o.protocol == "thm-2.2") {
    const std::vector<double> times =
        o.times_given ? o.times : std::vector<double>{10.0, 20.0, 40.0, 80.0};
    const UniformDecayReport report =
        verify_uniform_decay(params, times, o.spec);
    for (std::size_t i = 0; i < report.times.size(); ++i) {
      push_result("sup-norm", &report.times[i], "", report.sup_values[i]);
    }
    for (std::size_t i = 0; i < report.times.size(); ++i) {
      push_result("rescaled", &report.times[i], "", report.rescaled[i]);
    }
    push_result("rescale-power", nullptr, "", report.rescale_power);
    push_result("effective-dimension", nullptr, "",
                static_cast<double>(report.effective_dimension));
    push_check("rescaled-slope-bounded", report.slope, report.slope_threshold,
               report.pass);
    config["times"] = times;
  } else if (o.protocol == "thm-2.3") {
    const double band_lo = (params.d == 1) ? -0.6 : -1.15;
    const double band_hi = (params.d == 1) ? -0.4 : -0.85;
    const double t_min = o.t_min_given ? o.t_min : (params.d == 1 ? 20.0 : 10.0);
    const double t_max = o.t_max_given ? o.t_max : (params.d == 1 ? 200.0 : 100.0);
    const std::vector<double> times =
        o.times_given ? o.times : geometric_times(t_min, t_max, o.samples);
    const std::vector<int> x = o.x_literal.empty()
                                   ? std::vector<int>(params.d, 0)
                                   : parse_site(o.x_literal);

    DecayFit kernel_fit;
    const DecayFit fit =
        verify_fixed_x_decay(params, x, times, o.spec, &kernel_fit);

    const std::string x_str = format_site(x);
    for (double t : times) {
      const auto k = kernel_values_at(params, t, x, o.spec);
      push_result("commutator-norm", &t, x_str,
                  2.0 * std::abs(std::sin(0.5 * k[0])));
      push_result("kernel-magnitude", &t, x_str, std::abs(k[1]));
    }
    push_result("exponent", nullptr, "", fit.exponent);
    push_result("amplitude", nullptr, "", fit.amplitude);
    push_result("residual", nullptr, "", fit.residual);
    push_result("kernel-exponent", nullptr, "", kernel_fit.exponent);
    push_check("exponent-min", fit.exponent, band_lo, fit.exponent >= band_lo);
    push_check("exponent-max", fit.exponent, band_hi, fit.exponent <= band_hi);
    config["times"] = times;
    config["x"] = x_str;
  } else {  // figure-1
    const std::vector<double> times =
        o.times_given ? o.times
                      : std::vector<double>{0.0, 1.0, 2.0, 4.0, 8.0, 16.0};
    const ConeScan scan = cone_scan(params, times, o.x_max, o.spec);

    double max_value = 0.0;
    bool in_range = true;
    double zero_time_max = -1.0;  // stays negative when no t = 0 column exists
    for (std::size_t i = 0; i < scan.times.size(); ++i) {
      const bool zero_time = scan.times[i] == 0.0;
      if (zero_time && zero_time_max < 0.0) zero_time_max = 0.0;
      for (int n = 0; n <= scan.x_max; ++n) {
        const double value = scan.values[i][static_cast<std::size_t>(n)];
        push_result(region_name(region_of(value)), &scan.times[i],
                    std::to_string(n), value);
        max_value = std::max(max_value, value);
        in_range = in_range && value >= 0.0 && value <= 2.0;
        if (zero_time) zero_time_max = std::max(zero_time_max, value);
      }
    }
    push_check("values-in-range", max_value, 2.0, in_range);
    if (zero_time_max >= 0.0) {
      push_check("zero-time-column-vanishes", zero_time_max, 0.0,
                 zero_time_max == 0.0);
    }
    config["times"] = times;
    config["x_max"] = o.x_max;
  }

  emit(o.out, csv, std::move(config), std::move(results), std::move(checks));
  return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// selftest: closed-form oracles and structural invariants, one line each.

struct SelftestOpts {
  QuadratureSpec spec;
  OutputOpts out;
};

struct CheckOutcome {
  std::string name;
  bool ok = false;
  std::string detail;
};

int run_selftest(const SelftestOpts& o) {
  const std::string backend = apply_backend(o.out);
  o.spec.validate();
  const QuadratureSpec& spec = o.spec;
  const ModelParams chain{1, 1.0, {1.0}};

  std::vector<CheckOutcome> outcomes;
  auto run = [&](const char* name,
                 const std::function<std::pair<bool, std::string>()>& fn) {
    CheckOutcome c;
    c.name = name;
    try {
      auto [ok, detail] = fn();
      c.ok = ok;
      c.detail = detail;
    } catch (const Error& e) {
      c.ok = false;
      c.detail = std::string(classify(e).name) + ": " + e.what();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = e.what();
    }
    for (char& ch : c.detail) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    outcomes.push_back(std::move(c));
  };

  run("gaussian-zero-time", [&]() -> std::pair<bool, std::string> {
    const double pi = std::numbers::pi;
    double err = 0.0;
    err = std::max(err, std::abs(gaussian_quadratic_selftest(1, {1}, 0.0) -
                                 std::sqrt(pi)));
    err = std::max(err,
                   std::abs(gaussian_quadratic_selftest(2, {1, -1}, 0.0) - pi));
    err = std::max(err, std::abs(gaussian_quadratic_selftest(3, {-1, -1, 1}, 0.0) -
                                 pi * std::sqrt(pi)));
    return {err <= 1e-12, "max|err|=" + format_double(err) + " tol=1e-12"};
  });

  run("gaussian-magnitude", [&]() -> std::pair<bool, std::string> {
    const double pi = std::numbers::pi;
    double err = 0.0;
    bool enveloped = true;
    for (int d = 1; d <= 3; ++d) {
      const std::vector<int> signature(static_cast<std::size_t>(d), 1);
      for (double t : {1.0, 5.0, 25.0}) {
        const double measured = gaussian_quadratic_selftest(d, signature, t);
        const double closed = std::pow(pi / std::sqrt(1.0 + t * t), 0.5 * d);
        err = std::max(err, std::abs(measured - closed));
        enveloped = enveloped && measured <= std::pow(pi / t, 0.5 * d) + 1e-12;
      }
    }
    return {err <= 1e-10 && enveloped,
            "max|err|=" + format_double(err) + " tol=1e-10 envelope=" +
                (enveloped ? "ok" : "violated")};
  });

  run("bessel-oracle", [&]() -> std::pair<bool, std::string> {
    const ModelParams gapless{1, 0.0, {1.0}};
    double err = 0.0;
    for (double t : {1.0, 5.0}) {
      for (int x = 0; x <= 5; ++x) {
        const double measured =
            kernel_value(gapless, KernelIndex(0), t, {x}, spec);
        err = std::max(err, std::abs(measured - bessel_oracle_1d(1.0, t, x)));
      }
    }
    return {err <= 1e-8, "max|err|=" + format_double(err) + " tol=1e-8"};
  });

  run("zero-time-identity", [&]() -> std::pair<bool, std::string> {
    double err = 0.0;
    for (const ModelParams& params :
         {chain, ModelParams{2, 1.0, {1.0, 1.0}}}) {
      const KernelTable table = kernel_table(params, 0.0, 3, spec);
      for_each_site(params.d, 3, [&](const std::vector<int>& x) {
        const bool origin =
            std::all_of(x.begin(), x.end(), [](int c) { return c == 0; });
        for (int m : {-1, 0, 1}) {
          const double expect = (origin && m == 0) ? 1.0 : 0.0;
          err = std::max(err,
                         std::abs(table.value(KernelIndex(m), x) - expect));
        }
      });
    }
    return {err <= 1e-10, "max|err|=" + format_double(err) + " tol=1e-10"};
  });

  run("frozen-kernel-value", [&]() -> std::pair<bool, std::string> {
    const double measured = kernel_value(chain, KernelIndex(0), 1.0, {0}, spec);
    const double err = std::abs(measured - (-0.64402877178578555));
    return {err <= 1e-8, "|err|=" + format_double(err) + " tol=1e-8"};
  });

  run("symplectic-invariance", [&]() -> std::pair<bool, std::string> {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> site(-3, 3);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    double err = 0.0;
    for (int trial = 0; trial < 2; ++trial) {
      LatticeFunction f(1), g(1);
      for (int entry = 0; entry < 3; ++entry) {
        f.set({site(rng)}, {amp(rng), amp(rng)});
        g.set({site(rng)}, {amp(rng), amp(rng)});
      }
      const double before = symplectic_form(f, g);
      const EvolutionResult tf = evolve(chain, f, 2.0, spec);
      const EvolutionResult tg = evolve(chain, g, 2.0, spec);
      const double after = symplectic_form(tf.function, tg.function);
      err = std::max(err, std::abs(after - before));
    }
    return {err <= 1e-6, "max|err|=" + format_double(err) + " tol=1e-6"};
  });

  run("group-law", [&]() -> std::pair<bool, std::string> {
    const LatticeFunction origin = LatticeFunction::delta(1, {0});
    const EvolutionResult half = evolve(chain, origin, 1.5, spec);
    const EvolutionResult twice = evolve(chain, half.function, 1.5, spec);
    const EvolutionResult whole = evolve(chain, origin, 3.0, spec);
    const double err = max_difference(twice.function, whole.function);
    return {err <= 1e-6, "max|err|=" + format_double(err) + " tol=1e-6"};
  });

  run("finite-volume-zero-time", [&]() -> std::pair<bool, std::string> {
    const double err = compare_finite_infinite(
        chain, 8, LatticeFunction::delta(1, {0}), 0.0, spec);
    return {err == 0.0, "|err|=" + format_double(err) + " (exact)"};
  });

  run("weighted-norm", [&]() -> std::pair<bool, std::string> {
    bool exact = true;
    for (int d = 1; d <= 3; ++d) {
      std::vector<int> e1(static_cast<std::size_t>(d), 0);
      exact = exact &&
              weighted_l1_norm(LatticeFunction::delta(d, e1), WeightSpec(d)) ==
                  1.0;
      e1[0] = 1;
      exact = exact &&
              weighted_l1_norm(LatticeFunction::delta(d, e1), WeightSpec(d)) ==
                  static_cast<double>(1 << (d + 3));
    }
    return {exact, exact ? "delta weights exact" : "delta weights deviate"};
  });

  run("backend", [&]() -> std::pair<bool, std::string> {
    return {true, backend};
  });

  std::string csv = csv_row({"name", "status", "detail"});
  ordered_json checks = ordered_json::array();
  bool all_ok = true;
  for (const CheckOutcome& c : outcomes) {
    csv += csv_row({c.name, c.ok ? "ok" : "fail", c.detail});
    checks.push_back(
        ordered_json{{"name", c.name}, {"pass", c.ok}, {"detail", c.detail}});
    all_ok = all_ok && c.ok;
  }

  ordered_json config;
  config["command"] = "selftest";
  config["quadrature"] = {{"base_points", spec.base_points},
                          {"tolerance", spec.tolerance},
                          {"max_doublings", spec.max_doublings},
                          {"auto_scale", spec.auto_scale},
                          {"truncation_tolerance", spec.truncation_tolerance},
                          {"max_radius_growths", spec.max_radius_growths}};
  config["backend"] = backend;
  config["format"] = o.out.format;
  emit(o.out, csv, std::move(config), ordered_json::array(), std::move(checks));
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Harmonic-lattice dispersive dynamics toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  KernelOpts kernel_opts;
  CLI::App* kernel_cmd = app.add_subcommand(
      "kernel", "Tabulate the propagator kernels on a box");
  add_model_options(kernel_cmd, kernel_opts.model);
  add_quadrature_options(kernel_cmd, kernel_opts.spec);
  kernel_cmd->add_option("--t", kernel_opts.times, "Evaluation times")
      ->required();
  kernel_cmd->add_option("--radius", kernel_opts.radius, "Box radius")
      ->required();
  add_output_options(kernel_cmd, kernel_opts.out);

  CommutatorOpts comm_opts;
  CLI::App* comm_cmd = app.add_subcommand(
      "commutator", "Weyl commutator norm, bound, and phase for a probe pair");
  add_model_options(comm_cmd, comm_opts.model);
  add_quadrature_options(comm_cmd, comm_opts.spec);
  comm_cmd
      ->add_option("--f", comm_opts.f_literal,
                   "First probe as site:value terms, e.g. 0:1 or 0:0.5-1.25i,2:1")
      ->required();
  comm_cmd->add_option("--g", comm_opts.g_literal, "Second probe")->required();
  comm_cmd->add_option("--t", comm_opts.times, "Evaluation times")->required();
  add_output_options(comm_cmd, comm_opts.out);

  VerifyOpts verify_opts;
  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "Run a decay-verification protocol");
  verify_cmd
      ->add_option("protocol", verify_opts.protocol,
                   "One of thm-2.1, thm-2.2, thm-2.3, figure-1")
      ->required()
      ->check(CLI::IsMember({"thm-2.1", "thm-2.2", "thm-2.3", "figure-1"}));
  CLI::Option* verify_d = verify_cmd->add_option(
      "--d", verify_opts.model.d, "Lattice dimension (protocol default)");
  verify_cmd->add_option("--omega", verify_opts.model.omega,
                         "On-site energy (spectral gap)");
  verify_cmd->add_option("--lambda", verify_opts.model.lambdas,
                         "Per-axis coupling; a single value broadcasts");
  add_quadrature_options(verify_cmd, verify_opts.spec);
  CLI::Option* verify_t = verify_cmd->add_option(
      "--t", verify_opts.times, "Explicit time samples (protocol default)");
  CLI::Option* verify_tmin = verify_cmd->add_option(
      "--t-min", verify_opts.t_min, "First fit time (thm-2.3)");
  CLI::Option* verify_tmax = verify_cmd->add_option(
      "--t-max", verify_opts.t_max, "Last fit time (thm-2.3)");
  verify_cmd->add_option("--samples", verify_opts.samples,
                         "Geometric sample count (thm-2.3)");
  verify_cmd->add_option("--x", verify_opts.x_literal,
                         "Fixed site for thm-2.3, e.g. 3;-2 (default origin)");
  verify_cmd->add_option("--x-max", verify_opts.x_max,
                         "Largest probe distance for figure-1");
  verify_cmd->add_flag("--allow-large-d", verify_opts.allow_large_d,
                       "Lift the d <= 4 full-scan guard");
  add_output_options(verify_cmd, verify_opts.out);

  SelftestOpts self_opts;
  CLI::App* self_cmd = app.add_subcommand(
      "selftest", "Closed-form oracles and structural invariants");
  self_cmd->add_option("--tolerance", self_opts.spec.tolerance,
                       "Quadrature refinement tolerance");
  add_output_options(self_cmd, self_opts.out);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());  // the parser consumes back-first
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    const FailureInfo info = classify(e);
    std::cerr << info.name << ": " << e.what() << "\n";
    return info.exit_code;
  }

  try {
    if (kernel_cmd->parsed()) return run_kernel(kernel_opts);
    if (comm_cmd->parsed()) return run_commutator(comm_opts);
    if (verify_cmd->parsed()) {
      verify_opts.d_given = verify_d->count() > 0;
      verify_opts.times_given = verify_t->count() > 0;
      verify_opts.t_min_given = verify_tmin->count() > 0;
      verify_opts.t_max_given = verify_tmax->count() > 0;
      return run_verify(verify_opts);
    }
    if (self_cmd->parsed()) return run_selftest(self_opts);
  } catch (const Error& e) {
    const FailureInfo info = classify(e);
    std::cerr << info.name << ": " << e.what() << "\n";
    return info.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
