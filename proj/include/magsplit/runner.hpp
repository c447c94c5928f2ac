#pragma once
// Experiment runner: turns a flat key=value configuration (built-in preset
// defaults, overridden by an optional config file, overridden by command-line
// flags, in that order) into a fully validated simulation plan, executes it,
// and writes the result artifacts:
//   mass.csv         step, time, mass, deviation      (every run)
//   convergence.csv  tau, error (+ fitted order row)  (order sweeps)
//   plot.gp          gnuplot script for the sweep     (order sweeps)
//   timing.csv       stage, seconds                   (every run)
//   report.json      flat key/value summary           (every run)
// All numeric artifact content is deterministic for a given configuration;
// timing.csv is the one exception.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "magsplit/advection.hpp"
#include "magsplit/diagnostics.hpp"
#include "magsplit/gauge.hpp"
#include "magsplit/presets.hpp"
#include "magsplit/splitting.hpp"

namespace magsplit {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using ConfigMap = std::map<std::string, std::string>;

inline const std::set<std::string>& valid_config_keys() {
  static const std::set<std::string> keys = {
      "preset",     "potential", "initial", "N",           "steps",
      "T",          "epsilon",   "scheme",  "backend",     "p",
      "m",          "precompute", "order_sweep", "out",    "mem_budget",
      "seed",       "gauge",     "substeps"};
  return keys;
}

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::string known_keys_message() {
  std::string msg = "valid keys:";
  for (const auto& k : valid_config_keys()) msg += " " + k;
  return msg;
}

inline void check_key(const std::string& key) {
  if (!valid_config_keys().count(key))
    throw ConfigError("unknown key '" + key + "'; " + known_keys_message());
}

inline long parse_long(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long out = 0;
  try {
    out = std::stol(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  if (pos != v.size())
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  if (pos != v.size() || !std::isfinite(out))
    throw ConfigError(key + ": expected a finite number, got '" + v + "'");
  return out;
}

inline std::vector<long> parse_long_list(const std::string& key, const std::string& v) {
  std::vector<long> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_long(key, trim(item)));
  if (out.empty()) throw ConfigError(key + ": expected a comma-separated list");
  return out;
}

}  // namespace detail

// Parse "key = value" lines; '#' starts a comment, blank lines are skipped,
// a repeated key keeps the last assignment.
inline ConfigMap parse_config_text(const std::string& text) {
  ConfigMap out;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value', got '" + t + "'");
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string val = detail::trim(t.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value', got '" + t + "'");
    detail::check_key(key);
    out[key] = val;
  }
  return out;
}

inline ConfigMap parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

// Later maps win: merge(preset-implied, file, flags).
inline ConfigMap merge_config(const ConfigMap& lower, const ConfigMap& upper) {
  ConfigMap out = lower;
  for (const auto& [k, v] : upper) out[k] = v;
  return out;
}

struct RunPlan {
  ExperimentPreset preset;  // resolved family bundle
  Grid grid;
  SimulationProblem problem;  // ready to propagate (gauged or corrected)
  bool gaugeCoulomb = true;
  std::shared_ptr<const GaugeField> gauge;  // set when a nontrivial gauge applies
  std::vector<int> orderSweep;
  int referenceSteps = 512;
  std::string outDir = "out";
  unsigned long seed = 0;
  ConfigMap echo;  // the effective settings, for the report
};

namespace detail {

// Bundles available to preset=custom: the named potential/initial families.
inline ExperimentPreset custom_family(const std::string& potential,
                                      const std::string& initial) {
  ExperimentPreset base;
  if (potential == "free") {
    base = preset_ex1d();
    base.potentials.V = [](double, const Point&) { return 0.0; };
    base.potentials.A = [](double, const Point&) { return Point{}; };
    base.analyticLambda = nullptr;
  } else {
    base = preset_by_name(potential);
  }
  if (initial == "gaussian") {
    const Domain dom = base.domain;
    base.initial = [dom](const Point& x) {
      double r2 = 0.0;
      for (int i = 0; i < dom.dim; ++i) {
        const double c = dom.center(i);
        r2 += (x[i] - c) * (x[i] - c);
      }
      return std::complex<double>(std::exp(-10.0 * r2), 0.0);
    };
  } else {
    const ExperimentPreset init = preset_by_name(initial);
    if (init.domain.dim != base.domain.dim)
      throw ConfigError("custom: initial family '" + initial + "' is " +
                        std::to_string(init.domain.dim) + "d but potential family '" +
                        potential + "' is " + std::to_string(base.domain.dim) + "d");
    base.initial = init.initial;
  }
  base.name = "custom";
  return base;
}

inline int parse_even_order(const std::string& v) {
  const long p = parse_long("p", v);
  if (p < 2 || p > 16 || p % 2 != 0)
    throw ConfigError("p: interpolation order must be even and in [2, 16], got '" + v +
                      "'");
  return static_cast<int>(p);
}

}  // namespace detail

inline RunPlan make_run_plan(const ConfigMap& merged) {
  for (const auto& [k, v] : merged) detail::check_key(k);

  const auto get = [&](const std::string& key) -> std::optional<std::string> {
    const auto it = merged.find(key);
    if (it == merged.end()) return std::nullopt;
    return it->second;
  };

  const auto presetName = get("preset");
  if (!presetName)
    throw ConfigError(
        "no preset selected: pass one of ex1d, ex2d, ex3d or custom (or set "
        "'preset =' in the config file)");

  RunPlan plan;
  if (*presetName == "custom") {
    const std::vector<std::string> required = {"potential", "initial", "N",
                                               "T",         "steps",   "epsilon"};
    std::string missing;
    for (const auto& k : required)
      if (!merged.count(k)) missing += (missing.empty() ? "" : ", ") + k;
    if (!missing.empty())
      throw ConfigError("custom preset requires keys: " + missing +
                        " (potential/initial name one of the built-in families: "
                        "potential in {free, ex1d, ex2d, ex3d}, initial in "
                        "{gaussian, ex1d, ex2d, ex3d})");
    plan.preset = detail::custom_family(*get("potential"), *get("initial"));
  } else {
    try {
      plan.preset = preset_by_name(*presetName);
    } catch (const ContractError& e) {
      throw ConfigError(e.what());
    }
    if (get("potential") || get("initial"))
      throw ConfigError("potential/initial families apply only to preset=custom");
  }

  const int dim = plan.preset.domain.dim;

  // grid size: a single value applies to every axis, a list must match dim
  MultiIndex N = plan.preset.defaultN;
  if (const auto nv = get("N")) {
    const auto list = detail::parse_long_list("N", *nv);
    if (list.size() != 1 && static_cast<int>(list.size()) != dim)
      throw ConfigError("N: expected 1 or " + std::to_string(dim) + " values");
    for (int i = 0; i < dim; ++i) {
      const long n = list.size() == 1 ? list[0] : list[static_cast<std::size_t>(i)];
      if (n < 2 || n % 2 != 0 || n > (1 << 22))
        throw ConfigError("N: grid sizes must be even, >= 2 and sane, got " +
                          std::to_string(n));
      N[i] = static_cast<int>(n);
    }
  }
  plan.grid = make_grid(plan.preset.domain, N);

  SimulationProblem& prob = plan.problem;
  prob.grid = plan.grid;
  prob.epsilon = plan.preset.epsilon;
  prob.T = plan.preset.T;
  prob.steps = plan.preset.defaultSteps;
  prob.initial = plan.preset.initial;

  if (const auto v = get("epsilon")) {
    prob.epsilon = detail::parse_double("epsilon", *v);
    if (prob.epsilon <= 0.0) throw ConfigError("epsilon: must be positive");
  }
  if (const auto v = get("T")) {
    prob.T = detail::parse_double("T", *v);
    if (prob.T < 0.0) throw ConfigError("T: must be >= 0");
  }
  if (const auto v = get("steps")) {
    const long s = detail::parse_long("steps", *v);
    if (s < 1 || s > 100000000L) throw ConfigError("steps: must be a positive integer");
    prob.steps = static_cast<int>(s);
  }

  prob.scheme = SplittingScheme::STRANG;
  if (const auto v = get("scheme")) {
    if (*v == "lie")
      prob.scheme = SplittingScheme::LIE;
    else if (*v == "strang")
      prob.scheme = SplittingScheme::STRANG;
    else
      throw ConfigError("scheme: expected lie or strang, got '" + *v + "'");
  }

  std::string backend = "nfft";
  if (const auto v = get("backend")) {
    if (*v != "dfs" && *v != "interp" && *v != "nfft")
      throw ConfigError("backend: expected dfs, interp or nfft, got '" + *v + "'");
    backend = *v;
  }
  prob.advection.backend = backend == "dfs"    ? AdvectionBackend::DIRECT
                           : backend == "interp" ? AdvectionBackend::LOCAL_INTERP
                                                 : AdvectionBackend::NFFT;
  if (const auto v = get("p")) {
    if (backend != "interp")
      throw ConfigError("p applies only to the interp backend (backend is '" + backend +
                        "')");
    prob.advection.interpOrder = detail::parse_even_order(*v);
  }
  if (const auto v = get("m")) {
    if (backend != "nfft")
      throw ConfigError("m applies only to the nfft backend (backend is '" + backend +
                        "')");
    const long m = detail::parse_long("m", *v);
    if (m < 1 || m > 64) throw ConfigError("m: window cutoff must be in [1, 64]");
    prob.advection.nfftCutoff = static_cast<int>(m);
  }
  if (const auto v = get("precompute")) {
    if (backend != "nfft")
      throw ConfigError("precompute applies only to the nfft backend (backend is '" +
                        backend + "')");
    if (*v == "onfly")
      prob.advection.nfftMode = NfftPrecompute::ON_THE_FLY;
    else if (*v == "psi")
      prob.advection.nfftMode = NfftPrecompute::PRE_PSI;
    else if (*v == "fullpsi")
      prob.advection.nfftMode = NfftPrecompute::PRE_FULL_PSI;
    else
      throw ConfigError("precompute: expected onfly, psi or fullpsi, got '" + *v + "'");
  }
  if (const auto v = get("mem_budget")) {
    const long b = detail::parse_long("mem_budget", *v);
    if (b < 1) throw ConfigError("mem_budget: must be positive (bytes)");
    prob.advection.nfftMemBudget = static_cast<std::size_t>(b);
  }
  if (const auto v = get("substeps")) {
    const long s = detail::parse_long("substeps", *v);
    if (s < 1 || s > 100000) throw ConfigError("substeps: must be a positive integer");
    prob.advection.substeps = static_cast<int>(s);
  }
  if (const auto v = get("seed")) plan.seed = static_cast<unsigned long>(
      detail::parse_long("seed", *v));
  if (const auto v = get("out")) plan.outDir = *v;

  if (const auto v = get("order_sweep")) {
    const auto list = detail::parse_long_list("order_sweep", *v);
    if (list.size() < 3)
      throw ConfigError("order_sweep: need at least 3 step counts to fit an order");
    for (const long s : list) {
      if (s < 1) throw ConfigError("order_sweep: step counts must be positive");
      if (s >= plan.referenceSteps)
        throw ConfigError("order_sweep: step counts must stay below the " +
                          std::to_string(plan.referenceSteps) + "-step reference");
      plan.orderSweep.push_back(static_cast<int>(s));
    }
  }

  // Gauge handling: coulomb (default) propagates the transformed problem;
  // none keeps the original fields and corrects the potential flow with the
  // real factor exp(tau (div A)/2).
  std::string gaugeMode = "coulomb";
  if (const auto v = get("gauge")) {
    if (*v != "coulomb" && *v != "none")
      throw ConfigError("gauge: expected coulomb or none, got '" + *v + "'");
    gaugeMode = *v;
  }
  plan.gaugeCoulomb = gaugeMode == "coulomb";
  if (plan.gaugeCoulomb) {
    GaugeField gf = coulomb_gauge(plan.grid, plan.preset.potentials.A, prob.epsilon);
    if (!gf.trivial()) plan.gauge = std::make_shared<const GaugeField>(std::move(gf));
    prob.potentials = plan.gauge
                          ? transform_potentials(plan.preset.potentials, *plan.gauge)
                          : plan.preset.potentials;
    prob.potentialConfig.divergenceFree = true;
  } else {
    prob.potentials = plan.preset.potentials;
    prob.potentialConfig.divergenceFree = false;
    // half-divergence grid samples from the spectral derivative of the sampled A
    std::array<std::vector<double>, kMaxDim> comps;
    for (int axis = 0; axis < dim; ++axis) {
      comps[axis].resize(plan.grid.size());
      for_each_index(plan.grid, [&](std::size_t flat, const MultiIndex& j) {
        comps[axis][flat] = plan.preset.potentials.A(0.0, grid_point(plan.grid, j))[axis];
      });
    }
    auto div = spectral_divergence(plan.grid, comps);
    for (double& d : div) d *= 0.5;
    prob.potentialConfig.halfDivA = std::move(div);
  }

  // echo the effective settings
  plan.echo["preset"] = plan.preset.name;
  {
    std::string nstr;
    for (int i = 0; i < dim; ++i) nstr += (i ? "," : "") + std::to_string(N[i]);
    plan.echo["N"] = nstr;
  }
  plan.echo["steps"] = std::to_string(prob.steps);
  plan.echo["scheme"] = prob.scheme == SplittingScheme::LIE ? "lie" : "strang";
  plan.echo["backend"] = backend;
  if (backend == "interp") plan.echo["p"] = std::to_string(prob.advection.interpOrder);
  if (backend == "nfft") {
    plan.echo["m"] = std::to_string(prob.advection.nfftCutoff);
    plan.echo["precompute"] =
        prob.advection.nfftMode == NfftPrecompute::ON_THE_FLY    ? "onfly"
        : prob.advection.nfftMode == NfftPrecompute::PRE_PSI     ? "psi"
                                                                 : "fullpsi";
  }
  plan.echo["gauge"] = gaugeMode;
  plan.echo["seed"] = std::to_string(plan.seed);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", prob.T);
  plan.echo["T"] = buf;
  std::snprintf(buf, sizeof buf, "%.12g", prob.epsilon);
  plan.echo["epsilon"] = buf;
  return plan;
}

struct RunResult {
  ExperimentReport report;  // main run
  WaveField finalState;     // main run, gauged variables when gauge=coulomb
  std::optional<double> fittedOrder;
  std::map<double, double> sweepErrors;  // tau -> global error vs reference
  double gaugeLambdaMaxErr = -1.0;       // >= 0 when checked against a closed form
  double gaugedDivergence = -1.0;        // >= 0 when a gauge was applied
  double elapsedSeconds = 0.0;
};

namespace detail {

inline std::string format_sci(double v, int digits = 12) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits, v);
  return buf;
}

inline void write_text_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::trunc);
  if (!out) throw ConfigError("cannot write artifact '" + p.string() + "'");
  out << text;
  if (!out) throw ConfigError("write failed for artifact '" + p.string() + "'");
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace detail

inline RunResult run_experiment(const RunPlan& plan, std::ostream* log = nullptr) {
  const StageTimer total;
  RunResult res;
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(plan.outDir, ec);
  if (ec)
    throw ConfigError("output directory '" + plan.outDir +
                      "' is not writable: " + ec.message());

  // gauge diagnostics
  if (plan.gaugeCoulomb) {
    std::array<std::vector<double>, kMaxDim> comps;
    for (int axis = 0; axis < plan.grid.dim(); ++axis) {
      comps[axis].resize(plan.grid.size());
      for_each_index(plan.grid, [&](std::size_t flat, const MultiIndex& j) {
        comps[axis][flat] =
            plan.problem.potentials.A(0.0, grid_point(plan.grid, j))[axis];
      });
    }
    const auto div = spectral_divergence(plan.grid, comps);
    double maxDiv = 0.0;
    for (const double d : div) maxDiv = std::max(maxDiv, std::abs(d));
    res.gaugedDivergence = maxDiv;
    if (plan.gauge && plan.preset.analyticLambda) {
      double maxErr = 0.0;
      for_each_index(plan.grid, [&](std::size_t flat, const MultiIndex& j) {
        maxErr = std::max(maxErr, std::abs(plan.gauge->lambda[flat] -
                                           plan.preset.analyticLambda(
                                               grid_point(plan.grid, j))));
      });
      res.gaugeLambdaMaxErr = maxErr;
      if (log)
        *log << "[gauge] max|lambda - closed form| = " << detail::format_sci(maxErr, 6)
             << "\n";
    }
    if (log)
      *log << "[gauge] max|div A~| = " << detail::format_sci(res.gaugedDivergence, 6)
           << "\n";
  }

  // initial state in the propagated variables
  WaveField u0 = sample_field(plan.grid, [&](const Point& x) {
    return plan.problem.initial(x);
  });
  if (plan.gauge) u0 = transform_wavefunction(u0, *plan.gauge, true);

  // main run
  auto main = propagate(plan.problem, u0);
  res.report = std::move(main.report);
  res.finalState = std::move(main.u);
  res.report.config = plan.echo;

  // order sweep against a fine Strang reference
  if (!plan.orderSweep.empty()) {
    SimulationProblem refProb = plan.problem;
    refProb.scheme = SplittingScheme::STRANG;
    refProb.steps = plan.referenceSteps;
    const auto ref = propagate(refProb, u0);
    for (const int n : plan.orderSweep) {
      SimulationProblem p = plan.problem;
      p.steps = n;
      const auto r = propagate(p, u0);
      res.sweepErrors[p.T / n] = l2_error(r.u, ref.u);
    }
    std::vector<double> taus, errs;
    for (const auto& [tau, err] : res.sweepErrors) {
      taus.push_back(tau);
      errs.push_back(err);
    }
    res.fittedOrder = fit_order(taus, errs);
    res.report.errors = res.sweepErrors;
    res.report.fittedOrder = res.fittedOrder;
    if (log) *log << "[sweep] fitted order = " << *res.fittedOrder << "\n";
  }

  res.elapsedSeconds = total.elapsed();
  res.report.timings.add("total", res.elapsedSeconds);

  // ---- artifacts ----
  const fs::path dir(plan.outDir);
  {
    std::string csv = "step,time,mass,deviation\n";
    const double m0 = res.report.massSeries.at(0);
    const double tau = plan.problem.T / plan.problem.steps;
    for (std::size_t i = 0; i < res.report.massSeries.size(); ++i) {
      const double m = res.report.massSeries[i];
      csv += std::to_string(i) + "," + detail::format_sci(static_cast<double>(i) * tau) +
             "," + detail::format_sci(m) + "," +
             detail::format_sci(m0 > 0.0 ? std::abs(m - m0) / m0 : std::abs(m - m0)) +
             "\n";
    }
    detail::write_text_file(dir / "mass.csv", csv);
  }
  if (!plan.orderSweep.empty()) {
    std::string csv = "tau,error\n";
    for (const auto& [tau, err] : res.sweepErrors)
      csv += detail::format_sci(tau) + "," + detail::format_sci(err) + "\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", *res.fittedOrder);
    csv += "fitted_order," + std::string(buf) + "\n";
    detail::write_text_file(dir / "convergence.csv", csv);
    detail::write_text_file(
        dir / "plot.gp",
        "set logscale xy\nset xlabel 'tau'\nset ylabel 'error'\nset datafile "
        "separator ','\nplot 'convergence.csv' every ::1::" +
            std::to_string(res.sweepErrors.size()) +
            " using 1:2 with linespoints title 'measured'\n");
  }
  {
    std::string csv = "stage,seconds\n";
    for (const auto& [stage, sec] : res.report.timings.seconds)
      csv += stage + "," + detail::format_sci(sec, 6) + "\n";
    detail::write_text_file(dir / "timing.csv", csv);
  }
  {
    std::string json = "{\n";
    for (const auto& [k, v] : plan.echo)
      json += "  \"" + detail::json_escape(k) + "\": \"" + detail::json_escape(v) +
              "\",\n";
    json += "  \"initial_mass\": " + detail::format_sci(res.report.massSeries.front()) +
            ",\n";
    json += "  \"final_mass\": " + detail::format_sci(res.report.massSeries.back()) +
            ",\n";
    json += "  \"max_mass_deviation\": " +
            detail::format_sci(res.report.maxMassDeviation) + ",\n";
    if (res.fittedOrder)
      json += "  \"fitted_order\": " + detail::format_sci(*res.fittedOrder, 6) + ",\n";
    if (res.gaugeLambdaMaxErr >= 0.0)
      json += "  \"gauge_lambda_max_err\": " +
              detail::format_sci(res.gaugeLambdaMaxErr, 6) + ",\n";
    if (res.gaugedDivergence >= 0.0)
      json += "  \"gauged_divergence\": " + detail::format_sci(res.gaugedDivergence, 6) +
              ",\n";
    json += "  \"elapsed_seconds\": " + detail::format_sci(res.elapsedSeconds, 6) + "\n";
    json += "}\n";
    detail::write_text_file(dir / "report.json", json);
  }
  return res;
}

}  // namespace magsplit
