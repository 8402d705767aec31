#include "adabkb/experiment.hpp"

#include "adabkb/external.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace adabkb {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void config_error(const std::string& what) {
  throw std::invalid_argument("config: " + what);
}

bool uses_cartesian_grid(Algorithm a) {
  return a == Algorithm::GpUcb || a == Algorithm::Bkb;
}

bool is_adaptive(Algorithm a) {
  return a == Algorithm::AdaBkb || a == Algorithm::AdaGpExact;
}

PosteriorMode posterior_mode(Algorithm a) {
  return (a == Algorithm::AdaGpExact || a == Algorithm::GpUcb) ? PosteriorMode::Exact
                                                               : PosteriorMode::Sketched;
}

}  // namespace

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::AdaBkb: return "adabkb";
    case Algorithm::AdaGpExact: return "adagp-exact";
    case Algorithm::GpUcb: return "gpucb";
    case Algorithm::Bkb: return "bkb";
    case Algorithm::RandomBkb: return "random-bkb";
  }
  return "?";
}

Algorithm algorithm_from_string(std::string_view name) {
  if (name == "adabkb") return Algorithm::AdaBkb;
  if (name == "adagp-exact") return Algorithm::AdaGpExact;
  if (name == "gpucb") return Algorithm::GpUcb;
  if (name == "bkb") return Algorithm::Bkb;
  if (name == "random-bkb") return Algorithm::RandomBkb;
  config_error("unknown algorithm '" + std::string(name) +
               "' (expected adabkb, adagp-exact, gpucb, bkb, or random-bkb)");
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

double as_number(const json& v, const std::string& key) {
  if (!v.is_number()) config_error("key '" + key + "' must be a number");
  return v.get<double>();
}

std::uint64_t as_uint(const json& v, const std::string& key) {
  if (!v.is_number_unsigned()) {
    config_error("key '" + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

int as_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) config_error("key '" + key + "' must be an integer");
  return v.get<int>();
}

bool as_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) config_error("key '" + key + "' must be a boolean");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) config_error("key '" + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

RunConfig parse_config_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) config_error("document must be a flat JSON object");

  RunConfig c;
  for (const auto& [key, value] : doc.items()) {
    if (key == "algorithm") {
      c.algorithm = algorithm_from_string(as_string(value, key));
    } else if (key == "objective") {
      c.objective = as_string(value, key);
    } else if (key == "external_cmd") {
      c.external_cmd = as_string(value, key);
    } else if (key == "external_domain") {
      if (!value.is_array()) config_error("'external_domain' must be an array of [lo, hi] pairs");
      for (const auto& side : value) {
        if (!side.is_array() || side.size() != 2) {
          config_error("'external_domain' entries must be [lo, hi] pairs");
        }
        c.external_domain.emplace_back(as_number(side[0], key), as_number(side[1], key));
      }
    } else if (key == "known_optimum") {
      c.known_optimum = as_number(value, key);
    } else if (key == "assume_zero_optimum") {
      c.assume_zero_optimum = as_bool(value, key);
    } else if (key == "budget") {
      c.budget = as_uint(value, key);
    } else if (key == "reps") {
      c.repetitions = as_uint(value, key);
    } else if (key == "seed") {
      c.seed = as_uint(value, key);
    } else if (key == "lengthscale") {
      if (value.is_array()) {
        for (const auto& l : value) c.lengthscales.push_back(as_number(l, key));
      } else {
        c.lengthscales = {as_number(value, key)};
      }
    } else if (key == "lambda") {
      c.lambda = as_number(value, key);
    } else if (key == "noise_sigma") {
      c.noise_sigma = as_number(value, key);
    } else if (key == "F") {
      c.F = as_number(value, key);
    } else if (key == "delta") {
      c.delta = as_number(value, key);
    } else if (key == "epsilon") {
      c.epsilon = as_number(value, key);
    } else if (key == "N") {
      c.N = as_int(value, key);
    } else if (key == "h_max") {
      c.h_max = as_int(value, key);
    } else if (key == "qbar") {
      if (value.is_string()) {
        if (value.get<std::string>() != "auto") {
          config_error("'qbar' must be a number or \"auto\"");
        }
      } else {
        c.qbar = as_number(value, key);
      }
    } else if (key == "grid_points_per_dim") {
      c.grid_points_per_dim = as_int(value, key);
    } else if (key == "grid_size") {
      c.random_grid_size = as_uint(value, key);
    } else if (key == "time_threshold_secs") {
      c.time_threshold_secs = as_number(value, key);
    } else if (key == "external_timeout_secs") {
      c.external_timeout_secs = as_number(value, key);
    } else if (key == "continue_after_stop") {
      c.continue_after_stop = as_bool(value, key);
    } else if (key == "out") {
      c.out = as_string(value, key);
    } else {
      config_error("unknown key '" + key + "'");
    }
  }
  return c;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_json(buffer.str());
}

// ---------------------------------------------------------------------------
// Resolution

OptimizerConfig ResolvedExperiment::optimizer_config() const {
  OptimizerConfig oc;
  oc.N = config.N;
  oc.h_max = config.h_max;
  oc.budget = config.budget;
  oc.continue_after_stop = config.continue_after_stop;
  oc.mode = posterior_mode(config.algorithm);
  oc.lambda = config.lambda;
  oc.confidence = confidence();
  oc.qbar = qbar_rule();
  return oc;
}

ConfidenceParams ResolvedExperiment::confidence() const {
  ConfidenceParams cp;
  cp.delta = config.delta;
  cp.epsilon = config.epsilon;
  cp.F = config.F;
  cp.validate();
  return cp;
}

QbarRule ResolvedExperiment::qbar_rule() const {
  return config.qbar ? QbarRule::constant(*config.qbar) : QbarRule{};
}

ResolvedExperiment resolve(const RunConfig& config) {
  ResolvedExperiment exp;
  RunConfig c = config;

  const bool has_registry = !c.objective.empty();
  const bool has_external = !c.external_cmd.empty();
  if (has_registry == has_external) {
    config_error("exactly one of 'objective' and 'external_cmd' must be set");
  }

  if (has_registry) {
    const Objective* obj = find_objective(c.objective);
    if (obj == nullptr) {
      std::string names;
      for (const Objective& o : objective_registry()) {
        if (!names.empty()) names += ", ";
        names += o.name;
      }
      config_error("unknown objective '" + c.objective + "'; registered: " + names);
    }
    if (c.known_optimum || c.assume_zero_optimum) {
      config_error("optimum overrides apply to external objectives only");
    }
    if (!c.external_domain.empty()) {
      config_error("'external_domain' applies to external objectives only");
    }
    exp.registry_objective = obj;
    exp.objective_label = obj->name;
    exp.domain = obj->domain;
    exp.known_optimum = obj->known_optimum;
    const auto defs = registry_defaults(obj->name);
    if (!defs) config_error("objective '" + obj->name + "' has no registered defaults");
    if (c.lengthscales.empty()) c.lengthscales = {defs->lengthscale};
    if (c.N == 0) c.N = defs->N;
    if (c.h_max == 0) c.h_max = defs->h_max;
    if (c.noise_sigma < 0) c.noise_sigma = 0.01;
  } else {
    if (c.external_domain.empty()) {
      config_error("external objectives need a domain ([lo, hi] per dimension)");
    }
    const auto p = static_cast<Eigen::Index>(c.external_domain.size());
    Vector lo(p);
    Vector hi(p);
    for (Eigen::Index d = 0; d < p; ++d) {
      lo[d] = c.external_domain[static_cast<std::size_t>(d)].first;
      hi[d] = c.external_domain[static_cast<std::size_t>(d)].second;
    }
    exp.domain = Domain::box(lo, hi);
    exp.objective_label = "external";
    if (c.lengthscales.empty()) {
      config_error("external objectives need an explicit lengthscale");
    }
    if (c.known_optimum && c.assume_zero_optimum) {
      config_error("'known_optimum' and 'assume_zero_optimum' are mutually exclusive");
    }
    if (c.known_optimum) {
      exp.known_optimum = c.known_optimum;
    } else if (c.assume_zero_optimum) {
      exp.known_optimum = 0.0;
      exp.optimum_assumed_zero = true;
    }
    if (c.N == 0) c.N = 3;
    if (c.noise_sigma < 0) c.noise_sigma = 0.0;
    if (c.h_max == 0 && is_adaptive(c.algorithm)) {
      // Depth-cap fallback h_max = ceil(p log T / (2 alpha log N)), alpha = 1
      // for the shipped kernel family.
      const double t_log = std::log(std::max<double>(2.0, static_cast<double>(c.budget)));
      const double raw = static_cast<double>(exp.domain.dim()) * t_log /
                         (2.0 * std::log(static_cast<double>(c.N)));
      c.h_max = std::max(1, static_cast<int>(std::ceil(raw)));
      exp.warnings.push_back("h_max not set; using ceil(p log T / (2 log N)) = " +
                             std::to_string(c.h_max));
    }
    if (!(c.external_timeout_secs > 0)) {
      config_error("'external_timeout_secs' must be positive");
    }
  }

  // Kernel: one lengthscale is isotropic, p lengthscales are per-dimension.
  for (double l : c.lengthscales) {
    if (!(l > 0) || !std::isfinite(l)) config_error("lengthscales must be positive and finite");
  }
  if (c.lengthscales.size() == 1) {
    exp.kernel = Kernel::gaussian(c.lengthscales[0]);
  } else if (c.lengthscales.size() == static_cast<std::size_t>(exp.domain.dim())) {
    exp.kernel = Kernel::gaussian_ard(c.lengthscales);
  } else {
    config_error("lengthscale count must be 1 or match the domain dimension");
  }

  if (c.budget < 1) config_error("'budget' must be at least 1");
  if (c.repetitions < 1) config_error("'reps' must be at least 1");
  if (!(c.lambda > 0) || !std::isfinite(c.lambda)) config_error("'lambda' must be positive");
  if (c.noise_sigma < 0 || !std::isfinite(c.noise_sigma)) {
    config_error("'noise_sigma' must be non-negative");
  }
  if (c.N < 2) config_error("'N' must be at least 2");
  if (is_adaptive(c.algorithm) && c.h_max < 1) config_error("'h_max' must be at least 1");
  if (c.qbar && !(*c.qbar > 0)) config_error("'qbar' must be positive");
  if (c.time_threshold_secs < 0) config_error("'time_threshold_secs' must be non-negative");

  if (uses_cartesian_grid(c.algorithm)) {
    if (c.grid_points_per_dim == 0) {
      c.grid_points_per_dim = default_grid_points_per_dim(exp.domain.dim());
    }
    if (c.grid_points_per_dim < 2) {
      config_error("'grid_points_per_dim' must be at least 2");
    }
    // Fail size violations here so validate-config catches them.
    std::size_t total = 1;
    for (int d = 0; d < exp.domain.dim(); ++d) {
      if (total > kGridSizeCap / static_cast<std::size_t>(c.grid_points_per_dim)) {
        config_error("cartesian grid of " + std::to_string(c.grid_points_per_dim) + "^" +
                     std::to_string(exp.domain.dim()) + " points exceeds the cap of " +
                     std::to_string(kGridSizeCap));
      }
      total *= static_cast<std::size_t>(c.grid_points_per_dim);
    }
  }
  if (c.algorithm == Algorithm::RandomBkb) {
    if (c.random_grid_size == 0) c.random_grid_size = c.budget;
    if (c.random_grid_size > kGridSizeCap) {
      config_error("'grid_size' exceeds the cap of " + std::to_string(kGridSizeCap));
    }
  }

  exp.noise = c.noise_sigma == 0 ? NoiseModel::none() : NoiseModel::gaussian(c.noise_sigma);
  exp.config = std::move(c);
  exp.confidence();  // validates delta / epsilon / F
  return exp;
}

// ---------------------------------------------------------------------------
// Execution

RunTrace run_single(const ResolvedExperiment& exp, std::uint64_t seed) {
  const RunConfig& c = exp.config;

  RunTrace trace;
  trace.algorithm = std::string(to_string(c.algorithm));
  trace.objective = exp.objective_label;
  trace.seed = seed;
  trace.optimum_assumed_zero = exp.optimum_assumed_zero;
  trace.best_y = std::numeric_limits<double>::infinity();

  std::mt19937_64 noise_rng(seed);
  std::mt19937_64 resample_rng(seed ^ kResampleStreamSalt);

  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  try {
    std::shared_ptr<ExternalObjective> child;
    std::function<double(const Vector&)> f_min;
    if (exp.registry_objective != nullptr) {
      f_min = exp.registry_objective->fn;
    } else {
      child = std::make_shared<ExternalObjective>(c.external_cmd, c.external_timeout_secs);
      f_min = [child](const Vector& x) { return child->evaluate(x); };
    }

    // The optimizer maximizes; benchmark values are minimization-form.
    double last_f = 0.0;
    const auto evaluate_max = [&](const Vector& x) {
      last_f = f_min(x);
      return -(last_f + exp.noise.sample(noise_rng));
    };

    double cum_regret = 0.0;
    const auto push_record = [&](int t, const Vector& point, double value_max,
                                 std::size_t frontier, std::size_t inducing, double d_eff) {
      TraceRecord r;
      r.t = t;
      r.point = point;
      r.y = -value_max;
      r.f = last_f;
      if (exp.known_optimum) {
        r.regret = last_f - *exp.known_optimum;
        cum_regret += *r.regret;
        r.cum_regret = cum_regret;
      }
      r.wall_clock_s = elapsed();
      r.frontier = frontier;
      r.inducing = inducing;
      r.d_eff = d_eff;
      if (!trace.best_f || last_f < *trace.best_f) trace.best_f = last_f;
      trace.best_y = std::min(trace.best_y, r.y);
      trace.records.push_back(std::move(r));
    };

    if (is_adaptive(c.algorithm)) {
      AdaBkbOptimizer opt(exp.domain, exp.kernel, exp.optimizer_config());
      trace.max_frontier = opt.leaves().size();
      while (!opt.terminated()) {
        if (elapsed() >= c.time_threshold_secs) {
          trace.truncated = true;
          break;
        }
        const StepOutcome outcome = opt.step(evaluate_max, resample_rng);
        trace.max_frontier = std::max(trace.max_frontier, opt.leaves().size());
        if (outcome.kind == StepKind::Evaluated) {
          push_record(static_cast<int>(opt.t()), outcome.point, *outcome.value,
                      opt.leaves().size(), opt.model().inducing_size(),
                      opt.model().effective_dimension());
        }
      }
      if (trace.truncated) {
        trace.termination = RunTermination::TimeThreshold;
      } else {
        trace.termination = opt.termination() == Termination::EarlyStop
                                ? RunTermination::EarlyStop
                                : RunTermination::Budget;
      }
      trace.stop_tau = opt.stop_condition_tau();
      if (opt.stop_condition_t()) trace.stop_t = static_cast<int>(*opt.stop_condition_t());
    } else {
      Grid grid = c.algorithm == Algorithm::RandomBkb
                      ? build_random_grid(exp.domain, c.random_grid_size,
                                          seed ^ kGridStreamSalt)
                      : build_cartesian_grid(exp.domain, c.grid_points_per_dim);
      GridUcbOptimizer opt(std::move(grid), exp.kernel, posterior_mode(c.algorithm),
                           c.lambda, exp.confidence(), exp.qbar_rule());
      trace.max_frontier = opt.grid().points.size();
      for (std::size_t t = 1; t <= c.budget; ++t) {
        if (elapsed() >= c.time_threshold_secs) {
          trace.truncated = true;
          trace.termination = RunTermination::TimeThreshold;
          break;
        }
        const GridStep step = opt.step(evaluate_max, resample_rng);
        push_record(static_cast<int>(opt.t()), step.point, step.value,
                    opt.grid().points.size(), opt.model().inducing_size(),
                    opt.model().effective_dimension());
      }
    }
  } catch (const std::exception& e) {
    trace.error = e.what();
  }

  trace.total_wall_clock_s = elapsed();
  return trace;
}

ExperimentResult run_experiment(const ResolvedExperiment& exp) {
  ExperimentResult result;
  result.setup = exp;
  result.traces.reserve(exp.config.repetitions);
  for (std::size_t i = 0; i < exp.config.repetitions; ++i) {
    result.traces.push_back(run_single(exp, exp.config.seed + i));
  }
  std::vector<RunTrace> ok;
  for (const RunTrace& t : result.traces) {
    if (!t.error) ok.push_back(t);
  }
  result.aggregate = aggregate_traces(ok);
  return result;
}

// ---------------------------------------------------------------------------
// Output files

ordered_json describe(const ResolvedExperiment& exp) {
  const RunConfig& c = exp.config;
  ordered_json doc;
  doc["algorithm"] = std::string(to_string(c.algorithm));
  doc["objective"] = exp.objective_label;
  if (!c.external_cmd.empty()) {
    doc["external_cmd"] = c.external_cmd;
    doc["external_timeout_secs"] = c.external_timeout_secs;
  }
  {
    ordered_json box = ordered_json::array();
    for (int d = 0; d < exp.domain.dim(); ++d) {
      box.push_back(ordered_json::array({exp.domain.lo[d], exp.domain.hi[d]}));
    }
    doc["domain"] = std::move(box);
  }
  doc["budget"] = c.budget;
  doc["repetitions"] = c.repetitions;
  doc["seed"] = c.seed;
  doc["lengthscales"] = c.lengthscales;
  doc["lambda"] = c.lambda;
  doc["noise_sigma"] = c.noise_sigma;
  doc["F"] = c.F;
  doc["delta"] = c.delta;
  doc["epsilon"] = c.epsilon;
  doc["N"] = c.N;
  if (is_adaptive(c.algorithm)) doc["h_max"] = c.h_max;
  if (c.qbar) {
    doc["qbar"] = *c.qbar;
  } else {
    doc["qbar"] = "auto";
  }
  if (uses_cartesian_grid(c.algorithm)) doc["grid_points_per_dim"] = c.grid_points_per_dim;
  if (c.algorithm == Algorithm::RandomBkb) doc["grid_size"] = c.random_grid_size;
  doc["time_threshold_secs"] = c.time_threshold_secs;
  if (is_adaptive(c.algorithm)) doc["continue_after_stop"] = c.continue_after_stop;
  if (exp.known_optimum) {
    doc["known_optimum"] = *exp.known_optimum;
  } else {
    doc["known_optimum"] = nullptr;
  }
  doc["optimum_assumed_zero"] = exp.optimum_assumed_zero;
  doc["out"] = c.out;
  doc["warnings"] = exp.warnings;
  return doc;
}

namespace {

ordered_json summary_json(const ExperimentResult& result) {
  ordered_json doc = describe(result.setup);
  ordered_json reps = ordered_json::array();
  for (const RunTrace& t : result.traces) {
    ordered_json r;
    r["seed"] = t.seed;
    r["evaluations"] = t.records.size();
    r["termination"] = std::string(to_string(t.termination));
    r["truncated"] = t.truncated;
    if (t.error) {
      r["error"] = *t.error;
    } else {
      r["error"] = nullptr;
    }
    if (t.best_f) {
      r["best_f"] = *t.best_f;
    } else {
      r["best_f"] = nullptr;
    }
    r["best_y"] = t.records.empty() ? ordered_json(nullptr) : ordered_json(t.best_y);
    r["total_wall_clock_s"] = t.total_wall_clock_s;
    r["max_frontier"] = t.max_frontier;
    if (t.stop_t) {
      r["stop_t"] = *t.stop_t;
    } else {
      r["stop_t"] = nullptr;
    }
    if (t.stop_tau) {
      r["stop_tau"] = *t.stop_tau;
    } else {
      r["stop_tau"] = nullptr;
    }
    reps.push_back(std::move(r));
  }
  doc["reps"] = std::move(reps);
  return doc;
}

}  // namespace

std::vector<std::filesystem::path> write_experiment_outputs(
    const ExperimentResult& result, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (std::size_t i = 0; i < result.traces.size(); ++i) {
    std::filesystem::path p = out_dir / ("trace_rep" + std::to_string(i) + ".jsonl");
    write_trace_jsonl(result.traces[i], p);
    written.push_back(std::move(p));
  }
  {
    std::filesystem::path p = out_dir / "summary.csv";
    write_summary_csv(result.aggregate, p);
    written.push_back(std::move(p));
  }
  {
    std::filesystem::path p = out_dir / "summary.json";
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot open '" + p.string() + "' for writing");
    out << summary_json(result).dump(2) << '\n';
    written.push_back(std::move(p));
  }
  return written;
}

}  // namespace adabkb
