#include "lcs/experiment.hpp"

#include "lcs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>

namespace lcs {

using nlohmann::json;

namespace {

const std::set<std::string> kKeys = {"system", "sigma_params", "method", "discretization",
                                     "h", "steps", "initial", "tol", "max_iter",
                                     "output_path", "chart", "core_margin"};

const json& require(const json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError(key, "required field missing");
  return j.at(key);
}

double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
  return x;
}

int get_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  return v.get<int>();
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

Vec get_vector(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a non-empty array of numbers");
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = get_number(v[i], path + "[" + std::to_string(i) + "]");
  return out;
}

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("$", "expected a JSON object");
  for (const auto& [key, _] : j.items())
    if (!kKeys.count(key)) throw ConfigError(key, "unknown field");

  ExperimentConfig c;
  c.system = get_string(require(j, "system"), "system");
  const auto systems = builtin_systems();
  if (std::find(systems.begin(), systems.end(), c.system) == systems.end())
    throw ConfigError("system", "unknown system '" + c.system + "'");
  if (j.contains("sigma_params")) {
    const json& s = j.at("sigma_params");
    if (!s.is_array()) throw ConfigError("sigma_params", "expected an array of numbers");
    for (std::size_t i = 0; i < s.size(); ++i)
      c.sigma_params.push_back(get_number(s[i], "sigma_params[" + std::to_string(i) + "]"));
  }
  c.method = get_string(require(j, "method"), "method");
  Method method;
  try {
    method = parse_method(c.method);
  } catch (const InvalidArgument& e) {
    throw ConfigError("method", e.what());
  }
  if (j.contains("discretization")) c.discretization = get_string(j.at("discretization"), "discretization");
  try {
    parse_rule(c.discretization);
  } catch (const InvalidArgument& e) {
    throw ConfigError("discretization", e.what());
  }
  c.h = get_number(require(j, "h"), "h");
  if (!(c.h > 0.0)) throw ConfigError("h", "must be positive");
  c.steps = get_int(require(j, "steps"), "steps");
  if (c.steps < (is_lagrangian(method) ? 2 : 1))
    throw ConfigError("steps", is_lagrangian(method) ? "must be >= 2" : "must be >= 1");
  if (j.contains("tol")) c.tol = get_number(j.at("tol"), "tol");
  if (!(c.tol >= 1e-14)) throw ConfigError("tol", "must be >= 1e-14");
  if (j.contains("max_iter")) c.max_iter = get_int(j.at("max_iter"), "max_iter");
  if (c.max_iter < 1) throw ConfigError("max_iter", "must be >= 1");
  if (j.contains("output_path")) c.output_path = get_string(j.at("output_path"), "output_path");
  if (j.contains("chart")) c.chart = get_int(j.at("chart"), "chart");
  if (j.contains("core_margin")) c.core_margin = get_number(j.at("core_margin"), "core_margin");
  if (!(c.core_margin >= 0.0 && c.core_margin < 0.5))
    throw ConfigError("core_margin", "must lie in [0, 0.5)");

  const json& init = require(j, "initial");
  if (!init.is_object()) throw ConfigError("initial", "expected an object");
  const bool pair = init.contains("q0") || init.contains("q1");
  const bool phase = init.contains("q") || init.contains("p");
  if (pair == phase) throw ConfigError("initial", "give either {q0, q1} or {q, p}");
  for (const auto& [key, _] : init.items())
    if (pair ? (key != "q0" && key != "q1") : (key != "q" && key != "p"))
      throw ConfigError("initial." + key, "unexpected field");
  if (pair) {
    if (!is_lagrangian(method))
      throw ConfigError("initial", "method " + c.method + " needs (q, p) initial data");
    c.initial.kind = InitialData::Kind::Pair;
    c.initial.a = get_vector(require(init, "q0"), "initial.q0");
    c.initial.b = get_vector(require(init, "q1"), "initial.q1");
  } else {
    c.initial.kind = InitialData::Kind::Phase;
    c.initial.a = get_vector(require(init, "q"), "initial.q");
    c.initial.b = get_vector(require(init, "p"), "initial.p");
  }

  SystemModel model;
  try {
    model = make_system(c.system, c.sigma_params);
  } catch (const InvalidArgument& e) {
    throw ConfigError("sigma_params", e.what());
  }
  const std::string a_name = pair ? "initial.q0" : "initial.q";
  const std::string b_name = pair ? "initial.q1" : "initial.p";
  if (c.initial.a.size() != model.n)
    throw ConfigError(a_name, "expected length " + std::to_string(model.n));
  if (c.initial.b.size() != model.n)
    throw ConfigError(b_name, "expected length " + std::to_string(model.n));
  const ChartId chart = c.chart.value_or(model.default_chart);
  if (!model.atlas.has_chart(chart)) throw ConfigError("chart", "unknown chart id");
  if (!model.atlas.in_domain(chart, c.initial.a))
    throw ConfigError(a_name, "outside the domain of chart " + std::to_string(chart));
  if (pair && !model.atlas.in_domain(chart, c.initial.b))
    throw ConfigError(b_name, "outside the domain of chart " + std::to_string(chart));
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["system"] = c.system;
  j["sigma_params"] = c.sigma_params;
  j["method"] = c.method;
  j["discretization"] = c.discretization;
  j["h"] = c.h;
  j["steps"] = c.steps;
  if (c.initial.kind == InitialData::Kind::Pair)
    j["initial"] = {{"q0", vec_json(c.initial.a)}, {"q1", vec_json(c.initial.b)}};
  else
    j["initial"] = {{"q", vec_json(c.initial.a)}, {"p", vec_json(c.initial.b)}};
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  j["output_path"] = c.output_path;
  if (c.chart) j["chart"] = *c.chart;
  j["core_margin"] = c.core_margin;
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("$", "cannot read config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

SystemModel model_for(const ExperimentConfig& cfg) {
  return make_system(cfg.system, cfg.sigma_params);
}

RunSpec spec_for(const ExperimentConfig& cfg, const SystemModel& model) {
  RunSpec s;
  s.method = parse_method(cfg.method);
  s.rule = parse_rule(cfg.discretization);
  s.h = cfg.h;
  s.steps = cfg.steps;
  s.initial = cfg.initial;
  s.cfg.tol = cfg.tol;
  s.cfg.max_iter = cfg.max_iter;
  s.chart = cfg.chart.value_or(model.default_chart);
  s.core_margin = cfg.core_margin;
  return s;
}

namespace {

json row_json(const OutputRow& row) {
  json j;
  j["k"] = row.k;
  j["t"] = row.t;
  j["chart"] = row.chart;
  j["q"] = vec_json(row.q);
  j["p"] = row.p ? vec_json(*row.p) : json(nullptr);
  j["r"] = row.r ? vec_json(*row.r) : json(nullptr);
  j["sigma"] = row.sigma + 0.0;
  j["energy"] = row.energy ? json(*row.energy) : json(nullptr);
  return j;
}

}  // namespace

json summary_json(const ExperimentConfig& cfg, const RunOutput& run) {
  json j;
  j["config"] = to_json(cfg);
  j["status"] = run.ok() ? "ok" : "failed";
  if (!run.ok()) {
    j["error"] = *run.error;
    j["failed_index"] = run.failed_index;
  }
  j["points"] = run.rows.size();
  long total = 0;
  int max_it = 0;
  double max_res = 0.0;
  int switches = 0;
  for (const auto& d : run.diagnostics) {
    total += d.iterations;
    max_it = std::max(max_it, d.iterations);
    max_res = std::max(max_res, d.residual);
    switches += d.chart_switch;
  }
  const double steps = static_cast<double>(std::max<std::size_t>(1, run.diagnostics.size()));
  j["newton"] = {{"total_iterations", total},
                 {"max_iterations", max_it},
                 {"mean_iterations", static_cast<double>(total) / steps},
                 {"max_residual", max_res}};
  j["chart_switches"] = switches;
  j["final"] = run.rows.empty() ? json(nullptr) : row_json(run.rows.back());
  return j;
}

json to_json(const ConvergenceResult& res) {
  json rows = json::array();
  for (const auto& r : res.rows) rows.push_back({{"h", r.h}, {"steps", r.steps}, {"error", r.error}});
  return {{"rows", rows}, {"slope", res.slope}, {"h_ref", res.h_ref}, {"t_final", res.t_final}};
}

json to_json(const CheckResult& c) {
  json d = json::object();
  for (const auto& [k, v] : c.details) d[k] = v;
  json j = {{"name", c.name},         {"passed", c.passed},   {"measured", c.measured},
            {"tolerance", c.tolerance}, {"seconds", c.seconds}, {"details", d}};
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

json to_json(const VerifyReport& rep) {
  json checks = json::array();
  for (const auto& c : rep.checks) checks.push_back(to_json(c));
  return {{"system", rep.system}, {"seed", rep.seed}, {"passed", rep.passed()},
          {"checks", checks}};
}

std::string summary_path(const std::string& output_path) {
  std::filesystem::path p(output_path);
  p.replace_extension();
  return p.string() + ".summary.json";
}

int cmd_integrate(const ExperimentConfig& cfg, std::ostream& log) {
  if (cfg.output_path.empty()) throw ConfigError("output_path", "required for integrate");
  const SystemModel model = model_for(cfg);
  const RunOutput run = run_method(model, spec_for(cfg, model));
  {
    std::ofstream csv(cfg.output_path);
    if (!csv) throw ConfigError("output_path", "cannot write '" + cfg.output_path + "'");
    write_csv(csv, run);
  }
  std::ofstream(summary_path(cfg.output_path)) << summary_json(cfg, run).dump(2) << '\n';
  if (!run.ok()) {
    log << "integration failed: " << *run.error << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_convergence(const ExperimentConfig& cfg, const std::vector<double>& hs,
                    std::ostream& out, std::ostream& log) {
  const SystemModel model = model_for(cfg);
  const RunSpec base = spec_for(cfg, model);
  if (base.initial.kind != InitialData::Kind::Phase)
    throw ConfigError("initial", "convergence needs (q, p) initial data");
  if (hs.size() < 3) throw ConfigError("--h", "at least three step sizes required");
  for (double h : hs)
    if (!(h > 0.0)) throw ConfigError("--h", "step sizes must be positive");
  ConvergenceResult res;
  try {
    res = convergence_study(model, base, hs, cfg.h * cfg.steps);
  } catch (const NumericalError& e) {
    log << "convergence failed: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DomainError& e) {
    log << "convergence failed: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const InvalidArgument& e) {
    throw ConfigError("--h", e.what());
  }
  json j = to_json(res);
  j["method"] = cfg.method;
  j["system"] = cfg.system;
  out << j.dump(2) << '\n';
  if (!cfg.output_path.empty()) std::ofstream(summary_path(cfg.output_path)) << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_verify(const std::string& system, std::uint64_t seed, std::ostream& out,
               std::ostream& log) {
  const auto systems = builtin_systems();
  if (std::find(systems.begin(), systems.end(), system) == systems.end())
    throw ConfigError("--system", "unknown system '" + system + "'");
  const VerifyReport rep = run_verify(system, seed);
  out << to_json(rep).dump(2) << '\n';
  if (!rep.passed()) {
    for (const auto& c : rep.checks)
      if (!c.passed) log << "FAILED " << c.name << ": measured " << c.measured << '\n';
    return kExitVerification;
  }
  return kExitOk;
}

}  // namespace lcs
