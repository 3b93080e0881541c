#pragma once

#include "simkit.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace mellin_qfe {

inline constexpr const char* version = "1.0.0";

//! One (signal, error) pair of a run.
struct SettingConfig
{
  std::string name = "setting";
  DensitySpec signal = DensitySpec::beta21();
  DensitySpec error = DensitySpec::pareto1();

  friend bool operator==(const SettingConfig&, const SettingConfig&) = default;
};

//! Everything a CLI invocation needs. Serialized as JSON:
//!
//!   {
//!     "settings": [{"name": "os-os", "signal": "beta21", "error": "pareto1"}],
//!     "c": 0.5, "weight": "unit", "n": [100, 500], "replications": 50,
//!     "grid": {"from": 0.1, "to": 2.0, "step": 0.1}, "kappa": 1e-5,
//!     "seed": 20240601, "mode": "both", "penalty_mode": "full",
//!     "stopping": true,
//!     "quadrature": {"scheme": "gauss-legendre", "nodes_per_unit": 64, "min_nodes": 64},
//!     "outputs": ["csv", "json"], "jobs": 1, "verbosity": 0
//!   }
//!
//! Densities are "beta21", "pareto1", "uniform01", "none", "lognormal" or
//! {"law": "lognormal", "mu": M, "sigma": S}. Weights are "unit", "survival"
//! or {"type": "derivative", "beta": B}. The grid may also be an explicit
//! array. Optional "sigma_fg" and "sigma_hat_sq" fix the moment term of the
//! penalty-table command.
struct RunConfig
{
  std::vector<SettingConfig> settings{ SettingConfig{} };
  double c = default_c;
  WeightSpec weight;
  std::vector<long> n{ 100, 500 };
  std::size_t replications = 50;
  KGrid grid = KGrid::range(0.1, 2.0, 0.1);
  double kappa = default_kappa;
  std::uint64_t seed = 20240601;
  ExperimentMode mode = ExperimentMode::Both;
  PenaltyMode penalty_mode = PenaltyMode::Full;
  bool stopping = true;
  QuadratureRule quadrature;
  std::vector<std::string> outputs{ "csv", "json" };
  unsigned jobs = 1;
  int verbosity = 0;
  std::optional<double> sigma_fg;
  std::optional<double> sigma_hat_sq;
  std::string out_dir;

  bool wants(const std::string& format) const
  {
    for (const auto& o : outputs)
      if (o == format)
        return true;
    return false;
  }

  ExperimentSpec experiment(std::size_t i) const
  {
    ExperimentSpec e;
    e.name = settings.at(i).name;
    e.signal = settings[i].signal;
    e.error = settings[i].error;
    e.c = c;
    e.weight = weight;
    e.n_list = n;
    e.replications = replications;
    e.grid = grid;
    e.kappa = kappa;
    e.seed = seed;
    e.mode = mode;
    e.penalty_mode = penalty_mode;
    e.stopping = stopping;
    e.rule = quadrature;
    return e;
  }

  //! Keeps only the setting called `name`.
  void select_setting(const std::string& name)
  {
    for (const auto& s : settings)
      if (s.name == name) {
        settings = { s };
        return;
      }
    throw argument_error("config: no setting named '" + name + "'");
  }

  //! Throws argument_error on any inconsistency, including a c outside the
  //! Mellin strip of a configured law.
  void validate() const
  {
    if (settings.empty())
      throw argument_error("config: at least one setting is required");
    std::set<std::string> names;
    for (const auto& s : settings)
      if (!names.insert(s.name).second)
        throw argument_error("config: duplicate setting name '" + s.name + "'");
    for (const auto& o : outputs)
      if (o != "csv" && o != "json")
        throw argument_error("config: unknown output format '" + o + "'");
    if (jobs < 1)
      throw argument_error("config: jobs must be >= 1");
    try {
      quadrature.validate();
      for (std::size_t i = 0; i < settings.size(); ++i)
        experiment(i).validate();
    } catch (const domain_error& e) {
      throw argument_error(std::string("config: ") + e.what());
    } catch (const argument_error& e) {
      throw argument_error(std::string("config: ") + e.what());
    }
  }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

using json = nlohmann::json;

inline DensitySpec density_from_json(const json& j)
{
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "beta21")
      return DensitySpec::beta21();
    if (s == "pareto1")
      return DensitySpec::pareto1();
    if (s == "uniform01")
      return DensitySpec::uniform01();
    if (s == "none")
      return DensitySpec::no_error();
    if (s == "lognormal")
      return DensitySpec::lognormal();
    throw argument_error("config: unknown law '" + s + "'");
  }
  if (j.is_object()) {
    for (const auto& [key, _] : j.items())
      if (key != "law" && key != "mu" && key != "sigma")
        throw argument_error("config: unknown density field '" + key + "'");
    const auto law = j.at("law").get<std::string>();
    if (law != "lognormal")
      return density_from_json(json(law));
    return DensitySpec::lognormal(j.value("mu", 0.0), j.value("sigma", 1.0));
  }
  throw argument_error("config: a density must be a string or an object");
}

inline json density_to_json(const DensitySpec& d)
{
  if (d.law == DensitySpec::Law::LogNormal)
    return { { "law", "lognormal" }, { "mu", d.mu }, { "sigma", d.sigma } };
  return d.name();
}

inline WeightSpec weight_from_json(const json& j)
{
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "unit")
      return WeightSpec::unit();
    if (s == "survival")
      return WeightSpec::survival();
    throw argument_error("config: unknown weight '" + s + "'");
  }
  if (j.is_object() && j.value("type", std::string()) == "derivative")
    return WeightSpec::derivative(j.at("beta").get<int>());
  throw argument_error("config: invalid weight");
}

inline json weight_to_json(const WeightSpec& w)
{
  if (w.kind == WeightSpec::Kind::Derivative)
    return { { "type", "derivative" }, { "beta", w.beta } };
  return w.name();
}

inline KGrid grid_from_json(const json& j)
{
  if (j.is_array())
    return KGrid(j.get<std::vector<double>>());
  if (j.is_object())
    return KGrid::range(j.at("from").get<double>(), j.at("to").get<double>(),
                        j.at("step").get<double>());
  throw argument_error("config: grid must be an array or {from, to, step}");
}

inline ExperimentMode mode_from_string(const std::string& s)
{
  if (s == "fixed")
    return ExperimentMode::FixedK;
  if (s == "adaptive")
    return ExperimentMode::Adaptive;
  if (s == "both")
    return ExperimentMode::Both;
  throw argument_error("unknown mode '" + s + "' (fixed, adaptive, both)");
}

inline PenaltyMode penalty_mode_from_string(const std::string& s)
{
  if (s == "partial")
    return PenaltyMode::Partial;
  if (s == "full")
    return PenaltyMode::Full;
  throw argument_error("unknown penalty mode '" + s + "' (partial, full)");
}

} // namespace detail

inline RunConfig config_from_json(const nlohmann::json& j)
{
  using detail::json;
  if (!j.is_object())
    throw argument_error("config: top level must be an object");
  static const std::set<std::string> known{
    "settings", "c", "weight", "n", "replications", "grid", "kappa", "seed",
    "mode", "penalty_mode", "stopping", "quadrature", "outputs", "jobs",
    "verbosity", "sigma_fg", "sigma_hat_sq", "out_dir"
  };
  for (const auto& [key, _] : j.items())
    if (!known.contains(key))
      throw argument_error("config: unknown field '" + key + "'");

  RunConfig cfg;
  try {
    if (j.contains("settings")) {
      cfg.settings.clear();
      for (const auto& s : j.at("settings")) {
        SettingConfig sc;
        sc.name = s.value("name", "setting" + std::to_string(cfg.settings.size()));
        sc.signal = detail::density_from_json(s.at("signal"));
        sc.error = detail::density_from_json(s.at("error"));
        cfg.settings.push_back(sc);
      }
    }
    cfg.c = j.value("c", cfg.c);
    if (j.contains("weight"))
      cfg.weight = detail::weight_from_json(j.at("weight"));
    if (j.contains("n")) {
      const auto& nj = j.at("n");
      cfg.n = nj.is_array() ? nj.get<std::vector<long>>() : std::vector<long>{ nj.get<long>() };
    }
    cfg.replications = j.value("replications", cfg.replications);
    if (j.contains("grid"))
      cfg.grid = detail::grid_from_json(j.at("grid"));
    cfg.kappa = j.value("kappa", cfg.kappa);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("mode"))
      cfg.mode = detail::mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("penalty_mode"))
      cfg.penalty_mode = detail::penalty_mode_from_string(j.at("penalty_mode").get<std::string>());
    cfg.stopping = j.value("stopping", cfg.stopping);
    if (j.contains("quadrature")) {
      const auto& q = j.at("quadrature");
      if (q.contains("scheme"))
        cfg.quadrature.scheme = quad::scheme_from_string(q.at("scheme").get<std::string>());
      cfg.quadrature.nodes_per_unit = q.value("nodes_per_unit", cfg.quadrature.nodes_per_unit);
      cfg.quadrature.min_nodes = q.value("min_nodes", cfg.quadrature.min_nodes);
    }
    if (j.contains("outputs"))
      cfg.outputs = j.at("outputs").get<std::vector<std::string>>();
    cfg.jobs = j.value("jobs", cfg.jobs);
    cfg.verbosity = j.value("verbosity", cfg.verbosity);
    if (j.contains("sigma_fg"))
      cfg.sigma_fg = j.at("sigma_fg").get<double>();
    if (j.contains("sigma_hat_sq"))
      cfg.sigma_hat_sq = j.at("sigma_hat_sq").get<double>();
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
  } catch (const json::exception& e) {
    throw argument_error(std::string("config: ") + e.what());
  }
  return cfg;
}

inline nlohmann::json config_to_json(const RunConfig& cfg)
{
  using detail::json;
  json j;
  json settings = json::array();
  for (const auto& s : cfg.settings)
    settings.push_back({ { "name", s.name },
                         { "signal", detail::density_to_json(s.signal) },
                         { "error", detail::density_to_json(s.error) } });
  j["settings"] = settings;
  j["c"] = cfg.c;
  j["weight"] = detail::weight_to_json(cfg.weight);
  j["n"] = cfg.n;
  j["replications"] = cfg.replications;
  j["grid"] = cfg.grid.points();
  j["kappa"] = cfg.kappa;
  j["seed"] = cfg.seed;
  j["mode"] = to_string(cfg.mode);
  j["penalty_mode"] = to_string(cfg.penalty_mode);
  j["stopping"] = cfg.stopping;
  j["quadrature"] = { { "scheme", quad::to_string(cfg.quadrature.scheme) },
                      { "nodes_per_unit", cfg.quadrature.nodes_per_unit },
                      { "min_nodes", cfg.quadrature.min_nodes } };
  j["outputs"] = cfg.outputs;
  j["jobs"] = cfg.jobs;
  j["verbosity"] = cfg.verbosity;
  if (cfg.sigma_fg)
    j["sigma_fg"] = *cfg.sigma_fg;
  if (cfg.sigma_hat_sq)
    j["sigma_hat_sq"] = *cfg.sigma_hat_sq;
  if (!cfg.out_dir.empty())
    j["out_dir"] = cfg.out_dir;
  return j;
}

inline RunConfig parse_config(const std::string& text)
{
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw argument_error(std::string("config: ") + e.what());
  }
  return config_from_json(j);
}

inline RunConfig load_config(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw io_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

} // namespace mellin_qfe
