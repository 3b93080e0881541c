#pragma once

#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace mellin_qfe::cli {

//! Round-trip decimal representation used in every output file.
inline std::string fmt(double x)
{
  if (std::isnan(x))
    return "nan";
  if (std::isinf(x))
    return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

//! Extended-precision values keep their exponent range in text output.
inline std::string fmt(wide x)
{
  if (std::isnan(x))
    return "nan";
  if (std::isinf(x))
    return x > 0 ? "inf" : "-inf";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17Lg", x);
  return buf;
}

//! JSON number when the value fits a double, otherwise its decimal string.
inline nlohmann::json json_number(wide x)
{
  const double d = saturate(x);
  if (std::isfinite(d) || !std::isfinite(x))
    return d;
  return fmt(x);
}

inline std::vector<std::pair<std::string, std::string>>
header_fields(const RunConfig& cfg, const std::string& command)
{
  const auto& q = cfg.quadrature;
  return {
    { "mellin-qfe", version },
    { "command", command },
    { "seed", std::to_string(cfg.seed) },
    { "quadrature", quad::to_string(q.scheme) + " nodes_per_unit=" +
                      std::to_string(q.nodes_per_unit) + " min_nodes=" +
                      std::to_string(q.min_nodes) + " panel_order=" +
                      std::to_string(QuadratureRule::panel_order) },
    { "kappa", fmt(cfg.kappa) },
    { "c", fmt(cfg.c) },
    { "weight", cfg.weight.name() },
    { "penalty_mode", to_string(cfg.penalty_mode) },
    { "stopping", cfg.stopping ? "true" : "false" },
  };
}

//! "# key: value" lines; `extra` lines are appended verbatim after "# ".
inline std::string header_block(const RunConfig& cfg, const std::string& command,
                                const std::vector<std::string>& extra = {})
{
  std::string out;
  for (const auto& [k, v] : header_fields(cfg, command))
    out += "# " + k + ": " + v + "\n";
  for (const auto& e : extra)
    out += "# " + e + "\n";
  return out;
}

inline nlohmann::json header_json(const RunConfig& cfg, const std::string& command)
{
  nlohmann::json h = nlohmann::json::object();
  for (const auto& [k, v] : header_fields(cfg, command))
    h[k] = v;
  return h;
}

inline void ensure_dir(const std::string& dir)
{
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw io_error("cannot create output directory '" + dir + "'");
}

inline void write_file(const std::string& dir, const std::string& name,
                       const std::string& content)
{
  const auto path = (std::filesystem::path(dir) / name).string();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw io_error("cannot write '" + path + "'");
  out << content;
  if (!out)
    throw io_error("write failed for '" + path + "'");
}

//! One strictly positive decimal per line; '#' starts a comment. Errors name
//! the offending line.
inline std::vector<double> read_sample_text(std::istream& in)
{
  std::vector<double> out;
  std::string line;
  for (long lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto h = line.find('#'); h != std::string::npos)
      line.erase(h);
    const auto b = line.find_first_not_of(" \t\r\f\v");
    if (b == std::string::npos)
      continue;
    const auto e = line.find_last_not_of(" \t\r\f\v");
    const std::string tok = line.substr(b, e - b + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw argument_error("line " + std::to_string(lineno) + ": not a number: '" + tok + "'");
    if (!(v > 0.0) || !std::isfinite(v))
      throw argument_error("line " + std::to_string(lineno) +
                           ": observation must be a finite strictly positive number");
    out.push_back(v);
  }
  return out;
}

inline std::vector<double> read_sample_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw io_error("cannot open input file '" + path + "'");
  return read_sample_text(in);
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateOutput
{
  EstimationReport report;
  std::optional<PenaltyTable> table;
  std::optional<SelectionResult> selection;
  double sigma_hat_sq = 0.0;
  bool sigma_unstable = false;
};

//! Moment term of the Partial penalty: config override or the oracle value.
inline double partial_sigma(const RunConfig& cfg)
{
  if (cfg.sigma_fg)
    return *cfg.sigma_fg;
  const auto& s = cfg.settings.front();
  return sigma_fg(s.signal, s.error, cfg.c);
}

//! Estimation and (unless mode is fixed) adaptive selection for the error law
//! of the first setting.
inline EstimateOutput compute_estimate(const RunConfig& cfg, const Sample& y)
{
  if (y.size() < 2)
    throw argument_error("need n \xE2\x89\xA5 2 observations, got " + std::to_string(y.size()));
  const auto& err = cfg.settings.front().error;
  EstimateOutput out;
  out.report = estimate_curve(y, cfg.c, cfg.weight, err, cfg.grid, cfg.quadrature);
  out.sigma_hat_sq = sigma_hat_sq(y, cfg.c);
  out.sigma_unstable = sigma_hat_jackknife_spread(y, cfg.c) > jackknife_warning_threshold;
  if (cfg.mode != ExperimentMode::FixedK) {
    const auto profile = spectral_profile(cfg.c, cfg.weight, err, cfg.grid, cfg.quadrature);
    const double sigma_term =
      cfg.penalty_mode == PenaltyMode::Partial ? partial_sigma(cfg) : out.sigma_hat_sq;
    out.table = build_penalty_table(profile, static_cast<long>(y.size()), cfg.kappa,
                                    cfg.penalty_mode, error_constant_cg(cfg.c, err),
                                    sigma_term);
    out.selection = cfg.stopping ? select_with_stopping(out.report, *out.table)
                                 : contrast_and_select(out.report, *out.table);
  }
  return out;
}

inline void cmd_estimate(const RunConfig& cfg, const std::string& input,
                         const std::string& out_dir)
{
  cfg.validate();
  const Sample y(read_sample_file(input));
  const auto res = compute_estimate(cfg, y);
  ensure_dir(out_dir);
  const auto& s = cfg.settings.front();

  std::map<double, SelectionResult::ContrastRow> contrast;
  if (res.selection)
    for (const auto& r : res.selection->contrast)
      contrast[r.k] = r;

  if (cfg.wants("csv")) {
    std::string csv = header_block(cfg, "estimate",
                                   { "error: " + s.error.name(), "n: " + std::to_string(y.size()),
                                     "sigma_hat_sq: " + fmt(res.sigma_hat_sq) });
    csv += "k,theta_hat,theta_hat_clipped,penalty,A,objective,selected\n";
    for (std::size_t i = 0; i < res.report.per_k.size(); ++i) {
      const auto& e = res.report.per_k[i];
      csv += fmt(e.k) + "," + fmt(e.theta_hat) + "," + fmt(e.theta_hat_clipped) + ",";
      csv += res.table ? fmt(res.table->per_k[i].penalty) : "";
      const auto it = contrast.find(e.k);
      if (it != contrast.end())
        csv += "," + fmt(it->second.A) + "," + fmt(it->second.objective);
      else
        csv += ",,";
      csv += ",";
      csv += res.selection && res.selection->k_hat == e.k ? "1" : "0";
      csv += "\n";
    }
    write_file(out_dir, "estimate.csv", csv);
  }
  if (cfg.wants("json")) {
    nlohmann::json j;
    j["header"] = header_json(cfg, "estimate");
    j["error"] = detail::density_to_json(s.error);
    j["n"] = y.size();
    j["sigma_hat_sq"] = res.sigma_hat_sq;
    j["sigma_unstable"] = res.sigma_unstable;
    auto& per_k = j["per_k"] = nlohmann::json::array();
    for (std::size_t i = 0; i < res.report.per_k.size(); ++i) {
      const auto& e = res.report.per_k[i];
      nlohmann::json row{ { "k", e.k },
                          { "theta_hat", e.theta_hat },
                          { "theta_hat_clipped", e.theta_hat_clipped } };
      if (res.table)
        row["penalty"] = json_number(res.table->per_k[i].penalty);
      per_k.push_back(row);
    }
    if (res.selection) {
      const auto& sel = *res.selection;
      j["selection"] = { { "k_hat", sel.k_hat },
                         { "theta_at_k_hat", sel.theta_at_k_hat },
                         { "m_upper", sel.m_upper_used },
                         { "stopped", sel.stopped },
                         { "stopped_at_first", sel.stopped_at_first },
                         { "stop_k", sel.stop_k ? nlohmann::json(*sel.stop_k) : nlohmann::json() } };
    }
    write_file(out_dir, "estimate.json", j.dump(2) + "\n");
  }
}

// ---------------------------------------------------------------------------
// simulate

//! Type-7 sample quantile of sorted data.
inline double quantile_sorted(const std::vector<double>& v, double p)
{
  if (v.empty())
    return std::nan("");
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

struct BoxStats
{
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
};

inline BoxStats box_stats(std::vector<double> v)
{
  BoxStats b;
  if (v.empty()) {
    b.min = b.q1 = b.median = b.q3 = b.max = b.mean = std::nan("");
    return b;
  }
  std::sort(v.begin(), v.end());
  b.min = v.front();
  b.max = v.back();
  b.q1 = quantile_sorted(v, 0.25);
  b.median = quantile_sorted(v, 0.5);
  b.q3 = quantile_sorted(v, 0.75);
  for (double x : v)
    b.mean += x;
  b.mean /= static_cast<double>(v.size());
  return b;
}

inline constexpr const char* plot_script = R"(#!/usr/bin/env python3
# Redraws the boxplots of the clipped estimates per (setting, n) over the
# k-grid and the scatter of selected cut-offs from the CSVs in this folder.
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

here = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent
reps = pd.read_csv(here / "replicates.csv", comment="#")
summary = pd.read_csv(here / "summary.csv", comment="#")
sel = pd.read_csv(here / "selection.csv", comment="#")

for (setting, n), grp in reps.groupby(["setting", "n"]):
    ks = sorted(grp["k"].unique())
    data = [grp.loc[grp["k"] == k, "clipped"].values for k in ks]
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.boxplot(data)
    ax.set_xticks(range(1, len(ks) + 1), [f"{k:g}" for k in ks])
    theta = summary.loc[(summary["setting"] == setting) & (summary["n"] == n), "theta"]
    if len(theta) and pd.notna(theta.iloc[0]):
        ax.axhline(theta.iloc[0], color="red", lw=1)
    ax.set_xlabel("k")
    ax.set_ylabel("estimate")
    ax.set_title(f"{setting}, n = {n}")
    fig.tight_layout()
    fig.savefig(here / f"boxplot_{setting}_n{n}.png", dpi=120)
    plt.close(fig)

if "k_hat" in sel.columns and sel["k_hat"].notna().any():
    for setting, grp in sel.groupby("setting"):
        fig, ax = plt.subplots(figsize=(6, 4))
        for n, g in grp.groupby("n"):
            ax.scatter(g["replicate"], g["k_hat"], label=f"n = {n}", s=12)
        ax.set_xlabel("replicate")
        ax.set_ylabel("selected k")
        ax.set_title(setting)
        ax.legend()
        fig.tight_layout()
        fig.savefig(here / f"khat_{setting}.png", dpi=120)
        plt.close(fig)
)";

struct SettingRun
{
  ExperimentSpec spec;
  ExperimentFlags flags;
  std::optional<double> theta;
  std::vector<ReplicateRecord> records;
};

inline std::vector<SettingRun> run_all_settings(const RunConfig& cfg, unsigned jobs)
{
  std::vector<SettingRun> runs;
  for (std::size_t i = 0; i < cfg.settings.size(); ++i) {
    SettingRun r;
    r.spec = cfg.experiment(i);
    r.flags = experiment_flags(r.spec);
    try {
      r.theta = true_theta(r.spec.signal, r.spec.c, r.spec.weight);
    } catch (const numeric_error&) {
    }
    if (cfg.verbosity > 0)
      std::cerr << "simulating " << r.spec.name << "\n";
    r.records = run_experiment(r.spec, jobs);
    runs.push_back(std::move(r));
  }
  return runs;
}

inline std::vector<std::string> flag_lines(const std::vector<SettingRun>& runs)
{
  std::vector<std::string> lines;
  for (const auto& r : runs) {
    if (r.flags.sigma_moment_divergent)
      lines.push_back("flag: " + r.spec.name +
                      ": E[Y^{4(c-1)}] is infinite, sigma_hat^2 estimates an infinite parameter");
    else if (r.flags.high_moment_divergent)
      lines.push_back("flag: " + r.spec.name +
                      ": E[Y^{8(c-1)}] is infinite, sigma_hat^2 has infinite variance");
  }
  return lines;
}

inline void cmd_simulate(const RunConfig& cfg, const std::string& out_dir, unsigned jobs)
{
  cfg.validate();
  ensure_dir(out_dir);
  const auto runs = run_all_settings(cfg, std::max(1u, jobs));
  const auto flags = flag_lines(runs);
  for (const auto& f : flags)
    std::cerr << "warning: " << f << "\n";

  std::vector<std::string> extra{ "replications: " + std::to_string(cfg.replications),
                                  "mode: " + to_string(cfg.mode) };
  for (const auto& s : cfg.settings)
    extra.push_back("setting: " + s.name + " signal=" + s.signal.name() +
                    " error=" + s.error.name());
  extra.insert(extra.end(), flags.begin(), flags.end());
  const std::string head = header_block(cfg, "simulate", extra);

  std::string reps = head + "setting,n,replicate,k,theta_hat,clipped,k_hat_flag\n";
  std::string summary = head + "setting,n,k,min,q1,median,q3,max,mean,theta\n";
  std::string sel = head + "setting,n,replicate,k_hat,theta_at_k_hat,m_upper,stopped,"
                           "stop_k,sigma_hat_sq,sigma_unstable,error\n";
  nlohmann::json j;
  j["header"] = header_json(cfg, "simulate");
  j["flags"] = flags;
  auto& jsettings = j["settings"] = nlohmann::json::array();

  for (const auto& run : runs) {
    const auto& ks = run.spec.grid.points();
    const std::string theta = run.theta ? fmt(*run.theta) : "";
    nlohmann::json js;
    js["name"] = run.spec.name;
    js["theta"] = run.theta ? nlohmann::json(*run.theta) : nlohmann::json();
    auto& jrecs = js["replicates"] = nlohmann::json::array();
    for (long n : run.spec.n_list) {
      std::vector<std::vector<double>> clipped(ks.size());
      for (const auto& rec : run.records) {
        if (rec.n != n)
          continue;
        const std::string prefix =
          run.spec.name + "," + std::to_string(n) + "," + std::to_string(rec.replicate) + ",";
        if (rec.error.empty()) {
          for (std::size_t i = 0; i < ks.size(); ++i) {
            const double th = rec.theta_hat[i];
            const bool chosen = rec.selection && rec.selection->k_hat == ks[i];
            reps += prefix + fmt(ks[i]) + "," + fmt(th) + "," + fmt(std::max(th, 0.0)) + "," +
                    (chosen ? "1" : "0") + "\n";
            clipped[i].push_back(std::max(th, 0.0));
          }
        }
        sel += prefix;
        if (rec.selection) {
          const auto& s = *rec.selection;
          sel += fmt(s.k_hat) + "," + fmt(s.theta_at_k_hat) + "," + fmt(s.m_upper_used) + "," +
                 (s.stopped ? "1" : "0") + "," + (s.stop_k ? fmt(*s.stop_k) : "");
        } else {
          sel += ",,,,";
        }
        sel += "," + (rec.error.empty() ? fmt(rec.sigma_hat_sq) : std::string()) + "," +
               (rec.sigma_unstable ? "1" : "0") + ",";
        if (!rec.error.empty()) {
          std::string e = rec.error;
          std::replace(e.begin(), e.end(), ',', ';');
          std::replace(e.begin(), e.end(), '\n', ' ');
          sel += e;
        }
        sel += "\n";

        nlohmann::json jr{ { "n", n }, { "replicate", rec.replicate } };
        if (rec.error.empty()) {
          jr["theta_hat"] = rec.theta_hat;
          jr["sigma_hat_sq"] = rec.sigma_hat_sq;
          jr["sigma_unstable"] = rec.sigma_unstable;
        } else {
          jr["error"] = rec.error;
        }
        if (rec.selection)
          jr["k_hat"] = rec.selection->k_hat;
        jrecs.push_back(jr);
      }
      for (std::size_t i = 0; i < ks.size(); ++i) {
        const auto b = box_stats(clipped[i]);
        summary += run.spec.name + "," + std::to_string(n) + "," + fmt(ks[i]) + "," +
                   fmt(b.min) + "," + fmt(b.q1) + "," + fmt(b.median) + "," + fmt(b.q3) + "," +
                   fmt(b.max) + "," + fmt(b.mean) + "," + theta + "\n";
      }
    }
    jsettings.push_back(js);
  }

  if (cfg.wants("csv")) {
    write_file(out_dir, "replicates.csv", reps);
    write_file(out_dir, "summary.csv", summary);
    write_file(out_dir, "selection.csv", sel);
    write_file(out_dir, "plot_figures.py", plot_script);
  }
  if (cfg.wants("json"))
    write_file(out_dir, "simulate.json", j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// penalty-table

//! Moment term of the table: sigma_{f,g} for Partial; for Full the configured
//! sigma_hat_sq, else its population value 1 + E[Y^{4(c-1)}].
inline double table_sigma_term(const RunConfig& cfg)
{
  if (cfg.penalty_mode == PenaltyMode::Partial)
    return partial_sigma(cfg);
  if (cfg.sigma_hat_sq)
    return *cfg.sigma_hat_sq;
  const auto& s = cfg.settings.front();
  return 1.0 + moment_y(s.signal, s.error, 4.0 * (cfg.c - 1.0));
}

//! One table per configured n, for the first setting.
inline std::vector<PenaltyTable> compute_penalty_tables(const RunConfig& cfg)
{
  const auto& s = cfg.settings.front();
  const auto profile = spectral_profile(cfg.c, cfg.weight, s.error, cfg.grid, cfg.quadrature);
  const double cg = error_constant_cg(cfg.c, s.error);
  const double sigma_term = table_sigma_term(cfg);
  std::vector<PenaltyTable> out;
  for (long n : cfg.n)
    out.push_back(build_penalty_table(profile, n, cfg.kappa, cfg.penalty_mode, cg, sigma_term));
  return out;
}

inline void cmd_penalty_table(const RunConfig& cfg, const std::string& out_dir)
{
  cfg.validate();
  const auto tables = compute_penalty_tables(cfg);
  ensure_dir(out_dir);
  const auto& s = cfg.settings.front();
  const std::vector<std::string> extra{
    "setting: " + s.name + " signal=" + s.signal.name() + " error=" + s.error.name(),
    "c_g: " + fmt(tables.front().c_g), "sigma_term: " + fmt(tables.front().sigma_term)
  };
  if (cfg.wants("csv")) {
    std::string csv = header_block(cfg, "penalty-table", extra);
    csv += "n,k,delta_four,delta_inf,omega_k,log_omega_clamped,vbar,V_or_Vhat,"
           "within_m_upper,m_upper\n";
    for (const auto& t : tables)
      for (const auto& r : t.per_k)
        csv += std::to_string(t.n) + "," + fmt(r.k) + "," + fmt(r.delta_four) + "," +
               fmt(r.delta_inf) + "," + fmt(r.omega_k) + "," + fmt(r.log_omega_clamped) + "," +
               fmt(r.vbar) + "," + fmt(r.penalty) + "," + (r.k <= t.m_upper ? "1" : "0") + "," +
               (r.k == t.m_upper ? "1" : "0") + "\n";
    write_file(out_dir, "penalty_table.csv", csv);
  }
  if (cfg.wants("json")) {
    nlohmann::json j;
    j["header"] = header_json(cfg, "penalty-table");
    j["c_g"] = tables.front().c_g;
    j["sigma_term"] = tables.front().sigma_term;
    auto& jt = j["tables"] = nlohmann::json::array();
    for (const auto& t : tables) {
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& r : t.per_k)
        rows.push_back({ { "k", r.k },
                         { "delta_four", json_number(r.delta_four) },
                         { "delta_inf", json_number(r.delta_inf) },
                         { "omega_k", json_number(r.omega_k) },
                         { "log_omega_clamped", json_number(r.log_omega_clamped) },
                         { "vbar", json_number(r.vbar) },
                         { "penalty", json_number(r.penalty) } });
      jt.push_back({ { "n", t.n }, { "m_upper", t.m_upper }, { "rows", rows } });
    }
    write_file(out_dir, "penalty_table.json", j.dump(2) + "\n");
  }
}

// ---------------------------------------------------------------------------
// oracle

struct OracleQuery
{
  std::optional<double> k;
  std::optional<Smoothness> smoothness;
  double a = 0.0;
};

//! Parses "s=VAL" (ordinary smooth) or "r=VAL" (super smooth).
inline Smoothness parse_smoothness(const std::string& text)
{
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq + 1 >= text.size())
    throw argument_error("--smooth expects s=VAL or r=VAL");
  const std::string key = text.substr(0, eq);
  const std::string val = text.substr(eq + 1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
  if (ec != std::errc() || ptr != val.data() + val.size() || !(v > 0.0))
    throw argument_error("--smooth value must be a positive number");
  if (key == "s")
    return Smoothness::ordinary(v);
  if (key == "r")
    return Smoothness::super_smooth(v);
  throw argument_error("--smooth expects s=VAL or r=VAL");
}

//! Oracle report for every configured setting, as "key: value" lines.
inline std::string cmd_oracle(const RunConfig& cfg, const OracleQuery& q)
{
  cfg.validate();
  if (q.k && (!(*q.k >= 0.0) || !std::isfinite(*q.k)))
    throw argument_error("--k must be a finite nonnegative number");
  std::vector<std::string> extra;
  if (q.k)
    extra.push_back("k: " + fmt(*q.k));
  std::string out = header_block(cfg, "oracle", extra);
  for (const auto& s : cfg.settings) {
    out += "setting: " + s.name + "\n";
    out += "signal: " + s.signal.name() + "\n";
    out += "error: " + s.error.name() + "\n";
    const double theta = true_theta(s.signal, cfg.c, cfg.weight);
    out += "theta: " + fmt(theta) + "\n";
    if (q.k) {
      const double k = *q.k;
      const double tk = theta_k(s.signal, cfg.c, cfg.weight, k, cfg.quadrature);
      out += "theta_k: " + fmt(tk) + "\n";
      out += "bias_sq: " + fmt((theta - tk) * (theta - tk)) + "\n";
      const double lam = lambda_fg(s.signal, s.error, cfg.c, cfg.weight, k, cfg.quadrature);
      out += "lambda: " + fmt(lam) + "\n";
      try {
        const double cg = error_constant_cg(cfg.c, s.error);
        const double sig = sigma_fg(s.signal, s.error, cfg.c);
        const double dpsi = saturate(delta_four(cfg.c, cfg.weight, s.error, k, cfg.quadrature));
        for (long n : cfg.n) {
          const double nn = static_cast<double>(n);
          const double bound =
            (theta - tk) * (theta - tk) + 2.0 * cg * sig * sig * (dpsi / (nn * nn) + lam / nn);
          out += "mse_bound[n=" + std::to_string(n) + "]: " + fmt(bound) + "\n";
        }
      } catch (const domain_error& e) {
        out += "mse_bound: flagged (" + std::string(e.what()) + ")\n";
      }
    }
    if (q.smoothness) {
      for (long n : cfg.n) {
        const auto oc = oracle_k_star(*q.smoothness, q.a, static_cast<double>(n), cfg.c,
                                      cfg.weight, s.error, cfg.grid, cfg.quadrature);
        out += "k_star[n=" + std::to_string(n) + "]: " + fmt(oc.k_star) + "\n";
      }
    }
  }
  return out;
}

} // namespace mellin_qfe::cli
