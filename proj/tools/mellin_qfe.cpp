// mellin-qfe: estimation, simulation, penalty tables and oracle values for
// weighted quadratic functionals under multiplicative measurement error.

#include <mellin_qfe/cli.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace mellin_qfe;

struct Overrides
{
  std::optional<std::uint64_t> seed;
  std::optional<double> kappa;
  std::optional<double> c;
  std::optional<std::size_t> replications;
  std::optional<int> nodes_per_unit;
  std::optional<int> min_nodes;
  std::optional<std::string> scheme;
  std::optional<std::string> mode;
  std::optional<std::string> penalty_mode;
  std::optional<bool> stopping;
  std::optional<int> verbosity;
  std::optional<double> sigma_fg;
  std::optional<double> sigma_hat_sq;
  std::optional<std::string> setting;

  void attach(CLI::App* app)
  {
    app->add_option("--seed", seed, "Override the master seed");
    app->add_option("--kappa", kappa, "Override the penalty constant");
    app->add_option("--c", c, "Override the development point c");
    app->add_option("--replications", replications, "Override the replicate count");
    app->add_option("--nodes-per-unit", nodes_per_unit, "Quadrature nodes per unit of k");
    app->add_option("--min-nodes", min_nodes, "Minimum quadrature node count");
    app->add_option("--scheme", scheme, "Quadrature scheme (gauss-legendre, simpson)");
    app->add_option("--mode", mode, "fixed, adaptive or both");
    app->add_option("--penalty-mode", penalty_mode, "partial or full");
    app->add_option("--stopping", stopping, "Apply the stopping rule (true/false)");
    app->add_option("--verbosity", verbosity, "Progress messages on stderr");
    app->add_option("--sigma-fg", sigma_fg, "Moment term for the partial penalty");
    app->add_option("--sigma-hat-sq", sigma_hat_sq, "Moment term for the full penalty");
    app->add_option("--setting", setting, "Restrict the run to the named setting");
  }

  void apply(RunConfig& cfg) const
  {
    if (seed)
      cfg.seed = *seed;
    if (kappa)
      cfg.kappa = *kappa;
    if (c)
      cfg.c = *c;
    if (replications)
      cfg.replications = *replications;
    if (nodes_per_unit)
      cfg.quadrature.nodes_per_unit = *nodes_per_unit;
    if (min_nodes)
      cfg.quadrature.min_nodes = *min_nodes;
    if (scheme)
      cfg.quadrature.scheme = quad::scheme_from_string(*scheme);
    if (mode)
      cfg.mode = detail::mode_from_string(*mode);
    if (penalty_mode)
      cfg.penalty_mode = detail::penalty_mode_from_string(*penalty_mode);
    if (stopping)
      cfg.stopping = *stopping;
    if (verbosity)
      cfg.verbosity = *verbosity;
    if (sigma_fg)
      cfg.sigma_fg = *sigma_fg;
    if (sigma_hat_sq)
      cfg.sigma_hat_sq = *sigma_hat_sq;
    if (setting)
      cfg.select_setting(*setting);
  }
};

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{ "Mellin spectral cut-off estimation of weighted quadratic functionals" };
  app.set_version_flag("--version", std::string(mellin_qfe::version));
  app.require_subcommand(1);

  std::string config_path, input_path, out_dir;
  std::optional<unsigned> jobs;
  std::optional<double> k, a;
  std::optional<std::string> smooth;
  Overrides ov;

  auto* est = app.add_subcommand("estimate", "Estimate on a sample file");
  est->add_option("--config", config_path, "JSON config")->required();
  est->add_option("--input", input_path, "Sample file, one positive value per line")->required();
  est->add_option("--out", out_dir, "Output directory")->required();
  ov.attach(est);

  auto* sim = app.add_subcommand("simulate", "Monte Carlo study");
  sim->add_option("--config", config_path, "JSON config")->required();
  sim->add_option("--out", out_dir, "Output directory")->required();
  sim->add_option("--jobs", jobs, "Worker threads");
  ov.attach(sim);

  auto* pen = app.add_subcommand("penalty-table", "Penalty quantities over the grid");
  pen->add_option("--config", config_path, "JSON config")->required();
  pen->add_option("--out", out_dir, "Output directory")->required();
  ov.attach(pen);

  auto* ora = app.add_subcommand("oracle", "True values and risk bounds");
  ora->add_option("--config", config_path, "JSON config")->required();
  ora->add_option("--k", k, "Cut-off for theta_k, bias and bounds");
  ora->add_option("--smooth", smooth, "s=VAL (ordinary) or r=VAL (super smooth)");
  ora->add_option("--a", a, "Weight exponent a in the oracle risk");
  ov.attach(ora);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = load_config(config_path);
    ov.apply(cfg);
    if (jobs)
      cfg.jobs = *jobs;

    if ((*est || *pen) && cfg.settings.size() > 1)
      std::cerr << "note: using setting '" << cfg.settings.front().name
                << "'; choose another with --setting\n";

    if (*est) {
      cli::cmd_estimate(cfg, input_path, out_dir);
    } else if (*sim) {
      cli::cmd_simulate(cfg, out_dir, cfg.jobs);
    } else if (*pen) {
      cli::cmd_penalty_table(cfg, out_dir);
    } else if (*ora) {
      cli::OracleQuery q;
      q.k = k;
      if (smooth)
        q.smoothness = cli::parse_smoothness(*smooth);
      if (a)
        q.a = *a;
      std::cout << cli::cmd_oracle(cfg, q);
    }
  } catch (const argument_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
