// Draws one sample of Y = X U with X ~ Beta(2,1) and U ~ Pareto(1), then
// prints the estimate curve and the data-driven cut-off.

#include <mellin_qfe.hpp>

#include <cstdio>

int main()
{
  using namespace mellin_qfe;

  const auto signal = DensitySpec::beta21();
  const auto error = DensitySpec::pareto1();
  const double c = 0.5;
  const auto weight = WeightSpec::unit();
  const auto grid = KGrid::range(0.1, 2.0, 0.1);

  const Sample y = draw_observations(signal, error, 500, 7, 0);
  const auto report = estimate_curve(y, c, weight, error, grid);

  const auto profile = spectral_profile(c, weight, error, grid);
  const auto table = build_penalty_table(profile, static_cast<long>(y.size()), default_kappa,
                                         PenaltyMode::Full, error_constant_cg(c, error),
                                         sigma_hat_sq(y, c));
  const auto sel = select_with_stopping(report, table);

  std::printf("true theta = %.6f\n", true_theta(signal, c, weight));
  for (std::size_t i = 0; i < report.per_k.size(); ++i)
    std::printf("k = %4.1f  theta_hat = %9.6f  penalty = %.3Le\n", report.per_k[i].k,
                report.per_k[i].theta_hat, table.per_k[i].penalty);
  std::printf("k_hat = %.1f  theta_hat(k_hat) = %.6f  M = %.1f%s\n", sel.k_hat,
              sel.theta_at_k_hat, sel.m_upper_used, sel.stopped ? "  (stopped)" : "");
}
