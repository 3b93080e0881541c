#include <mellin_qfe.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

using namespace mellin_qfe;

namespace {

// Direct evaluation of V(k) from its definition, for constant inputs.
double penalty_by_hand(double k, double n, double dpsi, double dinf, double kappa, double cterm)
{
  const double omega = 2 * k * k * k * std::max(1.0, dinf / n);
  const double L = std::max(std::log(omega), std::log(2.0));
  const double r = std::max(1.0, omega * L * std::max(2 * k, L) / n);
  return kappa * L / (n * n) * std::max(dpsi, L * dinf) * (cterm + r * r);
}

const std::vector<DensitySpec>& catalog_errors()
{
  static const std::vector<DensitySpec> v{ DensitySpec::beta21(), DensitySpec::pareto1(),
                                           DensitySpec::uniform01(), DensitySpec::lognormal(),
                                           DensitySpec::no_error() };
  return v;
}

} // namespace

TEST(SpectralTerms, NoErrorUnitWeight)
{
  for (double k : { 0.3, 1.0, 2.5 }) {
    EXPECT_NEAR(delta_four(0.5, WeightSpec::unit(), DensitySpec::no_error(), k), 2 * k, 1e-13);
    EXPECT_DOUBLE_EQ(delta_inf(0.5, WeightSpec::unit(), DensitySpec::no_error(), k), 1.0);
  }
}

TEST(SpectralTerms, ParetoClosedForm)
{
  // |M_c[g]|^{-4} = (9/4 + 4 pi^2 t^2)^2 at c = 1/2
  const double k = 1.3, a = 2.25, b = 4 * std::numbers::pi * std::numbers::pi;
  const double dpsi = 2 * (a * a * k + 2 * a * b * k * k * k / 3 + b * b * std::pow(k, 5) / 5);
  EXPECT_NEAR(delta_four(0.5, WeightSpec::unit(), DensitySpec::pareto1(), k), dpsi, 1e-9 * dpsi);
  EXPECT_NEAR(delta_inf(0.5, WeightSpec::unit(), DensitySpec::pareto1(), k),
              std::pow(a + b * k * k, 2), 1e-9);
}

TEST(SpectralTerms, ParetoAtUnitCutoff)
{
  const double a = 2.25, b = 4 * std::numbers::pi * std::numbers::pi;
  const double dinf = (a + b) * (a + b);
  EXPECT_NEAR(dinf, 1741.26, 5e-3);
  EXPECT_NEAR(delta_inf(0.5, WeightSpec::unit(), DensitySpec::pareto1(), 1.0), dinf, 1e-9);
  const double dpsi = 2 * (a * a + 2 * a * b / 3 + b * b / 5);
  EXPECT_NEAR(dpsi, 751.978, 5e-4);
  EXPECT_NEAR(delta_four(0.5, WeightSpec::unit(), DensitySpec::pareto1(), 1.0), dpsi, 1e-9 * dpsi);
  EXPECT_NEAR(omega_rate(1.0, 100.0, dinf), 2.0 * dinf / 100.0, 1e-12);
}

TEST(SpectralTerms, LognormalAtZero)
{
  EXPECT_NEAR(delta_inf(0.5, WeightSpec::unit(), DensitySpec::lognormal(), 0.0), std::exp(-0.5),
              1e-15);
}

TEST(ErrorConstant, MatchesNormRatio)
{
  // c_g = max(1, sup g(x) x^{2c-1} / int g(x) x^{2c-2} dx), evaluated on a grid
  const double c = 0.7;
  for (const auto& g : catalog_errors()) {
    if (g.law == DensitySpec::Law::NoError)
      continue;
    const auto [lo, hi] = log_support(g);
    double sup = 0.0;
    auto h = [&](double u) {
      const double x = std::exp(u);
      return pdf(g, x) * std::pow(x, 2 * c - 1);
    };
    for (int i = 0; i <= 200000; ++i)
      sup = std::max(sup, h(lo + (hi - lo) * i / 200000.0));
    // supports are open, so the sup may be a limit at an endpoint
    sup = std::max({ sup, h(lo + 1e-12), h(hi - 1e-12) });
    const double l1 = quad::integrate(
      [&](double u) { return pdf(g, std::exp(u)) * std::exp((2 * c - 1) * u); }, lo, hi, 2000);
    EXPECT_NEAR(error_constant_cg(c, g), std::max(1.0, sup / l1), 1e-4) << g.name();
  }
  EXPECT_EQ(error_constant_cg(0.5, DensitySpec::no_error()), 1.0);
  EXPECT_THROW(error_constant_cg(0.5, DensitySpec::uniform01()), domain_error);
}

TEST(PenaltyTable, NoErrorRowsMatchDefinition)
{
  const KGrid grid({ 1.0, 2.0, 3.0 });
  const auto prof = spectral_profile(0.5, WeightSpec::unit(), DensitySpec::no_error(), grid);
  const auto t = build_penalty_table(prof, 100, 1.0, PenaltyMode::Partial, 1.0, 1.0);
  ASSERT_EQ(t.per_k.size(), 3u);
  for (const auto& r : t.per_k) {
    const double k = r.k;
    EXPECT_NEAR(r.delta_four, 2 * k, 1e-13);
    EXPECT_DOUBLE_EQ(r.omega_k, 2 * k * k * k);
    const double ref = penalty_by_hand(k, 100, 2 * k, 1.0, 1.0, 1.0);
    EXPECT_NEAR(r.penalty, ref, 1e-12 * ref) << "k=" << k;
  }
}

TEST(PenaltyTable, FullModeConstant)
{
  const KGrid grid({ 0.5, 1.0 });
  const auto prof = spectral_profile(0.5, WeightSpec::unit(), DensitySpec::pareto1(), grid);
  const auto t = build_penalty_table(prof, 200, 1e-3, PenaltyMode::Full, 2.0, 1.7);
  for (const auto& r : t.per_k) {
    const double ref = penalty_by_hand(r.k, 200, r.delta_four, r.delta_inf, 1e-3, 2 * 1.7 * 4.0);
    EXPECT_NEAR(r.penalty, ref, 1e-12 * ref);
  }
}

TEST(PenaltyTable, ZeroKappaGivesZeroPenalty)
{
  const auto prof = spectral_profile(0.5, WeightSpec::unit(), DensitySpec::pareto1(),
                                     KGrid::range(0.1, 1.0, 0.1));
  const auto t = build_penalty_table(prof, 100, 0.0, PenaltyMode::Partial, 2.0, 1.0);
  for (double p : t.penalties())
    EXPECT_EQ(p, 0.0);
}

TEST(PenaltyTable, InvariantsAcrossCatalog)
{
  const auto grid = KGrid::range(0.1, 3.0, 0.1);
  for (const auto& g : catalog_errors()) {
    const double c = g.law == DensitySpec::Law::Uniform01 ? 0.75 : 0.5;
    const auto prof = spectral_profile(c, WeightSpec::unit(), g, grid);
    for (long n : { 100L, 500L, 10000L })
      EXPECT_NO_THROW(build_penalty_table(prof, n, default_kappa, PenaltyMode::Full,
                                          error_constant_cg(c, g), 1.5))
        << g.name() << " n=" << n;
  }
}

TEST(PenaltyTable, SuperSmoothErrorBeyondDoubleRange)
{
  // lognormal(0,1) at c = 0.5: |M_c[g](t)|^{-4} = exp(8 pi^2 t^2 - 1/2)
  const double k = 3.0;
  const wide d = delta_inf(0.5, WeightSpec::unit(), DensitySpec::lognormal(), k);
  const double expected_log = 8.0 * std::numbers::pi * std::numbers::pi * k * k - 0.5;
  EXPECT_GT(expected_log, std::log(std::numeric_limits<double>::max()));
  EXPECT_NEAR(static_cast<double>(std::log(d)), expected_log, 1e-9 * expected_log);
  const auto prof = spectral_profile(0.5, WeightSpec::unit(), DensitySpec::lognormal(),
                                     KGrid({ 1.0, 2.0, 3.0 }));
  const auto t = build_penalty_table(prof, 100, default_kappa, PenaltyMode::Full, 1.0, 2.0);
  EXPECT_TRUE(std::isfinite(t.per_k.back().vbar));
  EXPECT_EQ(t.penalties().back(), std::numeric_limits<double>::infinity());
}

TEST(SpectralTerms, LognormalDeltaPsiMatchesDawsonForm)
{
  // Delta_psi(k) = 2 e^{-1/2} int_0^k e^{a t^2} dt with a = 8 pi^2, and
  // int_0^k e^{a t^2} dt = e^{a k^2} F(sqrt(a) k) / sqrt(a) with the Dawson
  // integral F(x) ~ (1/2x) sum_m (2m-1)!! / (2x^2)^m for large x
  const double a = 8.0 * std::numbers::pi * std::numbers::pi;
  for (double k : { 1.0, 2.0, 3.0 }) {
    const double x = std::sqrt(a) * k;
    double term = 1.0, series = 1.0;
    for (int m = 1; m < 30; ++m) {
      const double next = term * (2.0 * m - 1.0) / (2.0 * x * x);
      if (next > term || next < 1e-18)
        break;
      term = next;
      series += term;
    }
    const double log_dawson = std::log(series / (2.0 * x));
    const double expected_log = std::log(2.0) - 0.5 + a * k * k + log_dawson - 0.5 * std::log(a);
    const wide d = delta_four(0.5, WeightSpec::unit(), DensitySpec::lognormal(), k);
    EXPECT_NEAR(static_cast<double>(std::log(d)), expected_log, 1e-10) << "k=" << k;
  }
}

TEST(Saturate, NarrowsToDouble)
{
  EXPECT_EQ(saturate(wide(1.5)), 1.5);
  EXPECT_EQ(saturate(wide(std::numeric_limits<double>::max()) * 4), std::numeric_limits<double>::infinity());
  EXPECT_EQ(saturate(-wide(std::numeric_limits<double>::max()) * 4), -std::numeric_limits<double>::infinity());
}

TEST(PenaltyTable, MUpperGrowsWithN)
{
  const auto grid = KGrid::range(0.1, 3.0, 0.1);
  const auto prof = spectral_profile(0.5, WeightSpec::unit(), DensitySpec::lognormal(), grid);
  const auto small = build_penalty_table(prof, 100, 1e-5, PenaltyMode::Full, 1.0, 1.0);
  const auto large = build_penalty_table(prof, 10000, 1e-5, PenaltyMode::Full, 1.0, 1.0);
  EXPECT_LE(small.m_upper, large.m_upper);
  EXPECT_LT(small.m_upper, grid.back());
}

TEST(MUpper, ReferencePoint)
{
  EXPECT_EQ(vbar_reference_index(KGrid({ 0.5, 0.9, 1.2, 2.0 })), 2u);
  EXPECT_EQ(vbar_reference_index(KGrid({ 0.2, 0.4 })), 1u);
  const KGrid g({ 0.5, 1.0, 2.0, 3.0 });
  const std::vector<wide> vb{ 1.0, 2.0, 100.0, 1e9 };
  EXPECT_EQ(m_upper(g, 10.0, vb), 2.0);
}

TEST(Selection, ConstantCurvePicksSmallestPenalty)
{
  const std::vector<double> ks{ 0.5, 1.0, 1.5 }, th{ 1.0, 1.0, 1.0 }, pen{ 0.1, 0.2, 0.3 };
  const auto r = contrast_and_select(ks, th, pen);
  EXPECT_EQ(r.k_hat, 0.5);
  for (const auto& row : r.contrast)
    EXPECT_EQ(row.A, 0.0);
}

TEST(Selection, HandComputedContrast)
{
  // A(k_i) = max_{j>i} ((th_i - th_j)^2 - pen_j - pen_i)_+
  const std::vector<double> ks{ 0.5, 1.0, 1.5 }, th{ 0.0, 1.0, 1.1 }, pen{ 0.01, 0.02, 0.03 };
  const auto r = contrast_and_select(ks, th, pen);
  EXPECT_NEAR(r.contrast[0].A, 1.21 - 0.03 - 0.01, 1e-15);
  EXPECT_NEAR(r.contrast[1].A, 0.0, 1e-15);
  EXPECT_NEAR(r.contrast[2].A, 0.0, 1e-15);
  EXPECT_EQ(r.k_hat, 1.0);
  EXPECT_EQ(r.theta_at_k_hat, 1.0);
}

TEST(Selection, TiesGoToSmallestK)
{
  const std::vector<double> ks{ 0.5, 1.0 }, th{ 2.0, 2.0 }, pen{ 0.0, 0.0 };
  EXPECT_EQ(contrast_and_select(ks, th, pen).k_hat, 0.5);
}

TEST(Selection, StoppingRule)
{
  const KGrid grid({ 0.5, 1.0, 1.5, 2.0 });
  const auto prof = spectral_profile(0.5, WeightSpec::unit(), DensitySpec::no_error(), grid);
  const auto table = build_penalty_table(prof, 100, 0.0, PenaltyMode::Partial, 1.0, 1.0);
  EstimationReport rep;
  for (double k : grid.points())
    rep.per_k.push_back({ k, 1.0, 1.0 });
  rep.per_k[2].theta_hat = -0.1;
  const auto s = select_with_stopping(rep, table);
  EXPECT_TRUE(s.stopped);
  EXPECT_EQ(*s.stop_k, 1.5);
  EXPECT_EQ(s.contrast.size(), 2u);

  rep.per_k[0].theta_hat = -0.2;
  const auto f = select_with_stopping(rep, table);
  EXPECT_TRUE(f.stopped_at_first);
  EXPECT_EQ(f.k_hat, 0.5);
  EXPECT_EQ(f.theta_at_k_hat, -0.2);
}

TEST(Selection, GridMismatchRejected)
{
  const auto prof = spectral_profile(0.5, WeightSpec::unit(), DensitySpec::no_error(), KGrid({ 1.0 }));
  const auto table = build_penalty_table(prof, 10, 1.0, PenaltyMode::Partial, 1.0, 1.0);
  EstimationReport rep;
  rep.per_k.push_back({ 2.0, 1.0, 1.0 });
  EXPECT_THROW(contrast_and_select(rep, table), argument_error);
}

TEST(SigmaHat, Values)
{
  EXPECT_DOUBLE_EQ(sigma_hat_sq(Sample({ 1.0, 1.0 }), 0.5), 2.0);
  // c = 0.5: Y^{-2}
  EXPECT_DOUBLE_EQ(sigma_hat_sq(Sample({ 0.5, 1.0 }), 0.5), 1.0 + 2.5);
  EXPECT_LT(sigma_hat_jackknife_spread(Sample({ 1.0, 1.1, 0.9 }), 0.5), 1.0);
  std::vector<double> v(20, 1.0);
  v.push_back(0.001);
  EXPECT_GT(sigma_hat_jackknife_spread(Sample(v), 0.5), jackknife_warning_threshold);
}

TEST(Oracle, KStarIncreasesWithN)
{
  const auto grid = KGrid::range(0.1, 3.0, 0.1);
  double prev = 0.0;
  for (double n : { 100.0, 1000.0, 10000.0, 100000.0 }) {
    const auto oc = oracle_k_star(Smoothness::ordinary(1.0), 0.0, n, 0.5, WeightSpec::unit(),
                                  DensitySpec::pareto1(), grid);
    EXPECT_GE(oc.k_star, prev);
    prev = oc.k_star;
    const auto it = std::min_element(oc.risk.begin(), oc.risk.end());
    EXPECT_EQ(grid[static_cast<std::size_t>(it - oc.risk.begin())], oc.k_star);
  }
  EXPECT_GT(prev, 0.1);
}

TEST(Oracle, BiasBranch)
{
  EXPECT_NEAR(bias_branch(Smoothness::ordinary(1.0), 0.0, 1.0), 0.25, 1e-15);
  EXPECT_NEAR(bias_branch(Smoothness::super_smooth(2.0), 0.0, 1.0), std::exp(-4.0), 1e-15);
}
