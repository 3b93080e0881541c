#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace mellin_qfe;

namespace {

std::vector<DensitySpec> densities()
{
  return { DensitySpec::beta21(), DensitySpec::pareto1(), DensitySpec::uniform01(),
           DensitySpec::lognormal(0.0, 1.0), DensitySpec::lognormal(0.3, 0.5) };
}

} // namespace

TEST(AnalyticMellin, MatchesNumericTransform)
{
  for (const auto& d : densities())
    for (double c : { 0.5, 0.8 })
      for (double t : { 0.0, 0.25, -1.0, 2.7 }) {
        const auto tr = default_truncation(d, c, 1e-12);
        const auto num = numeric_mellin(d, c, t, tr);
        const auto ana = analytic_mellin(d, c, t);
        EXPECT_NEAR(num.real(), ana.real(), 1e-8) << d.name() << " c=" << c << " t=" << t;
        EXPECT_NEAR(num.imag(), ana.imag(), 1e-8) << d.name() << " c=" << c << " t=" << t;
      }
}

TEST(AnalyticMellin, ConjugateSymmetry)
{
  for (const auto& d : densities()) {
    const auto a = analytic_mellin(d, 0.5, 1.3);
    const auto b = analytic_mellin(d, 0.5, -1.3);
    EXPECT_NEAR(a.real(), b.real(), 1e-15);
    EXPECT_NEAR(a.imag(), -b.imag(), 1e-15);
  }
}

TEST(AnalyticMellin, StripViolations)
{
  EXPECT_THROW(analytic_mellin(DensitySpec::beta21(), -1.0, 0.0), domain_error);
  EXPECT_THROW(analytic_mellin(DensitySpec::pareto1(), 2.0, 0.0), domain_error);
  EXPECT_THROW(analytic_mellin(DensitySpec::uniform01(), 0.0, 0.0), domain_error);
  EXPECT_NO_THROW(analytic_mellin(DensitySpec::lognormal(), -5.0, 1.0));
}

TEST(AnalyticMellin, PointMassIsOne)
{
  EXPECT_EQ(analytic_mellin(DensitySpec::no_error(), 0.5, 3.0), complex(1.0, 0.0));
}

TEST(Moment, ClosedForms)
{
  EXPECT_NEAR(moment(DensitySpec::beta21(), 1.0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(moment(DensitySpec::pareto1(), -1.0), 0.5, 1e-15);
  EXPECT_NEAR(moment(DensitySpec::uniform01(), 2.0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(moment(DensitySpec::lognormal(0.2, 0.7), 2.0), std::exp(0.4 + 2.0 * 0.49), 1e-12);
  EXPECT_THROW(moment(DensitySpec::beta21(), -2.0), moment_error);
  EXPECT_THROW(moment(DensitySpec::pareto1(), 1.0), moment_error);
  EXPECT_FALSE(moment_is_finite(DensitySpec::uniform01(), -1.0));
}

TEST(Moment, AgreesWithQuadratureOfDensity)
{
  for (const auto& d : densities()) {
    const double s = -0.5;
    const auto [lo, hi] = log_support(d);
    const double num = quad::integrate(
      [&](double u) { return pdf(d, std::exp(u)) * std::exp((s + 1.0) * u); }, lo, hi, 1000);
    EXPECT_NEAR(num, moment(d, s), 1e-9) << d.name();
  }
}

TEST(MellinPower, ModulusAndPhase)
{
  const auto p = mellin_power(4.0, 0.5, 0.3);
  EXPECT_NEAR(std::abs(p), 0.5, 1e-15);
  EXPECT_NEAR(std::arg(p), two_pi * 0.3 * std::log(4.0), 1e-14);
  EXPECT_THROW(mellin_power(0.0, 0.5, 0.0), domain_error);
}

TEST(EmpiricalMellin, OnesGiveOne)
{
  const Sample s({ 1.0, 1.0, 1.0 });
  const auto m = empirical_mellin(s, 0.5, 2.0);
  EXPECT_DOUBLE_EQ(m.real(), 1.0);
  EXPECT_DOUBLE_EQ(m.imag(), 0.0);
  EXPECT_THROW(empirical_mellin(Sample(), 0.5, 0.0), argument_error);
}

TEST(EmpiricalMellin, ConvergesToProductTransform)
{
  // M_c[f_Y] = M_c[f] M_c[g]; the empirical transform has variance at most
  // E[Y^{2c-2}] / n.
  const auto f = DensitySpec::beta21();
  const auto g = DensitySpec::lognormal(0.0, 0.5);
  const std::size_t n = 200000;
  const Sample y = draw_observations(f, g, n, 11, 0);
  const double c = 0.8;
  const double sd = std::sqrt(moment(f, 2 * c - 2) * moment(g, 2 * c - 2) / n);
  for (double t : { 0.0, 0.4, 1.1 }) {
    const auto emp = empirical_mellin(y, c, t);
    const auto ana = analytic_mellin(f, c, t) * analytic_mellin(g, c, t);
    EXPECT_LT(std::abs(emp - ana), 5.0 * sd) << "t=" << t;
  }
}

TEST(Plancherel, TransformNormEqualsWeightedDensityNorm)
{
  for (const auto& d : densities())
    for (double c : { 0.5, 0.8 }) {
      const double rhs = oracle::plancherel_rhs(d, c);
      EXPECT_NEAR(oracle::plancherel_lhs(d, c), rhs, 1e-4) << d.name() << " c=" << c;
      EXPECT_NEAR(true_theta(d, c, WeightSpec::unit()), rhs, 1e-6) << d.name() << " c=" << c;
    }
}

TEST(Convolution, ClosedFormProductDensity)
{
  // Beta(2,1) times Pareto(1): f_Y(y) = 2y/3 on (0,1) and 2/(3y^2) beyond.
  const auto f = DensitySpec::beta21();
  const auto g = DensitySpec::pareto1();
  for (double y : { 0.01, 0.3, 0.9, 1.5, 7.0 }) {
    const double expected = y < 1.0 ? 2.0 * y / 3.0 : 2.0 / (3.0 * y * y);
    EXPECT_NEAR(oracle::product_density(f, g, y), expected, 1e-12) << "y=" << y;
  }
}

TEST(Convolution, MellinOfProductIsProductOfMellins)
{
  const double c = 0.5;
  const std::vector<double> ts{ -3.0, -1.2, 0.0, 0.7, 2.0, 3.0 };
  const std::pair<DensitySpec, DensitySpec> pairs[] = {
    { DensitySpec::beta21(), DensitySpec::pareto1() },
    { DensitySpec::beta21(), DensitySpec::lognormal(0.0, 1.0) },
  };
  for (const auto& [f, g] : pairs) {
    const auto num = oracle::mellin_of_product(f, g, c, ts);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const auto ana = analytic_mellin(f, c, ts[i]) * analytic_mellin(g, c, ts[i]);
      EXPECT_LT(std::abs(num[i] - ana), 1e-5) << f.name() << "*" << g.name() << " t=" << ts[i];
    }
  }
}

TEST(NumericMellin, RejectsBadInterval)
{
  EXPECT_THROW(numeric_mellin(DensitySpec::beta21(), 0.5, 0.0, Truncation{ 1.0, 0.5 }),
               argument_error);
  EXPECT_THROW(numeric_mellin(DensitySpec::no_error(), 0.5, 0.0, Truncation{ 0.5, 2.0 }),
               domain_error);
}

TEST(Sample, RejectsNonPositive)
{
  EXPECT_THROW(Sample({ 1.0, 0.0 }), argument_error);
  EXPECT_THROW(Sample({ 1.0, -2.0 }), argument_error);
  EXPECT_THROW(Sample({ std::nan("") }), argument_error);
  const Sample s({ 2.0, 3.0 });
  EXPECT_NEAR(s.logs()[1], std::log(3.0), 1e-15);
}

TEST(Weight, SquaredWeights)
{
  const double c = 0.5, t = 0.4;
  const double w2 = two_pi * two_pi * t * t;
  EXPECT_EQ(weight_sq(WeightSpec::unit(), c, t), 1.0);
  EXPECT_NEAR(weight_sq(WeightSpec::survival(), c, t), 1.0 / (0.25 + w2), 1e-15);
  // beta = 2: |(c+1+2pi i t)(c+2pi i t)|^2
  EXPECT_NEAR(weight_sq(WeightSpec::derivative(2), c, t), (2.25 + w2) * (0.25 + w2), 1e-12);
  EXPECT_THROW(weight_sq(WeightSpec::survival(), 1.0, 0.0), domain_error);
  EXPECT_THROW(WeightSpec::derivative(0), argument_error);
}
