#pragma once

#include "errors.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>

namespace mellin_qfe {

using complex = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

//! Default development point of the Mellin transform.
inline constexpr double default_c = 0.5;

//! Weight family omega of the quadratic functional; only omega^2 enters.
struct WeightSpec
{
  enum class Kind
  {
    Unit,
    Survival,
    Derivative
  };

  Kind kind = Kind::Unit;
  int beta = 0;

  static WeightSpec unit() { return {}; }
  static WeightSpec survival() { return { Kind::Survival, 0 }; }
  static WeightSpec derivative(int beta)
  {
    if (beta < 1)
      throw argument_error("derivative weight requires beta >= 1");
    return { Kind::Derivative, beta };
  }

  //! Polynomial order a with omega(t) ~ |t|^a for large |t|.
  double exponent() const
  {
    switch (kind) {
      case Kind::Unit:
        return 0.0;
      case Kind::Survival:
        return -1.0;
      case Kind::Derivative:
        return static_cast<double>(beta);
    }
    return 0.0;
  }

  std::string name() const
  {
    switch (kind) {
      case Kind::Unit:
        return "unit";
      case Kind::Survival:
        return "survival";
      case Kind::Derivative:
        return "derivative:" + std::to_string(beta);
    }
    return "unit";
  }

  friend bool operator==(const WeightSpec&, const WeightSpec&) = default;
};

//! omega^2(t) for the given weight at development point c.
inline double weight_sq(const WeightSpec& w, double c, double t)
{
  const double four_pi2_t2 = two_pi * two_pi * t * t;
  switch (w.kind) {
    case WeightSpec::Kind::Unit:
      return 1.0;
    case WeightSpec::Kind::Survival: {
      const double d = (c - 1.0) * (c - 1.0) + four_pi2_t2;
      if (d == 0.0)
        throw domain_error("survival weight has a pole at c = 1, t = 0");
      return 1.0 / d;
    }
    case WeightSpec::Kind::Derivative: {
      if (w.beta < 1)
        throw argument_error("derivative weight requires beta >= 1");
      double p = 1.0;
      for (int j = 1; j <= w.beta; ++j) {
        const double a = c + w.beta - j;
        p *= a * a + four_pi2_t2;
      }
      return p;
    }
  }
  return 1.0;
}

//! Catalog of laws with closed-form Mellin transforms. Serves both as signal
//! density f and as error density g.
struct DensitySpec
{
  enum class Law
  {
    Beta21,
    LogNormal,
    Pareto1,
    Uniform01,
    NoError
  };

  Law law = Law::Beta21;
  double mu = 0.0;
  double sigma = 1.0;

  static DensitySpec beta21() { return { Law::Beta21 }; }
  static DensitySpec pareto1() { return { Law::Pareto1 }; }
  static DensitySpec uniform01() { return { Law::Uniform01 }; }
  static DensitySpec no_error() { return { Law::NoError }; }
  static DensitySpec lognormal(double mu = 0.0, double sigma = 1.0)
  {
    if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mu))
      throw argument_error("lognormal requires finite mu and sigma > 0");
    return { Law::LogNormal, mu, sigma };
  }

  std::string name() const
  {
    switch (law) {
      case Law::Beta21:
        return "beta21";
      case Law::Pareto1:
        return "pareto1";
      case Law::Uniform01:
        return "uniform01";
      case Law::NoError:
        return "none";
      case Law::LogNormal: {
        std::ostringstream os;
        os << "lognormal(" << mu << "," << sigma << ")";
        return os.str();
      }
    }
    return "?";
  }

  friend bool operator==(const DensitySpec& a, const DensitySpec& b)
  {
    if (a.law != b.law)
      return false;
    return a.law != Law::LogNormal || (a.mu == b.mu && a.sigma == b.sigma);
  }
};

//! Throws unless the Mellin transform of `d` exists at c.
inline void check_mellin_validity(const DensitySpec& d, double c)
{
  if (!std::isfinite(c))
    throw domain_error("development point c must be finite");
  switch (d.law) {
    case DensitySpec::Law::Beta21:
      if (!(c > -1.0))
        throw domain_error("beta21 Mellin transform requires c > -1");
      break;
    case DensitySpec::Law::Pareto1:
      if (!(c < 2.0))
        throw domain_error("pareto1 Mellin transform requires c < 2");
      break;
    case DensitySpec::Law::Uniform01:
      if (!(c > 0.0))
        throw domain_error("uniform01 Mellin transform requires c > 0");
      break;
    case DensitySpec::Law::LogNormal:
    case DensitySpec::Law::NoError:
      break;
  }
}

//! Closed-form M_c[h](t) for a catalog law, with z = c - 1 + 2*pi*i*t.
inline complex analytic_mellin(const DensitySpec& d, double c, double t)
{
  check_mellin_validity(d, c);
  const complex z(c - 1.0, two_pi * t);
  switch (d.law) {
    case DensitySpec::Law::Beta21:
      return 2.0 / (z + 2.0);
    case DensitySpec::Law::Pareto1:
      return 1.0 / (1.0 - z);
    case DensitySpec::Law::Uniform01:
      return 1.0 / (z + 1.0);
    case DensitySpec::Law::LogNormal:
      return std::exp(d.sigma * d.sigma * z * z / 2.0 + d.mu * z);
    case DensitySpec::Law::NoError:
      return 1.0;
  }
  return 1.0;
}

//! E[X^s] for X with law `d`; throws moment_error when it is infinite.
inline double moment(const DensitySpec& d, double s)
{
  try {
    check_mellin_validity(d, s + 1.0);
  } catch (const domain_error& e) {
    std::ostringstream os;
    os << "E[X^" << s << "] is infinite for " << d.name() << " (" << e.what() << ")";
    throw moment_error(os.str());
  }
  return analytic_mellin(d, s + 1.0, 0.0).real();
}

inline bool moment_is_finite(const DensitySpec& d, double s)
{
  try {
    moment(d, s);
    return true;
  } catch (const moment_error&) {
    return false;
  }
}

//! Probability density function; NoError (point mass) has none.
inline double pdf(const DensitySpec& d, double x)
{
  switch (d.law) {
    case DensitySpec::Law::Beta21:
      return (x > 0.0 && x < 1.0) ? 2.0 * x : 0.0;
    case DensitySpec::Law::Pareto1:
      return x > 1.0 ? 1.0 / (x * x) : 0.0;
    case DensitySpec::Law::Uniform01:
      return (x > 0.0 && x < 1.0) ? 1.0 : 0.0;
    case DensitySpec::Law::LogNormal: {
      if (!(x > 0.0))
        return 0.0;
      const double u = (std::log(x) - d.mu) / d.sigma;
      return std::exp(-0.5 * u * u) / (x * d.sigma * std::sqrt(two_pi));
    }
    case DensitySpec::Law::NoError:
      throw domain_error("the point mass at 1 has no density");
  }
  return 0.0;
}

//! Support of the law in log-space, truncated to a finite interval where
//! the law itself has unbounded log-support.
inline std::pair<double, double> log_support(const DensitySpec& d)
{
  switch (d.law) {
    case DensitySpec::Law::Beta21:
    case DensitySpec::Law::Uniform01:
      return { -80.0, 0.0 };
    case DensitySpec::Law::Pareto1:
      return { 0.0, 80.0 };
    case DensitySpec::Law::LogNormal:
      return { d.mu - 14.0 * d.sigma, d.mu + 14.0 * d.sigma };
    case DensitySpec::Law::NoError:
      return { 0.0, 0.0 };
  }
  return { 0.0, 0.0 };
}

} // namespace mellin_qfe
