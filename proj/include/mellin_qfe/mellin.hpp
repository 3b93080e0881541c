#pragma once

#include "density.hpp"
#include "quad.hpp"
#include "sample.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <utility>

namespace mellin_qfe {

//! y^{c-1+2*pi*i*t}, evaluated in log-polar form.
inline complex mellin_power(double y, double c, double t)
{
  if (!(y > 0.0))
    throw domain_error("mellin_power requires y > 0");
  const double ly = std::log(y);
  const double mag = std::exp((c - 1.0) * ly);
  const double phase = two_pi * t * ly;
  return { mag * std::cos(phase), mag * std::sin(phase) };
}

//! n^{-1} sum_j Y_j^{c-1+2*pi*i*t}
inline complex empirical_mellin(const Sample& sample, double c, double t)
{
  if (sample.empty())
    throw argument_error("empirical_mellin requires a nonempty sample");
  double re = 0.0, im = 0.0;
  for (double ly : sample.logs()) {
    const double mag = std::exp((c - 1.0) * ly);
    const double phase = two_pi * t * ly;
    re += mag * std::cos(phase);
    im += mag * std::sin(phase);
  }
  const double n = static_cast<double>(sample.size());
  return { re / n, im / n };
}

//! Finite integration range [lo, hi] in x-space. lo == 0 is allowed.
struct Truncation
{
  double lo = 0.0;
  double hi = 1.0;
};

//! Quadrature of int_lo^hi h(x) x^{c-1+2*pi*i*t} dx, computed in u = ln x so
//! the oscillation is uniform. A lower bound of 0 is replaced by hi*e^-64.
//! The integrand should be smooth on the open interval; split at kinks.
template<typename F>
  requires std::invocable<F&, double>
complex numeric_mellin(F&& density, double c, double t, Truncation range,
                       double panels_per_unit = 0.0)
{
  if (!(range.hi > range.lo) || range.lo < 0.0 || !std::isfinite(range.hi))
    throw argument_error("numeric_mellin: invalid truncation interval");
  const double ub = std::log(range.hi);
  const double ua = range.lo > 0.0 ? std::log(range.lo) : ub - 64.0;
  if (panels_per_unit <= 0.0)
    panels_per_unit = 8.0 + 2.0 * std::abs(t);
  const auto panels =
    static_cast<std::size_t>(std::ceil((ub - ua) * panels_per_unit));
  const auto ns = quad::gauss_legendre_nodes(ua, ub, std::max<std::size_t>(panels, 4));
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double u = ns.t[i];
    const double x = std::exp(u);
    const double h = density(x);
    const double mag = h * std::exp(c * u); // h(x) x^{c-1} dx = h x^c du
    const double phase = two_pi * t * u;
    re += ns.w[i] * mag * std::cos(phase);
    im += ns.w[i] * mag * std::sin(phase);
  }
  if (!std::isfinite(re) || !std::isfinite(im))
    throw numeric_error("numeric_mellin: quadrature is not finite");
  return { re, im };
}

//! numeric_mellin for a catalog law's pdf.
inline complex numeric_mellin(const DensitySpec& d, double c, double t,
                              Truncation range, double panels_per_unit = 0.0)
{
  if (d.law == DensitySpec::Law::NoError)
    throw domain_error("numeric_mellin: the point mass at 1 has no density");
  return numeric_mellin([&d](double x) { return pdf(d, x); }, c, t, range,
                        panels_per_unit);
}

//! Truncation interval whose analytic tail mass in
//! int |h(x)| x^{c-1} dx stays below tol / 10.
inline Truncation default_truncation(const DensitySpec& d, double c, double tol)
{
  check_mellin_validity(d, c);
  const double eps = tol / 10.0;
  switch (d.law) {
    case DensitySpec::Law::Beta21: {
      // int_0^L 2 x^c dx = 2 L^{c+1} / (c+1)
      const double L = std::pow(eps * (c + 1.0) / 2.0, 1.0 / (c + 1.0));
      return { std::max(L, std::numeric_limits<double>::min()), 1.0 };
    }
    case DensitySpec::Law::Uniform01: {
      const double L = std::pow(eps * c, 1.0 / c);
      return { std::max(L, std::numeric_limits<double>::min()), 1.0 };
    }
    case DensitySpec::Law::Pareto1: {
      // int_T^inf x^{c-3} dx = T^{c-2} / (2-c)
      const double T = std::pow(eps * (2.0 - c), 1.0 / (c - 2.0));
      return { 1.0, std::min(T, std::numeric_limits<double>::max()) };
    }
    case DensitySpec::Law::LogNormal: {
      // in u = ln x the integrand is scale * N(mu + c sigma^2, sigma^2)
      const double scale =
        std::exp(c * d.mu + 0.5 * c * c * d.sigma * d.sigma);
      const double z = std::sqrt(2.0 * std::log(std::max(10.0, scale / eps))) + 1.0;
      const double centre = d.mu + c * d.sigma * d.sigma;
      return { std::exp(centre - z * d.sigma), std::exp(centre + z * d.sigma) };
    }
    case DensitySpec::Law::NoError:
      throw domain_error("the point mass at 1 has no density");
  }
  return {};
}

} // namespace mellin_qfe
