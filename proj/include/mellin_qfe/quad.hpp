#pragma once

#include "errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

namespace mellin_qfe {

namespace quad {

enum class Scheme
{
  GaussLegendre,
  CompositeSimpson
};

inline std::string to_string(Scheme s)
{
  return s == Scheme::GaussLegendre ? "gauss-legendre" : "simpson";
}

inline Scheme scheme_from_string(const std::string& s)
{
  if (s == "gauss-legendre" || s == "gl")
    return Scheme::GaussLegendre;
  if (s == "simpson" || s == "composite-simpson")
    return Scheme::CompositeSimpson;
  throw argument_error("unknown quadrature scheme '" + s + "'");
}

//! Discretization of the integrals over [-k, k]. The node count on [0, k] is
//! max(min_nodes, ceil(nodes_per_unit * k)); Gauss-Legendre distributes the
//! nodes over panels of `panel_order` points each.
struct QuadratureRule
{
  Scheme scheme = Scheme::GaussLegendre;
  int nodes_per_unit = 64;
  int min_nodes = 64;

  static constexpr int panel_order = 16;

  void validate() const
  {
    if (nodes_per_unit < 1 || min_nodes < 1)
      throw argument_error("quadrature node counts must be positive");
  }

  QuadratureRule refined() const
  {
    QuadratureRule r = *this;
    r.nodes_per_unit *= 2;
    r.min_nodes *= 2;
    return r;
  }

  friend bool operator==(const QuadratureRule&, const QuadratureRule&) = default;
};

//! Nodes and weights for the Gauss-Legendre rule of order n on [-1, 1].
struct GaussLegendreTable
{
  std::vector<double> x;
  std::vector<double> w;
};

inline GaussLegendreTable compute_gauss_legendre(int n)
{
  GaussLegendreTable tab;
  tab.x.resize(n);
  tab.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16)
        break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0, p1 = z;
    for (int j = 2; j <= n; ++j) {
      double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    double wi = 2.0 / ((1.0 - z * z) * dp * dp);
    tab.x[i] = -z;
    tab.x[n - 1 - i] = z;
    tab.w[i] = wi;
    tab.w[n - 1 - i] = wi;
  }
  return tab;
}

inline const GaussLegendreTable& gauss_legendre_panel()
{
  static const GaussLegendreTable tab =
    compute_gauss_legendre(QuadratureRule::panel_order);
  return tab;
}

//! Quadrature nodes on [0, k] with weights summing to k.
struct NodeSet
{
  std::vector<double> t;
  std::vector<double> w;

  std::size_t size() const { return t.size(); }
};

inline std::size_t node_count(double k, const QuadratureRule& rule)
{
  auto scaled = static_cast<std::size_t>(std::ceil(rule.nodes_per_unit * k));
  return std::max<std::size_t>(static_cast<std::size_t>(rule.min_nodes), scaled);
}

//! Composite Gauss-Legendre nodes for [a, b] split into `panels` equal pieces.
inline NodeSet gauss_legendre_nodes(double a, double b, std::size_t panels)
{
  const auto& gl = gauss_legendre_panel();
  NodeSet ns;
  ns.t.reserve(panels * gl.x.size());
  ns.w.reserve(panels * gl.x.size());
  const double h = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      ns.t.push_back(mid + 0.5 * h * gl.x[i]);
      ns.w.push_back(0.5 * h * gl.w[i]);
    }
  }
  return ns;
}

inline NodeSet simpson_nodes(double a, double b, std::size_t intervals)
{
  if (intervals % 2 == 1)
    ++intervals;
  NodeSet ns;
  const double h = (b - a) / static_cast<double>(intervals);
  for (std::size_t i = 0; i <= intervals; ++i) {
    double c = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    ns.t.push_back(a + i * h);
    ns.w.push_back(c * h / 3.0);
  }
  return ns;
}

//! Nodes covering the half range [0, k] of a symmetric integral.
inline NodeSet half_range_nodes(double k, const QuadratureRule& rule)
{
  rule.validate();
  if (!(k >= 0.0) || !std::isfinite(k))
    throw argument_error("cut-off k must be finite and nonnegative");
  if (k == 0.0)
    return {};
  const std::size_t n = node_count(k, rule);
  if (rule.scheme == Scheme::GaussLegendre) {
    const std::size_t order = QuadratureRule::panel_order;
    return gauss_legendre_nodes(0.0, k, (n + order - 1) / order);
  }
  return simpson_nodes(0.0, k, n);
}

inline std::string describe_node(double t)
{
  std::ostringstream os;
  os.precision(17);
  os << t;
  return os.str();
}

//! Value type of an integrand; sums accumulate in this type.
template<typename F>
using result_of_t = std::decay_t<std::invoke_result_t<F&, double>>;

//! Integral of an even function over [-k, k], i.e. twice the integral over
//! [0, k].
template<typename F>
auto integrate_even(F&& f, double k, const QuadratureRule& rule = {})
{
  using R = result_of_t<F>;
  const NodeSet ns = half_range_nodes(k, rule);
  R sum = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const R v = f(ns.t[i]);
    if (!std::isfinite(v))
      throw numeric_error("non-finite integrand at t = " + describe_node(ns.t[i]));
    sum += ns.w[i] * v;
  }
  return R(2) * sum;
}

//! Composite Gauss-Legendre integral of f over a finite interval [a, b].
template<typename F>
auto integrate(F&& f, double a, double b, std::size_t panels)
{
  using R = result_of_t<F>;
  if (b <= a)
    return R(0);
  const NodeSet ns = gauss_legendre_nodes(a, b, std::max<std::size_t>(panels, 1));
  R sum = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const R v = f(ns.t[i]);
    if (!std::isfinite(v))
      throw numeric_error("non-finite integrand at x = " + describe_node(ns.t[i]));
    sum += ns.w[i] * v;
  }
  return sum;
}

//! Maximum of an even function over [-k, k]: uniform scan of [0, k] followed
//! by a golden-section refinement around the best scan point.
template<typename F>
auto sup_on_interval(F&& f, double k, int scan_density = 256)
{
  using R = result_of_t<F>;
  if (!(k >= 0.0) || !std::isfinite(k))
    throw argument_error("sup_on_interval: k must be finite and nonnegative");
  if (k == 0.0)
    return R(f(0.0));
  const auto points = std::max<std::size_t>(
    256, static_cast<std::size_t>(std::ceil(scan_density * k)));
  const double h = k / static_cast<double>(points - 1);
  std::size_t best = 0;
  R best_val = f(0.0);
  for (std::size_t i = 1; i < points; ++i) {
    const R v = f(i == points - 1 ? k : i * h);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double lo = best == 0 ? 0.0 : (best - 1) * h;
  double hi = best + 1 >= points ? k : (best + 1) * h;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  R f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-14 * std::max(1.0, k); ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    }
  }
  return std::max({ best_val, f1, f2 });
}

} // namespace quad

using quad::QuadratureRule;

} // namespace mellin_qfe
