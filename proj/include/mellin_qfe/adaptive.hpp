#pragma once

#include "density.hpp"
#include "estimator.hpp"
#include "quad.hpp"
#include "sample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mellin_qfe {

inline constexpr double default_kappa = 0.00001;

//! Extended-precision type for the spectral and penalty quantities. For
//! super-smooth errors 1/|M_c[g]|^4 leaves the double range on moderate grids.
using wide = long double;

//! Narrows to double, mapping values beyond the double range to +-infinity.
inline double saturate(wide v)
{
  constexpr wide top = std::numeric_limits<double>::max();
  if (v > top)
    return std::numeric_limits<double>::infinity();
  if (v < -top)
    return -std::numeric_limits<double>::infinity();
  return static_cast<double>(v);
}

// ---------------------------------------------------------------------------
// Spectral quantities of the error law

inline constexpr double delta_four_rel_tol = 1e-12;
inline constexpr int delta_four_max_refinements = 10;

//! int_{-k}^{k} omega^4(t) / |M_c[g](t)|^4 dt. Starting from `rule`, the node
//! density is doubled until two successive values agree to delta_four_rel_tol.
inline wide delta_four(double c, const WeightSpec& weight,
                       const DensitySpec& error, double k,
                       const QuadratureRule& rule = {})
{
  check_mellin_validity(error, c);
  auto f = [&](double t) {
    const wide r = detail::spectral_factor(weight, error, c, t);
    return r * r;
  };
  QuadratureRule q = rule;
  wide prev = quad::integrate_even(f, k, q);
  for (int i = 0; i < delta_four_max_refinements; ++i) {
    q = q.refined();
    const wide next = quad::integrate_even(f, k, q);
    if (std::abs(next - prev) <= delta_four_rel_tol * std::abs(next))
      return next;
    prev = next;
  }
  throw numeric_error("Delta_psi did not converge under node refinement");
}

//! sup_{|t|<=k} (omega(t) / |M_c[g](t)|)^4; k = 0 evaluates at t = 0.
inline wide delta_inf(double c, const WeightSpec& weight,
                        const DensitySpec& error, double k,
                        int scan_density = 256)
{
  check_mellin_validity(error, c);
  return quad::sup_on_interval(
    [&](double t) {
      const wide r = detail::spectral_factor(weight, error, c, t);
      return r * r;
    },
    k, scan_density);
}

//! omega_k = 2 k^3 max(1, Delta_inf(k) / n)
inline wide omega_rate(double k, double n, wide delta_inf_k)
{
  return wide(2) * k * k * k * std::max(wide(1), delta_inf_k / n);
}

//! L(k) = max(log omega_k, log 2). The clamp keeps the penalty positive on
//! fractional grids with k < 1; it is inactive for k >= 1.
inline wide clamped_log(wide omega_k)
{
  return std::max(std::log(omega_k), std::numbers::ln2_v<wide>);
}

// ---------------------------------------------------------------------------
// Moment constants

//! sigma_hat^2 = 1 + n^{-1} sum_j Y_j^{4(c-1)}
inline double sigma_hat_sq(const Sample& sample, double c)
{
  if (sample.empty())
    throw argument_error("sigma_hat_sq requires a nonempty sample");
  double s = 0.0;
  for (double l : sample.logs())
    s += std::exp(4.0 * (c - 1.0) * l);
  return 1.0 + s / static_cast<double>(sample.size());
}

//! Range of the jackknife pseudo-values of sigma_hat^2 relative to its value.
//! Large values mean a single observation dominates the moment estimate.
inline double sigma_hat_jackknife_spread(const Sample& sample, double c)
{
  if (sample.size() < 2)
    return 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double l : sample.logs()) {
    const double m = std::exp(4.0 * (c - 1.0) * l);
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  // pseudo-value j equals 1 + Y_j^{4(c-1)}
  return (hi - lo) / sigma_hat_sq(sample, c);
}

inline constexpr double jackknife_warning_threshold = 10.0;

//! c_g = max(1, ||g||_{L_inf(x^{2c-1})} / ||g||_{L_1(x^{2c-2})}); the point
//! mass uses the convention c_g = 1.
inline double error_constant_cg(double c, const DensitySpec& error)
{
  switch (error.law) {
    case DensitySpec::Law::NoError:
      return 1.0;
    case DensitySpec::Law::Pareto1:
      // sup_{x>1} x^{2c-3} = 1 and int_1^inf x^{2c-4} = 1/(3-2c)
      if (!(c < 1.5))
        throw domain_error("pareto1: c_g requires c < 1.5");
      return std::max(1.0, 3.0 - 2.0 * c);
    case DensitySpec::Law::Beta21:
      // sup_{0<x<1} 2 x^{2c} = 2 and int_0^1 2 x^{2c-1} = 1/c
      if (!(c > 0.0))
        throw domain_error("beta21: c_g requires c > 0");
      return std::max(1.0, 2.0 * c);
    case DensitySpec::Law::Uniform01:
      // sup_{0<x<1} x^{2c-1} = 1 and int_0^1 x^{2c-2} = 1/(2c-1)
      if (!(c > 0.5))
        throw domain_error("uniform01: c_g requires c > 0.5");
      return std::max(1.0, 2.0 * c - 1.0);
    case DensitySpec::Law::LogNormal:
      // both norms carry exp((2c-2)mu + (2c-2)^2 sigma^2 / 2); the ratio is
      // the lognormal mode height in log-space
      return std::max(1.0, 1.0 / (error.sigma * std::sqrt(two_pi)));
  }
  return 1.0;
}

// ---------------------------------------------------------------------------
// Penalties

enum class PenaltyMode
{
  Partial,
  Full
};

inline std::string to_string(PenaltyMode m)
{
  return m == PenaltyMode::Partial ? "partial" : "full";
}

//! Constant term added inside the penalty's second factor:
//! c_g^2 sigma_{f,g}^2 (Partial) or 2 sigma_hat^2 c_g^2 (Full).
inline double penalty_constant_term(PenaltyMode mode, double c_g, double sigma_term)
{
  return mode == PenaltyMode::Partial ? c_g * c_g * sigma_term * sigma_term
                                      : 2.0 * sigma_term * c_g * c_g;
}

namespace detail {

inline wide dimension_price(double k, double n, wide omega_k, wide L)
{
  const wide r = std::max(wide(1), omega_k * L * std::max(wide(2) * k, L) / n);
  return r * r;
}

} // namespace detail

//! V(k) (Partial) or V_hat(k) (Full) given the precomputed spectral terms.
inline wide penalty(double k, double n, wide delta_four_k, wide delta_inf_k,
                    wide omega_k, double kappa, double constant_term)
{
  const wide L = clamped_log(omega_k);
  return wide(kappa) * L / (wide(n) * n) * std::max(delta_four_k, L * delta_inf_k) *
         (constant_term + detail::dimension_price(k, n, omega_k, L));
}

//! V_bar(k) = rho_{k,n} (Delta_psi(k) v L(k) Delta_inf(k)); free of f.
inline wide vbar(double k, double n, wide delta_four_k, wide delta_inf_k,
                 wide omega_k)
{
  const wide L = clamped_log(omega_k);
  const wide rho = L * detail::dimension_price(k, n, omega_k, L);
  return rho * std::max(delta_four_k, L * delta_inf_k);
}

//! Grid point at which V_bar is anchored: the smallest point >= 1, or the
//! largest point if the whole grid lies below 1.
inline std::size_t vbar_reference_index(const KGrid& grid)
{
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] >= 1.0)
      return i;
  return grid.size() - 1;
}

//! Largest grid point k with V_bar(k) <= n^2 V_bar(k_ref); never below the
//! first grid point.
inline double m_upper(const KGrid& grid, double n, std::span<const wide> vbars)
{
  if (grid.size() == 0 || vbars.size() != grid.size())
    throw argument_error("m_upper: grid and V_bar sizes differ");
  const wide bound = wide(n) * n * vbars[vbar_reference_index(grid)];
  double m = grid.front();
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (vbars[i] <= bound)
      m = grid[i];
  return m;
}

//! Delta_psi and Delta_inf over a grid; independent of n and of the sample.
struct SpectralProfile
{
  KGrid grid;
  std::vector<wide> delta_four;
  std::vector<wide> delta_inf;
};

inline SpectralProfile spectral_profile(double c, const WeightSpec& weight,
                                        const DensitySpec& error,
                                        const KGrid& grid,
                                        const QuadratureRule& rule = {})
{
  SpectralProfile p;
  p.grid = grid;
  for (double k : grid.points()) {
    detail::tag_with_k(k, [&] {
      p.delta_four.push_back(delta_four(c, weight, error, k, rule));
      p.delta_inf.push_back(delta_inf(c, weight, error, k));
      return 0;
    });
  }
  return p;
}

struct PenaltyTable
{
  struct Row
  {
    double k = 0.0;
    wide delta_four = 0;
    wide delta_inf = 0;
    wide omega_k = 0;
    wide log_omega_clamped = 0;
    wide vbar = 0;
    wide penalty = 0;
  };

  std::vector<Row> per_k;
  double kappa = default_kappa;
  long n = 0;
  PenaltyMode mode = PenaltyMode::Full;
  double c_g = 1.0;
  //! sigma_{f,g} in Partial mode, sigma_hat^2 in Full mode
  double sigma_term = 1.0;
  double m_upper = 0.0;

  std::vector<double> ks() const
  {
    std::vector<double> v;
    for (const auto& r : per_k)
      v.push_back(r.k);
    return v;
  }
  //! Penalties narrowed to double for the selection step.
  std::vector<double> penalties() const
  {
    std::vector<double> v;
    for (const auto& r : per_k)
      v.push_back(saturate(r.penalty));
    return v;
  }
};

//! Throws numeric_error when a structural invariant of the table fails.
inline void check_penalty_table(const PenaltyTable& t)
{
  constexpr double slack = 1e-9;
  for (std::size_t i = 0; i < t.per_k.size(); ++i) {
    const auto& r = t.per_k[i];
    const wide vals[] = { r.delta_four, r.delta_inf, r.omega_k,
                          r.log_omega_clamped, r.vbar };
    for (wide v : vals)
      if (!(v > 0.0) || !std::isfinite(v))
        throw numeric_error("penalty table: non-positive or non-finite entry at k = " +
                            std::to_string(r.k));
    if (!(r.penalty >= 0.0) || !std::isfinite(r.penalty))
      throw numeric_error("penalty table: invalid penalty at k = " + std::to_string(r.k));
    if (r.delta_four > 2.0 * r.k * r.delta_inf * (1.0 + slack))
      throw numeric_error("penalty table: Delta_psi > 2k Delta_inf at k = " +
                          std::to_string(r.k));
    if (i > 0) {
      const auto& p = t.per_k[i - 1];
      if (!(r.k > p.k) || r.delta_four < p.delta_four * (1.0 - slack) ||
          r.delta_inf < p.delta_inf * (1.0 - slack) ||
          r.omega_k < p.omega_k * (1.0 - slack) || r.vbar < p.vbar * (1.0 - slack))
        throw numeric_error("penalty table: monotonicity fails at k = " +
                            std::to_string(r.k));
    }
  }
}

//! Assembles the penalty table for sample size n. `sigma_term` is
//! sigma_{f,g} in Partial mode and sigma_hat^2 in Full mode.
inline PenaltyTable build_penalty_table(const SpectralProfile& profile, long n,
                                        double kappa, PenaltyMode mode,
                                        double c_g, double sigma_term)
{
  if (n < 1)
    throw argument_error("penalty table requires n >= 1");
  if (!(kappa >= 0.0))
    throw argument_error("kappa must be nonnegative");
  if (!std::isfinite(sigma_term))
    throw moment_error("penalty: the moment term is not finite");
  PenaltyTable t;
  t.kappa = kappa;
  t.n = n;
  t.mode = mode;
  t.c_g = c_g;
  t.sigma_term = sigma_term;
  const double nn = static_cast<double>(n);
  const double cterm = penalty_constant_term(mode, c_g, sigma_term);
  std::vector<wide> vb;
  for (std::size_t i = 0; i < profile.grid.size(); ++i) {
    PenaltyTable::Row r;
    r.k = profile.grid[i];
    r.delta_four = profile.delta_four[i];
    r.delta_inf = profile.delta_inf[i];
    r.omega_k = omega_rate(r.k, nn, r.delta_inf);
    r.log_omega_clamped = clamped_log(r.omega_k);
    r.vbar = vbar(r.k, nn, r.delta_four, r.delta_inf, r.omega_k);
    r.penalty = penalty(r.k, nn, r.delta_four, r.delta_inf, r.omega_k, kappa, cterm);
    vb.push_back(r.vbar);
    t.per_k.push_back(r);
  }
  t.m_upper = m_upper(profile.grid, nn, vb);
  check_penalty_table(t);
  return t;
}

// ---------------------------------------------------------------------------
// Goldenshluger-Lepski selection

struct SelectionResult
{
  struct ContrastRow
  {
    double k = 0.0;
    double A = 0.0;
    double objective = 0.0;
  };

  double k_hat = 0.0;
  std::vector<ContrastRow> contrast;
  double m_upper_used = 0.0;
  double theta_at_k_hat = 0.0;
  //! the stopping rule removed part of the grid
  bool stopped = false;
  //! first grid point already had a negative estimate
  bool stopped_at_first = false;
  std::optional<double> stop_k;
};

//! A(k) = max_{k'} ((theta_{min(k,k')} - theta_{k'})^2 - V(k') - V(k))_+ and
//! k_hat = argmin A(k) + V(k), ties to the smallest k. Inputs are aligned
//! with the (already truncated) grid `ks`.
inline SelectionResult contrast_and_select(std::span<const double> ks,
                                           std::span<const double> theta_hat,
                                           std::span<const double> pen)
{
  const std::size_t m = ks.size();
  if (m == 0 || theta_hat.size() != m || pen.size() != m)
    throw argument_error("contrast_and_select: grids do not match");
  SelectionResult res;
  res.m_upper_used = ks[m - 1];
  std::size_t best = 0;
  double best_obj = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    double a = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double d = theta_hat[std::min(i, j)] - theta_hat[j];
      a = std::max(a, d * d - pen[j] - pen[i]);
    }
    const double obj = a + pen[i];
    res.contrast.push_back({ ks[i], a, obj });
    if (obj < best_obj) {
      best_obj = obj;
      best = i;
    }
  }
  res.k_hat = ks[best];
  res.theta_at_k_hat = theta_hat[best];
  return res;
}

namespace detail {

inline void check_same_grid(const EstimationReport& report, const PenaltyTable& table)
{
  if (report.per_k.size() != table.per_k.size())
    throw argument_error("report and penalty table have different grids");
  for (std::size_t i = 0; i < report.per_k.size(); ++i)
    if (report.per_k[i].k != table.per_k[i].k)
      throw argument_error("report and penalty table have different grids");
}

inline std::size_t count_upto(const EstimationReport& report, double m)
{
  std::size_t c = 0;
  while (c < report.per_k.size() && report.per_k[c].k <= m)
    ++c;
  return std::max<std::size_t>(c, 1);
}

} // namespace detail

//! Selection over the grid truncated at the table's M bound.
inline SelectionResult contrast_and_select(const EstimationReport& report,
                                           const PenaltyTable& table)
{
  detail::check_same_grid(report, table);
  const std::size_t m = detail::count_upto(report, table.m_upper);
  const auto ks = report.ks();
  const auto th = report.theta_hats();
  const auto pen = table.penalties();
  auto res = contrast_and_select(std::span(ks).first(m), std::span(th).first(m),
                                 std::span(pen).first(m));
  res.m_upper_used = table.m_upper;
  return res;
}

//! As contrast_and_select, but the grid is additionally cut just before the
//! first k with a negative raw estimate.
inline SelectionResult select_with_stopping(const EstimationReport& report,
                                            const PenaltyTable& table)
{
  detail::check_same_grid(report, table);
  std::size_t m = detail::count_upto(report, table.m_upper);
  std::optional<double> stop_k;
  for (std::size_t i = 0; i < m; ++i) {
    if (report.per_k[i].theta_hat < 0.0) {
      stop_k = report.per_k[i].k;
      m = i;
      break;
    }
  }
  if (m == 0) {
    SelectionResult res;
    res.k_hat = report.per_k.front().k;
    res.theta_at_k_hat = report.per_k.front().theta_hat;
    res.m_upper_used = table.m_upper;
    res.stopped = true;
    res.stopped_at_first = true;
    res.stop_k = stop_k;
    return res;
  }
  const auto ks = report.ks();
  const auto th = report.theta_hats();
  const auto pen = table.penalties();
  auto res = contrast_and_select(std::span(ks).first(m), std::span(th).first(m),
                                 std::span(pen).first(m));
  res.m_upper_used = table.m_upper;
  res.stopped = stop_k.has_value();
  res.stop_k = stop_k;
  return res;
}

// ---------------------------------------------------------------------------
// Oracle cut-off

//! Smoothness of the signal's Mellin transform: (1+t^2)^{s/2} (ordinary) or
//! exp(|t|^r) (super smooth).
struct Smoothness
{
  enum class Kind
  {
    Ordinary,
    Super
  };
  Kind kind = Kind::Ordinary;
  double value = 1.0;

  static Smoothness ordinary(double s) { return { Kind::Ordinary, s }; }
  static Smoothness super_smooth(double r) { return { Kind::Super, r }; }
};

//! omega^4(k)/s^4(k) with omega(k) ~ (1+k^2)^{a/2}.
inline double bias_branch(const Smoothness& sm, double a, double k)
{
  const double base = 1.0 + k * k;
  if (sm.kind == Smoothness::Kind::Ordinary)
    return std::pow(base, 2.0 * (a - sm.value));
  return std::pow(base, 2.0 * a) * std::exp(-4.0 * std::pow(k, sm.value));
}

struct OracleCutoff
{
  double k_star = 0.0;
  std::vector<double> risk; //!< R_n(k) on the grid
};

//! Grid argmin of R_n(k) = max(omega^4/s^4, (Delta_inf v Delta_psi)/n^2).
inline OracleCutoff oracle_k_star(const Smoothness& sm, double a, double n,
                                  double c, const WeightSpec& weight,
                                  const DensitySpec& error, const KGrid& grid,
                                  const QuadratureRule& rule = {})
{
  OracleCutoff out;
  double best = std::numeric_limits<double>::infinity();
  for (double k : grid.points()) {
    const wide var = std::max(delta_inf(c, weight, error, k),
                              delta_four(c, weight, error, k, rule)) /
                     (wide(n) * n);
    const double r = saturate(std::max(wide(bias_branch(sm, a, k)), var));
    out.risk.push_back(r);
    if (r < best) {
      best = r;
      out.k_star = k;
    }
  }
  return out;
}

} // namespace mellin_qfe
