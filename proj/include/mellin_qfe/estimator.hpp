#pragma once

#include "density.hpp"
#include "quad.hpp"
#include "sample.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace mellin_qfe {

//! Finite, strictly increasing grid of positive candidate cut-offs.
class KGrid
{
public:
  KGrid() = default;

  explicit KGrid(std::vector<double> points)
    : points_(std::move(points))
  {
    if (points_.empty())
      throw argument_error("k-grid must be nonempty");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!(points_[i] > 0.0) || !std::isfinite(points_[i]))
        throw argument_error("k-grid points must be finite and positive");
      if (i > 0 && !(points_[i] > points_[i - 1]))
        throw argument_error("k-grid must be strictly increasing");
    }
  }

  //! from, from+step, ..., up to `to` (inclusive within rounding); values
  //! are rounded to 12 decimals so 0.1-steps do not accumulate drift.
  static KGrid range(double from, double to, double step)
  {
    if (!(step > 0.0))
      throw argument_error("k-grid step must be positive");
    std::vector<double> pts;
    for (long i = 0;; ++i) {
      double k = std::round((from + i * step) * 1e12) / 1e12;
      if (k > to + 1e-9)
        break;
      pts.push_back(k);
    }
    return KGrid(std::move(pts));
  }

  std::size_t size() const { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }
  const std::vector<double>& points() const { return points_; }
  double front() const { return points_.front(); }
  double back() const { return points_.back(); }

  //! The grid restricted to points <= m.
  KGrid truncated(double m) const
  {
    std::vector<double> pts;
    for (double k : points_)
      if (k <= m)
        pts.push_back(k);
    if (pts.empty())
      pts.push_back(points_.front());
    return KGrid(std::move(pts));
  }

  friend bool operator==(const KGrid&, const KGrid&) = default;

private:
  std::vector<double> points_;
};

//! theta_hat for every grid point, plus the setting it was computed under.
struct EstimationReport
{
  struct Entry
  {
    double k = 0.0;
    double theta_hat = 0.0;
    double theta_hat_clipped = 0.0;
  };

  std::vector<Entry> per_k;
  double c = default_c;
  WeightSpec weight;
  DensitySpec error_spec;

  std::vector<double> ks() const
  {
    std::vector<double> v;
    for (const auto& e : per_k)
      v.push_back(e.k);
    return v;
  }
  std::vector<double> theta_hats() const
  {
    std::vector<double> v;
    for (const auto& e : per_k)
      v.push_back(e.theta_hat);
    return v;
  }
};

namespace detail {

//! Per-observation magnitudes Y_j^{c-1}, and Q = sum_j Y_j^{2(c-1)}.
struct PreparedSample
{
  std::vector<double> logs;
  std::vector<double> mags;
  double q = 0.0;

  PreparedSample(const Sample& s, double c)
    : logs(s.logs().begin(), s.logs().end())
  {
    mags.reserve(logs.size());
    for (double l : logs) {
      const double m = std::exp((c - 1.0) * l);
      mags.push_back(m);
      q += m * m;
    }
  }

  //! |S(t)|^2 - Q with S(t) = sum_j Y_j^{c-1+2 pi i t}; this is the
  //! off-diagonal sum over j != l of Y_j^{..+2pi i t} Y_l^{..-2pi i t}.
  double offdiagonal(double t) const
  {
    double re = 0.0, im = 0.0;
    const double w = two_pi * t;
    for (std::size_t j = 0; j < logs.size(); ++j) {
      const double phase = w * logs[j];
      re += mags[j] * std::cos(phase);
      im += mags[j] * std::sin(phase);
    }
    return re * re + im * im - q;
  }
};

inline double spectral_factor(const WeightSpec& weight, const DensitySpec& error,
                              double c, double t)
{
  const double mg = std::abs(analytic_mellin(error, c, t));
  if (!(mg >= 1e-300)) {
    std::ostringstream os;
    os.precision(17);
    os << "|M_c[g](t)| vanishes at t = " << t;
    throw ill_posed_error(os.str());
  }
  return weight_sq(weight, c, t) / (mg * mg);
}

inline double estimate_prepared(const PreparedSample& ps, double c,
                                 const WeightSpec& weight,
                                 const DensitySpec& error, double k,
                                 const QuadratureRule& rule)
{
  const double n = static_cast<double>(ps.logs.size());
  const double norm = n * (n - 1.0);
  return quad::integrate_even(
    [&](double t) {
      return ps.offdiagonal(t) / norm * spectral_factor(weight, error, c, t);
    },
    k, rule);
}

template<typename Fn>
auto tag_with_k(double k, Fn&& fn)
{
  auto prefix = [k] {
    std::ostringstream os;
    os << "k = " << k << ": ";
    return os.str();
  };
  try {
    return fn();
  } catch (const ill_posed_error& e) {
    throw ill_posed_error(prefix() + e.what());
  } catch (const numeric_error& e) {
    throw numeric_error(prefix() + e.what());
  } catch (const domain_error& e) {
    throw domain_error(prefix() + e.what());
  }
}

inline void check_estimation_inputs(const Sample& sample, double c,
                                    const WeightSpec& weight,
                                    const DensitySpec& error)
{
  if (sample.size() < 2)
    throw argument_error("need n >= 2 observations, got " +
                         std::to_string(sample.size()));
  check_mellin_validity(error, c);
  if (weight.kind == WeightSpec::Kind::Derivative && weight.beta < 1)
    throw argument_error("derivative weight requires beta >= 1");
}

} // namespace detail

//! Bias-corrected spectral cut-off estimate of the weighted quadratic
//! functional at cut-off k. The raw value may be negative.
inline double estimate_theta(const Sample& sample, double c,
                             const WeightSpec& weight, const DensitySpec& error,
                             double k, const QuadratureRule& rule = {})
{
  detail::check_estimation_inputs(sample, c, weight, error);
  const detail::PreparedSample ps(sample, c);
  return detail::estimate_prepared(ps, c, weight, error, k, rule);
}

//! estimate_theta over a whole grid, sharing the per-sample precomputation.
inline EstimationReport estimate_curve(const Sample& sample, double c,
                                       const WeightSpec& weight,
                                       const DensitySpec& error,
                                       const KGrid& grid,
                                       const QuadratureRule& rule = {})
{
  detail::check_estimation_inputs(sample, c, weight, error);
  if (grid.size() == 0)
    throw argument_error("k-grid must be nonempty");
  const detail::PreparedSample ps(sample, c);
  EstimationReport rep;
  rep.c = c;
  rep.weight = weight;
  rep.error_spec = error;
  rep.per_k.reserve(grid.size());
  for (double k : grid.points()) {
    const double th = detail::tag_with_k(
      k, [&] { return detail::estimate_prepared(ps, c, weight, error, k, rule); });
    rep.per_k.push_back({ k, th, std::max(th, 0.0) });
  }
  return rep;
}

} // namespace mellin_qfe
