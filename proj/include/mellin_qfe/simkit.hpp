#pragma once

#include "adaptive.hpp"
#include "density.hpp"
#include "estimator.hpp"
#include "mellin.hpp"
#include "quad.hpp"
#include "rng.hpp"
#include "sample.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace mellin_qfe {

// ---------------------------------------------------------------------------
// Samplers

inline double beta21_from_uniform(double u) { return std::sqrt(u); }
inline double pareto1_from_uniform(double u) { return 1.0 / (1.0 - u); }

//! n iid draws from a catalog law. NoError yields all ones.
inline std::vector<double> draw(const DensitySpec& d, std::size_t n, CounterRng& rng)
{
  std::vector<double> out(n, 1.0);
  switch (d.law) {
    case DensitySpec::Law::Beta21:
      for (auto& x : out)
        x = beta21_from_uniform(rng.uniform());
      break;
    case DensitySpec::Law::Pareto1:
      for (auto& x : out)
        x = pareto1_from_uniform(rng.uniform());
      break;
    case DensitySpec::Law::Uniform01:
      for (auto& x : out)
        x = rng.uniform();
      break;
    case DensitySpec::Law::LogNormal:
      for (auto& x : out)
        x = std::exp(d.mu + d.sigma * rng.normal());
      break;
    case DensitySpec::Law::NoError:
      break;
  }
  return out;
}

inline Sample sample_signal(const DensitySpec& d, std::size_t n, CounterRng& rng)
{
  return Sample(draw(d, n, rng), SeedProvenance{ "splitmix64-counter", rng.key(),
                                                 static_cast<std::uint64_t>(StreamRole::Signal) });
}

inline Sample sample_error(const DensitySpec& d, std::size_t n, CounterRng& rng)
{
  return Sample(draw(d, n, rng), SeedProvenance{ "splitmix64-counter", rng.key(),
                                                 static_cast<std::uint64_t>(StreamRole::Error) });
}

//! Elementwise product Y_j = X_j U_j.
inline Sample sample_y(std::span<const double> x, std::span<const double> u)
{
  if (x.size() != u.size())
    throw argument_error("sample_y: signal and error samples differ in length");
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    y[i] = x[i] * u[i];
  return Sample(std::move(y));
}

inline Sample sample_y(const Sample& x, const Sample& u)
{
  return sample_y(x.values(), u.values());
}

//! Observations for replicate `rep` of size n, from the (seed, n, rep)
//! substreams.
inline Sample draw_observations(const DensitySpec& signal, const DensitySpec& error,
                                std::size_t n, std::uint64_t seed,
                                std::uint64_t rep)
{
  CounterRng rx(seed, n, rep, StreamRole::Signal);
  CounterRng ru(seed, n, rep, StreamRole::Error);
  const auto x = draw(signal, n, rx);
  const auto u = draw(error, n, ru);
  auto y = sample_y(x, u);
  return Sample(std::vector<double>(y.values().begin(), y.values().end()),
                SeedProvenance{ "splitmix64-counter", seed, rep });
}

// ---------------------------------------------------------------------------
// Oracle quantities (require the true signal law)

//! theta_k = int_{-k}^{k} |M_c[f](t)|^2 omega^2(t) dt
inline double theta_k(const DensitySpec& signal, double c, const WeightSpec& weight,
                      double k, const QuadratureRule& rule = {})
{
  check_mellin_validity(signal, c);
  return quad::integrate_even(
    [&](double t) { return std::norm(analytic_mellin(signal, c, t)) * weight_sq(weight, c, t); },
    k, rule);
}

//! theta = int_R |M_c[f](t)|^2 omega^2(t) dt. Integrates [0, 8] and then
//! doubling shells [T, 2T] until a shell contributes less than `tol`, and
//! closes with a power-law tail estimate.
inline double true_theta(const DensitySpec& signal, double c, const WeightSpec& weight,
                         double tol = 1e-10)
{
  check_mellin_validity(signal, c);
  auto f = [&](double t) {
    return std::norm(analytic_mellin(signal, c, t)) * weight_sq(weight, c, t);
  };
  double T = 8.0;
  double total = quad::integrate_even(f, T, QuadratureRule{ quad::Scheme::GaussLegendre, 64, 64 });
  for (;;) {
    const double inc = 2.0 * quad::integrate(f, T, 2.0 * T, 64);
    total += inc;
    T *= 2.0;
    if (std::abs(inc) < tol)
      break;
    if (T > 1e12)
      throw numeric_error("true_theta: tail of |M_c[f]|^2 omega^2 does not converge");
  }
  const double fT = f(T), f2T = f(2.0 * T);
  if (fT > 0.0 && f2T > 0.0) {
    const double p = std::log2(fT / f2T); // local decay exponent
    if (p > 1.0)
      total += 2.0 * fT * T / (p - 1.0);
  }
  return total;
}

struct ThetaBias
{
  double theta = 0.0;
  double theta_k = 0.0;
  //! (theta - theta_k)^2
  double bias_sq = 0.0;
};

inline ThetaBias theta_k_and_bias(const DensitySpec& signal, double c,
                                  const WeightSpec& weight, double k,
                                  const QuadratureRule& rule = {})
{
  ThetaBias tb;
  tb.theta = true_theta(signal, c, weight);
  tb.theta_k = theta_k(signal, c, weight, k, rule);
  const double b = tb.theta - tb.theta_k;
  tb.bias_sq = b * b;
  return tb;
}

//! Lambda_{f,g}(k) = int_{-k}^{k} |M_c[f]|^2 / |M_c[g]|^2 omega^4 dt
inline double lambda_fg(const DensitySpec& signal, const DensitySpec& error, double c,
                        const WeightSpec& weight, double k,
                        const QuadratureRule& rule = {})
{
  check_mellin_validity(signal, c);
  check_mellin_validity(error, c);
  return quad::integrate_even(
    [&](double t) {
      const double w2 = weight_sq(weight, c, t);
      return std::norm(analytic_mellin(signal, c, t)) / std::norm(analytic_mellin(error, c, t)) *
             w2 * w2;
    },
    k, rule);
}

//! E[Y^s] = E[X^s] E[U^s]; throws moment_error if either factor diverges.
inline double moment_y(const DensitySpec& signal, const DensitySpec& error, double s)
{
  return moment(signal, s) * moment(error, s);
}

//! sigma_{f,g} = max(1, E[Y^{2c-2}])
inline double sigma_fg(const DensitySpec& signal, const DensitySpec& error, double c)
{
  return std::max(1.0, moment_y(signal, error, 2.0 * c - 2.0));
}

// ---------------------------------------------------------------------------
// Error decomposition theta_hat_k - theta = U_k + 2 W_k - (theta - theta_k)

struct DecompositionResult
{
  double theta_hat = 0.0;
  double theta = 0.0;
  double theta_k = 0.0;
  double u_k = 0.0;
  double w_k = 0.0;
  double residual = 0.0;
};

//! Computes U_k (literal double sum over j != l) and W_k from their defining
//! integrals with M_c[f_Y] = M_c[f] M_c[g], and returns the residual of the
//! decomposition identity.
inline DecompositionResult decomposition_check(const Sample& sample,
                                               const DensitySpec& signal,
                                               const DensitySpec& error, double c,
                                               const WeightSpec& weight, double k,
                                               const QuadratureRule& rule = {})
{
  const std::size_t n = sample.size();
  if (n < 2)
    throw argument_error("decomposition_check requires n >= 2");
  const auto logs = sample.logs();
  const double nn = static_cast<double>(n);
  std::vector<complex> a(n);

  auto centred = [&](double t, complex my) {
    for (std::size_t j = 0; j < n; ++j) {
      const double mag = std::exp((c - 1.0) * logs[j]);
      const double ph = two_pi * t * logs[j];
      a[j] = complex(mag * std::cos(ph), mag * std::sin(ph)) - my;
    }
  };

  DecompositionResult r;
  r.u_k = quad::integrate_even(
    [&](double t) {
      const complex mf = analytic_mellin(signal, c, t);
      const complex mg = analytic_mellin(error, c, t);
      centred(t, mf * mg);
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = 0; l < n; ++l)
          if (j != l)
            s += (a[j] * std::conj(a[l])).real();
      return s / (nn * (nn - 1.0)) * weight_sq(weight, c, t) / std::norm(mg);
    },
    k, rule);
  r.w_k = quad::integrate_even(
    [&](double t) {
      const complex mf = analytic_mellin(signal, c, t);
      const complex mg = analytic_mellin(error, c, t);
      centred(t, mf * mg);
      complex s = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        s += a[j];
      return (s / nn * std::conj(mf) / mg).real() * weight_sq(weight, c, t);
    },
    k, rule);
  r.theta_hat = estimate_theta(sample, c, weight, error, k, rule);
  r.theta_k = theta_k(signal, c, weight, k, rule);
  r.theta = true_theta(signal, c, weight);
  r.residual = (r.theta_hat - r.theta) - (r.u_k + 2.0 * r.w_k - (r.theta - r.theta_k));
  return r;
}

// ---------------------------------------------------------------------------
// Monte Carlo

//! Runs fn(i) for i in [0, count) on up to `jobs` threads.
template<typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn)
{
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i)
      fn(i);
    return;
  }
  std::atomic<std::size_t> next{ 0 };
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned t = std::min<unsigned>(jobs, static_cast<unsigned>(count));
  for (unsigned i = 0; i < t; ++i)
    pool.emplace_back(worker);
  for (auto& th : pool)
    th.join();
  if (failure)
    std::rethrow_exception(failure);
}

//! theta_hat at each k of `ks` for `reps` replicates of size n; result is
//! indexed [replicate][k].
inline std::vector<std::vector<double>>
mc_estimates(const DensitySpec& signal, const DensitySpec& error, double c,
             const WeightSpec& weight, const std::vector<double>& ks, std::size_t n,
             std::size_t reps, std::uint64_t seed, const QuadratureRule& rule = {},
             unsigned jobs = 1)
{
  std::vector<std::vector<double>> out(reps);
  const KGrid grid(ks);
  parallel_for(reps, jobs, [&](std::size_t r) {
    const Sample y = draw_observations(signal, error, n, seed, r);
    out[r] = estimate_curve(y, c, weight, error, grid, rule).theta_hats();
  });
  return out;
}

struct MeanSe
{
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_and_se(const std::vector<double>& v)
{
  MeanSe m;
  const double n = static_cast<double>(v.size());
  for (double x : v)
    m.mean += x;
  m.mean /= n;
  double ss = 0.0;
  for (double x : v)
    ss += (x - m.mean) * (x - m.mean);
  m.se = v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return m;
}

struct VarianceBoundResult
{
  bool flagged = false;
  std::string reason;
  double empirical_mse = 0.0;
  double mse_se = 0.0;
  double bound = 0.0;
  double bias_sq = 0.0;
  double variance_part = 0.0;
};

//! Monte Carlo MSE of theta_hat_k against bias^2 + 2 c_g sigma^2
//! (Delta_psi/n^2 + Lambda/n). Settings whose constants are infinite are
//! flagged and not simulated.
inline VarianceBoundResult variance_bound_check(const DensitySpec& signal,
                                                const DensitySpec& error, double c,
                                                const WeightSpec& weight, double k,
                                                std::size_t n, std::size_t reps,
                                                std::uint64_t seed,
                                                const QuadratureRule& rule = {},
                                                unsigned jobs = 1)
{
  VarianceBoundResult res;
  double cg = 0.0, sig = 0.0;
  try {
    cg = error_constant_cg(c, error);
    sig = sigma_fg(signal, error, c);
  } catch (const domain_error& e) {
    res.flagged = true;
    res.reason = e.what();
    return res;
  }
  const auto tb = theta_k_and_bias(signal, c, weight, k, rule);
  const double nn = static_cast<double>(n);
  res.bias_sq = tb.bias_sq;
  res.variance_part = 2.0 * cg * sig * sig *
                      (saturate(delta_four(c, weight, error, k, rule)) / (nn * nn) +
                       lambda_fg(signal, error, c, weight, k, rule) / nn);
  res.bound = res.bias_sq + res.variance_part;
  const auto est = mc_estimates(signal, error, c, weight, { k }, n, reps, seed, rule, jobs);
  std::vector<double> sq;
  for (const auto& row : est)
    sq.push_back((row[0] - tb.theta) * (row[0] - tb.theta));
  const auto ms = mean_and_se(sq);
  res.empirical_mse = ms.mean;
  res.mse_se = ms.se;
  return res;
}

// ---------------------------------------------------------------------------
// Experiments

enum class ExperimentMode
{
  FixedK,
  Adaptive,
  Both
};

inline std::string to_string(ExperimentMode m)
{
  switch (m) {
    case ExperimentMode::FixedK:
      return "fixed";
    case ExperimentMode::Adaptive:
      return "adaptive";
    case ExperimentMode::Both:
      return "both";
  }
  return "both";
}

struct ExperimentSpec
{
  std::string name = "setting";
  DensitySpec signal = DensitySpec::beta21();
  DensitySpec error = DensitySpec::pareto1();
  double c = default_c;
  WeightSpec weight;
  std::vector<long> n_list{ 100, 500 };
  std::size_t replications = 50;
  KGrid grid = KGrid::range(0.1, 2.0, 0.1);
  double kappa = default_kappa;
  std::uint64_t seed = 20240601;
  ExperimentMode mode = ExperimentMode::Both;
  PenaltyMode penalty_mode = PenaltyMode::Full;
  bool stopping = true;
  QuadratureRule rule;

  void validate() const
  {
    if (replications < 1)
      throw argument_error("replications must be >= 1");
    if (n_list.empty())
      throw argument_error("n_list must be nonempty");
    for (long n : n_list)
      if (n < 2)
        throw argument_error("every sample size must be >= 2");
    if (!(kappa >= 0.0))
      throw argument_error("kappa must be nonnegative");
    rule.validate();
    check_mellin_validity(signal, c);
    check_mellin_validity(error, c);
  }

  bool adaptive() const { return mode != ExperimentMode::FixedK; }
};

struct ReplicateRecord
{
  std::size_t replicate = 0;
  long n = 0;
  std::vector<double> theta_hat;
  std::optional<SelectionResult> selection;
  double sigma_hat_sq = 0.0;
  bool sigma_unstable = false;
  double runtime_seconds = 0.0;
  std::string error;
};

//! Moment conditions the adaptive penalty relies on.
struct ExperimentFlags
{
  //! E[Y^{4(c-1)}] infinite: sigma_hat^2 targets an infinite parameter
  bool sigma_moment_divergent = false;
  //! E[Y^{8(c-1)}] infinite
  bool high_moment_divergent = false;
};

inline ExperimentFlags experiment_flags(const ExperimentSpec& spec)
{
  ExperimentFlags f;
  f.sigma_moment_divergent =
    !(moment_is_finite(spec.signal, 4.0 * (spec.c - 1.0)) &&
      moment_is_finite(spec.error, 4.0 * (spec.c - 1.0)));
  f.high_moment_divergent =
    !(moment_is_finite(spec.signal, 8.0 * (spec.c - 1.0)) &&
      moment_is_finite(spec.error, 8.0 * (spec.c - 1.0)));
  return f;
}

namespace detail {

struct ExperimentContext
{
  SpectralProfile profile;
  double c_g = 1.0;
  std::optional<double> sigma_partial;
};

inline ReplicateRecord run_replicate(const ExperimentSpec& spec,
                                     const ExperimentContext& ctx, long n,
                                     std::size_t rep)
{
  ReplicateRecord rec;
  rec.replicate = rep;
  rec.n = n;
  const auto start = std::chrono::steady_clock::now();
  try {
    const Sample y = draw_observations(spec.signal, spec.error,
                                       static_cast<std::size_t>(n), spec.seed, rep);
    const auto report = estimate_curve(y, spec.c, spec.weight, spec.error, spec.grid, spec.rule);
    rec.theta_hat = report.theta_hats();
    rec.sigma_hat_sq = sigma_hat_sq(y, spec.c);
    rec.sigma_unstable =
      sigma_hat_jackknife_spread(y, spec.c) > jackknife_warning_threshold;
    if (spec.adaptive()) {
      const double sigma_term = spec.penalty_mode == PenaltyMode::Partial
                                  ? ctx.sigma_partial.value()
                                  : rec.sigma_hat_sq;
      const auto table = build_penalty_table(ctx.profile, n, spec.kappa,
                                             spec.penalty_mode, ctx.c_g, sigma_term);
      rec.selection = spec.stopping ? select_with_stopping(report, table)
                                    : contrast_and_select(report, table);
    }
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  rec.runtime_seconds =
    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

} // namespace detail

//! All replicates for every n of the spec, ordered by (n, replicate).
//! Records are deterministic functions of (seed, n, replicate).
inline std::vector<ReplicateRecord> run_experiment(const ExperimentSpec& spec,
                                                   unsigned jobs = 1)
{
  spec.validate();
  detail::ExperimentContext ctx;
  if (spec.adaptive()) {
    ctx.profile = spectral_profile(spec.c, spec.weight, spec.error, spec.grid, spec.rule);
    ctx.c_g = error_constant_cg(spec.c, spec.error);
    if (spec.penalty_mode == PenaltyMode::Partial)
      ctx.sigma_partial = sigma_fg(spec.signal, spec.error, spec.c);
  }
  const std::size_t reps = spec.replications;
  std::vector<ReplicateRecord> out(spec.n_list.size() * reps);
  parallel_for(out.size(), jobs, [&](std::size_t i) {
    out[i] = detail::run_replicate(spec, ctx, spec.n_list[i / reps], i % reps);
  });
  return out;
}

} // namespace mellin_qfe
