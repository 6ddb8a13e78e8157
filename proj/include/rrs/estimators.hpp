#ifndef RRS_ESTIMATORS_HPP
#define RRS_ESTIMATORS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rrs/samplers.hpp"

namespace rrs {

//! One regenerative cycle: v = h(X) * W, w = W.
struct CyclePair {
  double v = 0.0;
  double w = 0.0;
};

using PointFn = std::function<double(std::span<const double>)>;

//! Ratio over n = 1..N(t), last (inspected) cycle included: bias O(1/t^2).
double ratio_fixed_time(const RegenPath& path, const PointFn& h);
//! Same ratio over n = 1..N(t)-1: bias of order 1/t.
double ratio_drop_last(const RegenPath& path, const PointFn& h);
double ratio_fixed_cycles(std::span<const CyclePair> pairs);

struct Tavc {
  double s2 = 0.0;     // s11 - 2 q s12 + q^2 s22 -> E[Z^2]
  double eta2 = 0.0;   // s2 / Wbar^2  (fixed-cycle-count scale)
  double sigma2 = 0.0; // s2 / Wbar    (fixed-time scale)
};

Tavc tavc_estimate(std::span<const CyclePair> pairs, double q_hat);

//! q_hat +- z_{(1+level)/2} sqrt(sigma2 / t).
std::pair<double, double> confidence_interval(double q_hat, double sigma2,
                                              double t, double level);

//! Non-asymptotic bound sqrt((16/3) K^2 mu3 mu2 (mu2/t + mu) / mu^3) / t^{3/2}.
double bias_bound(double K, double mu, double mu2, double mu3, double t);

struct RatioEstimate {
  double value = 0.0;
  long n_cycles = 0;
  double t = 0.0;
  double eta2 = 0.0;
  double sigma2 = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double level = 0.95;
  std::optional<double> bias_bound_value;
};

//! One RRS run to time t plus interval and bound; the moments feeding the
//! bound come from an independent cycle_moments run, never from this path.
RatioEstimate estimate_quantity(const TargetDensity& target,
                                const Proposal& prop, const PointFn& h,
                                double t, double level, double K,
                                const CycleMoments& indep_moments,
                                RandomStream& stream);

struct BiasSweepRow {
  double t = 0.0;
  double bias_fixed_time = 0.0;
  double bias_drop_last = 0.0;
  double bound = 0.0;
  double stderr_fixed = 0.0;
  double stderr_drop = 0.0;
  double q_ref = 0.0;
  bool pass = true;  // |bias_fixed_time| <= bound
};

//! Replicated bias measurement on a t grid.  Each replicate runs one path to
//! max(t_grid) and reads every t off it (common random numbers across the
//! grid); the exactly-mean-zero Wald control (sum Z_n)/t, with coefficients
//! from a pilot on reserved streams, strips most of the O(1/sqrt(M)) noise so
//! the O(1/t^2) signal stays above the floor.  q_ref comes from quadrature.
//! Replicates where N(t) = 1 contribute no drop-last estimate.
std::vector<BiasSweepRow> bias_sweep(const TargetDensity& target,
                                     const Proposal& prop, const PointFn& h,
                                     double K, std::span<const double> t_grid,
                                     long M, double q_ref, std::uint64_t seed,
                                     int workers);

struct McmcBiasRow {
  double n_steps = 0.0;
  double bias = 0.0;
  double stderr_ = 0.0;
};

//! Bias of the time average (1/N) sum h(X_n) of the independence sampler
//! started at x0, measured against a coupled stationary twin: the twin starts
//! from an exact rejection-sampling draw, both chains share every proposal
//! and acceptance uniform, and the difference is accumulated until the chains
//! coalesce.  E[(1/N) sum (h(X_n) - h(X'_n))] is exactly the bias.
std::vector<McmcBiasRow> mcmc_bias_reference(
    const TargetDensity& target, const Proposal& prop, double C_exact,
    const PointFn& h, std::span<const long> N_grid, long M, double x0,
    std::uint64_t seed, int workers);

}  // namespace rrs

#endif
