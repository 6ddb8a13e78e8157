#ifndef RRS_SAMPLERS_HPP
#define RRS_SAMPLERS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rrs/dists.hpp"
#include "rrs/rng.hpp"

namespace rrs {

struct RejectionDraw {
  std::vector<double> x;
  long trials = 0;
  double u = 0.0;  // accepted uniform, for the subgraph-uniformity property
};

//! Classical rejection sampling; C must dominate f_prop/g everywhere.
//! An observed ratio above C aborts with RatioExceedsBound (clamping would
//! silently bias the output law).
RejectionDraw rejection_sample(const TargetDensity& target, const Proposal& prop,
                               double C, RandomStream& stream);

struct TerminalDraw {
  std::vector<double> x;
  long n_draws = 0;
  double total_weight = 0.0;
};

//! Memory-efficient RRS: iterate X ~ g, S += w(X) until S > t, return last X.
TerminalDraw rrs_terminal(const TargetDensity& target, const Proposal& prop,
                          double t, RandomStream& stream);

//! Full RRS path: all draws X_n, weights W_n and compensated partial sums T_n,
//! with T_{N(t)} > t >= T_{N(t)-1}.
struct RegenPath {
  int dim = 1;
  std::vector<double> draws;  // stop_index x dim, row-major
  std::vector<double> weights;
  std::vector<double> partials;
  double threshold = 0.0;
  long stop_index = 0;

  std::span<const double> draw(long i) const {
    return {draws.data() + static_cast<std::size_t>(i) * dim,
            static_cast<std::size_t>(dim)};
  }
};

RegenPath rrs_path(const TargetDensity& target, const Proposal& prop, double t,
                   RandomStream& stream);

//! Sub-sampled RRS: one long run, the i-th output is the draw active when the
//! running weight sum first exceeds i*t.  A draw whose weight spans several
//! thresholds is emitted once per threshold crossed.
std::vector<double> rrs_subsampled(const TargetDensity& target,
                                   const Proposal& prop, double t,
                                   long n_samples, RandomStream& stream,
                                   long* proposal_draws = nullptr);

struct ChainTrace {
  int dim = 1;
  std::vector<double> states;  // n x dim, row-major
  std::vector<std::uint8_t> accepts;
  double acceptance_rate = 0.0;

  long n() const { return static_cast<long>(accepts.size()); }
  std::span<const double> state(long i) const {
    return {states.data() + static_cast<std::size_t>(i) * dim,
            static_cast<std::size_t>(dim)};
  }
  std::vector<double> component(int j) const;
};

//! Independence sampler: proposals from g, alpha = min{1, w(y)/w(x)}.
ChainTrace imh_chain(const TargetDensity& target, const Proposal& prop,
                     long n_steps, std::span<const double> x0,
                     RandomStream& stream);

using StepSampler = std::function<void(RandomStream&, std::span<double>)>;

//! Random walk Metropolis with a symmetric step: alpha = min{1, f(y)/f(x)};
//! proposals outside the support are rejected.
ChainTrace rwm_chain(const TargetDensity& target, const StepSampler& step,
                     long n_steps, std::span<const double> x0,
                     RandomStream& stream);

//! Autocorrelation with the biased (divide-by-n) normalization, lags 0..max_lag.
std::vector<double> acf(std::span<const double> series, int max_lag);

struct CycleMoments {
  double mu = 0.0, mu2 = 0.0, mu3 = 0.0;
  long n = 0;
  double se_mu = 0.0, se_mu2 = 0.0, se_mu3 = 0.0;
};

//! Plug-in moments of the cycle length W = f_prop(X)/g(X) from M i.i.d.
//! proposal draws; optionally keeps the raw W sample (external KDE input).
CycleMoments cycle_moments(const TargetDensity& target, const Proposal& prop,
                           long M, RandomStream& stream,
                           std::vector<double>* w_out = nullptr);

//! Replicated version on disjoint streams with order-fixed reduction.
CycleMoments cycle_moments_parallel(const TargetDensity& target,
                                    const Proposal& prop, long M,
                                    std::uint64_t seed, std::uint32_t purpose,
                                    int workers,
                                    std::vector<double>* w_out = nullptr);

//! LLN threshold rule t = ((n_target + burnin) / n_sub) * mu_W.
double threshold_select(long n_target, long burnin, long n_sub, double mu_W);

//! Convergence-regime heuristic: the ratio of the largest to the smallest
//! batch variance of W across disjoint batches.  Heavy-tailed cycle laws
//! (no finite second moment) blow the ratio up; flagged, never hard-asserted.
struct MomentStability {
  bool stable = true;
  double spread = 0.0;  // max batch variance / min batch variance
  std::vector<double> batch_means;
};

MomentStability moment_stability(const TargetDensity& target,
                                 const Proposal& prop, long M, int batches,
                                 RandomStream& stream, double threshold = 5.0);

}  // namespace rrs

#endif
