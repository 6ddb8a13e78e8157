#ifndef RRS_EXPERIMENTS_HPP
#define RRS_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rrs/coupling.hpp"
#include "rrs/estimators.hpp"
#include "rrs/probit.hpp"
#include "rrs/renewal.hpp"
#include "rrs/samplers.hpp"
#include "rrs/table.hpp"

namespace rrs {

//! One named empirical-vs-oracle check (renewal-verify CSV row).
struct VerifyRow {
  std::string check;
  double t = 0.0;
  double empirical = 0.0;
  double oracle = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct RenewalVerifyOptions {
  long traces_en = 10'000;    // E[N(50)] check
  long traces_tv = 1'000'000; // empirical TV checks
  long traces_ks = 100'000;   // KS checks
  long traces_lln = 1'000;    // CLT-envelope check
};

std::vector<VerifyRow> renewal_verify(const RenewalVerifyOptions& opts,
                                      std::uint64_t seed, int workers);

//! Importance-form TV estimate between an empirical sample of p and the
//! density q, using the two closed-form evaluators: mean of (1 - q/p)^+.
double tv_estimate(std::span<const double> sample, const ScalarFn& p_density,
                   const ScalarFn& q_density);

//! Target/proposal pairs used across the experiments and the CLI.
struct SamplingPair {
  TargetDensity target;
  Proposal prop;
  std::optional<double> rs_constant;  // C for classical rejection sampling
};

//! name: gamma-exp | gamma-exp-rs | synthetic-bounded | synthetic-unbounded
SamplingPair make_pair(const std::string& name);

struct ProbitOptions {
  std::string method = "rrs";        // rrs | gibbs
  double prior_inv_var = 0.0;        // 0 = flat
  double xi = 2.0;
  double alpha2 = 5.0;
  long n_samples = 10'000;
  long burnin = 1'000;               // gibbs only
  std::optional<double> t;           // absent = auto-select
  long moment_draws = 1'000'000;     // auto-t moment sample
  std::string data_path;             // empty = embedded table
};

struct ProbitResult {
  Eigen::VectorXd map;
  double grad_norm = 0.0;
  Eigen::MatrixXd hessian;
  double t_used = 0.0;
  double mu_w = 0.0;
  std::vector<double> samples;  // n x k
  int dim = 3;
  std::vector<ComponentSummary> summary;
  long proposal_draws = 0;
  double wall_seconds = 0.0;
  double samples_per_second = 0.0;
};

ProbitResult probit_run(const ProbitOptions& opts, std::uint64_t seed,
                        int workers);

struct BenchReport {
  std::string method;
  long reps = 0;
  long samples_per_rep = 0;
  long proposal_draws = 0;
  double wall_seconds = 0.0;
  double samples_per_second = 0.0;  // mean over reps
};

//! Samples-per-second comparison on the probit task.  Only the ordering
//! of samples/sec is asserted; magnitudes are hardware-bound.
std::vector<BenchReport> bench_probit(const std::vector<std::string>& methods,
                                      long reps, long n_samples,
                                      std::uint64_t seed, int workers);

}  // namespace rrs

#endif
