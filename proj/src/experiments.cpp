#include "rrs/experiments.hpp"

#include <chrono>
#include <cmath>

#include "rrs/errors.hpp"
#include "rrs/math.hpp"
#include "rrs/parallel.hpp"

namespace rrs {

namespace {

constexpr std::uint32_t kPurposeRenewal = 10;
constexpr std::uint32_t kPurposeProbitMoments = 60;
constexpr std::uint32_t kPurposeProbitChain = 61;
constexpr std::uint32_t kPurposeBench = 62;

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

double tv_estimate(std::span<const double> sample, const ScalarFn& p_density,
                   const ScalarFn& q_density) {
  KahanSum s;
  for (double x : sample) {
    const double p = p_density(x);
    if (p <= 0.0) continue;
    s.add(std::max(0.0, 1.0 - q_density(x) / p));
  }
  return s.total() / static_cast<double>(sample.size());
}

std::vector<VerifyRow> renewal_verify(const RenewalVerifyOptions& opts,
                                      std::uint64_t seed, int workers) {
  std::vector<VerifyRow> rows;
  const PoissonOracle pois = poisson_oracle(1.0);
  const Gamma2Oracle g2 = gamma2_oracle(1.0);
  const ScalarSampler exp1 = [](RandomStream& s) { return s.exponential(1.0); };
  const ScalarSampler gamma21 = [](RandomStream& s) {
    return s.exponential(1.0) + s.exponential(1.0);
  };

  // E[N(50)] for Exp(1) against U(t) = 1 + lambda t.
  {
    const double t = 50.0;
    std::vector<double> counts(static_cast<std::size_t>(opts.traces_en));
    parallel_replicates(opts.traces_en, workers, [&](std::int64_t r) {
      RandomStream stream = make_stream(seed, kPurposeRenewal, static_cast<std::uint64_t>(r));
      const RenewalTrace trace = simulate_renewal(exp1, nullptr, t + 1.0, stream);
      counts[static_cast<std::size_t>(r)] =
          static_cast<double>(state_at(trace, t).n);
    });
    rows.push_back({"exp1_mean_N", t, mean(counts), pois.U(t), 0.3, false});
  }

  // Quadrature: L1 distance between the corrected f_R^t and f0 vs 2*tv(t).
  for (double t : {1.0, 2.0, 3.0}) {
    const double l1 = integrate_semi_inf(
        [&](double x) { return std::abs(g2.f_R(t, x) - g2.f0(x)); }, 0.0, 1e-12);
    rows.push_back({"gamma2_l1_quadrature", t, l1, 2.0 * g2.tv(t), 1e-6, false});
  }

  // Empirical TV of R(t) vs the closed form, importance estimator.
  for (double t : {1.0, 2.0, 3.0}) {
    std::vector<double> residuals(static_cast<std::size_t>(opts.traces_tv));
    parallel_replicates(opts.traces_tv, workers, [&](std::int64_t r) {
      RandomStream stream =
          make_stream(seed, kPurposeRenewal + 1 + static_cast<std::uint32_t>(t),
                      static_cast<std::uint64_t>(r));
      const RenewalTrace trace = simulate_renewal(gamma21, nullptr, t + 0.5, stream);
      residuals[static_cast<std::size_t>(r)] = state_at(trace, t).residual;
    });
    const double tv_hat = tv_estimate(
        residuals, [&](double x) { return g2.f_R(t, x); },
        [&](double x) { return g2.f0(x); });
    const double tv_ref = g2.tv(t);
    rows.push_back(
        {"gamma2_tv_empirical", t, tv_hat, tv_ref, 0.15 * tv_ref, false});
  }

  // Exp(1): R(17) is exactly Exp(1) at every t.
  {
    const double t = 17.0;
    std::vector<double> residuals(static_cast<std::size_t>(opts.traces_ks));
    parallel_replicates(opts.traces_ks, workers, [&](std::int64_t r) {
      RandomStream stream = make_stream(seed, kPurposeRenewal + 5, static_cast<std::uint64_t>(r));
      const RenewalTrace trace = simulate_renewal(exp1, nullptr, t + 1.0, stream);
      residuals[static_cast<std::size_t>(r)] = state_at(trace, t).residual;
    });
    const double ks =
        ks_statistic(residuals, [&](double x) { return pois.F0(x); });
    rows.push_back({"exp1_R17_ks", t, ks, 0.0, 0.006, false});
  }

  // Stationarity: Gamma(2,1) delayed by F0 keeps R(t) ~ F0 at every t.
  for (double t : {0.5, 2.0, 7.0}) {
    const ScalarSampler delay = [&](RandomStream& s) { return g2.sample_f0(s); };
    std::vector<double> residuals(static_cast<std::size_t>(opts.traces_ks));
    parallel_replicates(opts.traces_ks, workers, [&](std::int64_t r) {
      RandomStream stream =
          make_stream(seed, kPurposeRenewal + 6 + static_cast<std::uint32_t>(2 * t),
                      static_cast<std::uint64_t>(r));
      const RenewalTrace trace = simulate_renewal(gamma21, &delay, t + 0.5, stream);
      residuals[static_cast<std::size_t>(r)] = state_at(trace, t).residual;
    });
    const double ks =
        ks_statistic(residuals, [&](double x) { return g2.F0(x); });
    rows.push_back({"gamma2_stationary_delay_ks", t, ks, 0.0, 0.01, false});
  }

  // LLN with the CLT envelope at t = 1e4: within 3 sigma in >= 99% of traces.
  {
    const double t = 1e4;
    struct Fam {
      const char* name;
      const ScalarSampler* sampler;
      double mu, sigma;
    };
    const Fam fams[] = {{"exp1_lln_envelope", &exp1, 1.0, 1.0},
                        {"gamma2_lln_envelope", &gamma21, 2.0, std::sqrt(2.0)}};
    for (const auto& fam : fams) {
      std::vector<double> ok(static_cast<std::size_t>(opts.traces_lln));
      const double bound = 3.0 * fam.sigma / (std::pow(fam.mu, 1.5) * std::sqrt(t));
      parallel_replicates(opts.traces_lln, workers, [&](std::int64_t r) {
        RandomStream stream = make_stream(seed, kPurposeRenewal + 13,
                                          (fam.mu > 1.5 ? 1u << 30 : 0u) + static_cast<std::uint64_t>(r));
        const RenewalTrace trace = simulate_renewal(*fam.sampler, nullptr, t + 4.0, stream);
        const double rate = static_cast<double>(state_at(trace, t).n) / t;
        ok[static_cast<std::size_t>(r)] =
            std::abs(rate - 1.0 / fam.mu) <= bound ? 1.0 : 0.0;
      });
      rows.push_back({fam.name, t, mean(ok), 1.0, 0.01, false});
    }
  }

  // Renewal-equation solver: first-order Richardson ratio 2 +- 0.2.
  {
    const ScalarFn z = [](double t) { return std::exp(-t); };
    const ScalarFn f = [](double t) { return std::exp(-t); };
    const double t_max = 5.0;
    double err[3];
    double step = 0.02;
    for (int i = 0; i < 3; ++i, step /= 2.0) {
      const auto Z = solve_renewal_equation(z, f, step, t_max);
      err[i] = std::abs(Z.back() - 1.0);
    }
    const double ratio = 0.5 * (err[0] / err[1] + err[1] / err[2]);
    rows.push_back({"renewal_eq_richardson", t_max, ratio, 2.0, 0.2, false});
  }

  for (auto& row : rows) {
    const double err = std::abs(row.empirical - row.oracle);
    row.pass = err <= row.tolerance;
  }
  return rows;
}

SamplingPair make_pair(const std::string& name) {
  SamplingPair pair;
  if (name == "gamma-exp") {
    pair.target = gamma_target(2.0, 1.0);
    pair.prop = exp_proposal(1.0);
  } else if (name == "gamma-exp-rs") {
    pair.target = gamma_target(2.0, 1.0);
    pair.prop = exp_proposal(0.4);
    pair.rs_constant = 1.6;
  } else if (name == "synthetic-bounded") {
    pair.target = synthetic_target(true);
    pair.prop = truncated_laplace2d_proposal(4.0, pair.target.support);
  } else if (name == "synthetic-unbounded") {
    pair.target = synthetic_target(false);
    pair.prop = laplace2d_proposal(4.0);
  } else {
    throw Error("unknown target/proposal pair: " + name);
  }
  return pair;
}

ProbitResult probit_run(const ProbitOptions& opts, std::uint64_t seed,
                        int workers) {
  const LupusData data = opts.data_path.empty()
                             ? load_lupus()
                             : parse_lupus(read_text(opts.data_path));
  const ProbitModel model = build_probit_model(data, opts.prior_inv_var);
  const int k = static_cast<int>(model.X_signed.cols());

  ProbitResult result;
  result.dim = k;
  const NewtonResult newton =
      map_newton(model, Eigen::VectorXd::Zero(k), 1e-8, 50);
  result.map = newton.mode;
  result.grad_norm = gradient(model, newton.mode).lpNorm<Eigen::Infinity>();
  result.hessian = newton.hessian_at_mode;

  const LaplaceProposal laplace = make_laplace_proposal(
      newton.mode, newton.hessian_at_mode, opts.alpha2, opts.xi);
  const TargetDensity target = probit_target(model, opts.xi);
  const Proposal prop = probit_proposal(laplace);

  if (opts.method == "gibbs") {
    result.t_used = 0.0;  // no threshold in the Gibbs pipeline
  } else if (opts.t.has_value()) {
    result.t_used = *opts.t;
  } else {
    const CycleMoments moments = cycle_moments_parallel(
        target, prop, opts.moment_draws, seed, kPurposeProbitMoments, workers);
    result.mu_w = moments.mu;
    result.t_used = threshold_select(opts.n_samples, 1000, opts.n_samples,
                                     moments.mu);
  }

  RandomStream chain_stream = make_stream(seed, kPurposeProbitChain, 0);
  const double t0 = now_seconds();
  if (opts.method == "rrs") {
    long draws = 0;
    result.samples = rrs_subsampled(target, prop, result.t_used,
                                    opts.n_samples, chain_stream, &draws);
    result.proposal_draws = draws;
  } else if (opts.method == "gibbs") {
    const ChainTrace trace =
        gibbs_probit(model, Eigen::VectorXd::Zero(k),
                     opts.burnin + opts.n_samples, chain_stream);
    result.samples.assign(
        trace.states.begin() + static_cast<std::ptrdiff_t>(opts.burnin) * k,
        trace.states.end());
    result.proposal_draws = opts.burnin + opts.n_samples;
  } else {
    throw Error("probit_run: unknown method " + opts.method);
  }
  result.wall_seconds = now_seconds() - t0;
  result.samples_per_second =
      static_cast<double>(opts.n_samples) / std::max(1e-9, result.wall_seconds);
  result.summary = posterior_summary(result.samples, k);
  return result;
}

std::vector<BenchReport> bench_probit(const std::vector<std::string>& methods,
                                      long reps, long n_samples,
                                      std::uint64_t seed, int workers) {
  const LupusData data = load_lupus();
  const ProbitModel model = build_probit_model(data, 0.0);
  const int k = static_cast<int>(model.X_signed.cols());
  const NewtonResult newton =
      map_newton(model, Eigen::VectorXd::Zero(k), 1e-8, 50);
  const LaplaceProposal laplace =
      make_laplace_proposal(newton.mode, newton.hessian_at_mode, 5.0, 2.0);
  const TargetDensity target = probit_target(model, 2.0);
  const Proposal prop = probit_proposal(laplace);
  const CycleMoments moments = cycle_moments_parallel(
      target, prop, 1'000'000, seed, kPurposeProbitMoments, workers);
  const double t = threshold_select(n_samples, 1000, n_samples, moments.mu);

  std::vector<BenchReport> reports;
  for (const auto& method : methods) {
    BenchReport report;
    report.method = method;
    report.reps = reps;
    report.samples_per_rep = n_samples;
    KahanSum rate_sum;
    const double t0 = now_seconds();
    for (long rep = 0; rep < reps; ++rep) {
      RandomStream stream =
          make_stream(seed, kPurposeBench, static_cast<std::uint64_t>(rep) |
                                               (method == "rrs" ? 0u : 1u << 30));
      const double r0 = now_seconds();
      if (method == "rrs") {
        long draws = 0;
        volatile double sink =
            rrs_subsampled(target, prop, t, n_samples, stream, &draws)[0];
        (void)sink;
        report.proposal_draws += draws;
      } else if (method == "gibbs") {
        const ChainTrace trace =
            gibbs_probit(model, Eigen::VectorXd::Zero(k), n_samples, stream);
        volatile double sink = trace.states[0];
        (void)sink;
        report.proposal_draws += n_samples;
      } else {
        throw Error("bench_probit: unknown method " + method);
      }
      rate_sum.add(static_cast<double>(n_samples) /
                   std::max(1e-9, now_seconds() - r0));
    }
    report.wall_seconds = now_seconds() - t0;
    report.samples_per_second = rate_sum.total() / static_cast<double>(reps);
    reports.push_back(report);
  }
  return reports;
}

}  // namespace rrs
