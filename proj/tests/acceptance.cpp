// Acceptance suite: one criterion per function, one PASS/FAIL line per
// criterion, exit code = number of failures.  Run a single criterion with
// --criterion N (used by ctest), or everything with no arguments.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "rrs/cli.hpp"
#include "rrs/dists.hpp"
#include "rrs/errors.hpp"
#include "rrs/estimators.hpp"
#include "rrs/experiments.hpp"
#include "rrs/math.hpp"
#include "rrs/probit.hpp"
#include "rrs/samplers.hpp"
#include "rrs/table.hpp"

using namespace rrs;

namespace {

constexpr std::uint64_t kSeed = 20240815;
int g_workers = 0;

struct Criterion {
  bool ok = true;
  std::string name;

  explicit Criterion(std::string n) : name(std::move(n)) {}

  void check(bool pass, const std::string& detail) {
    std::printf("  %s %s\n", pass ? "pass" : "FAIL", detail.c_str());
    ok = ok && pass;
  }
  void note(const std::string& text) { std::printf("       %s\n", text.c_str()); }
  bool finish() const {
    std::printf("%s %s\n", ok ? "PASS" : "FAIL", name.c_str());
    return ok;
  }
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

// --------------------------------------------------------------------------
// C1: rejection-sampling acceptance probability.
bool criterion1() {
  Criterion c("[C1] rejection sampling acceptance 0.625 +- 0.005");
  const SamplingPair pair = make_pair("gamma-exp-rs");
  RandomStream stream = make_stream(kSeed, 1, 0);
  long accepted = 0, trials = 0;
  while (trials < 100000) {
    trials += rejection_sample(pair.target, pair.prop, *pair.rs_constant, stream).trials;
    ++accepted;
  }
  const double rate = double(accepted) / double(trials);
  c.check(std::abs(rate - 0.625) <= 0.005,
          fmt("empirical acceptance %.5f vs 0.625 +- 0.005 (%.0f trials)", rate,
              double(trials)));
  return c.finish();
}

// --------------------------------------------------------------------------
// C2: RRS exact-law reproduction for the Gamma-Exp pair.
double rrs_output_cdf(double t, double y) {
  if (y <= 0.0) return 0.0;
  if (y <= t) return 1.0 - (1.0 + y) * std::exp(-y);
  return 1.0 - (1.0 + t) * std::exp(-y);
}

double rrs_output_pdf(double t, double y) {
  if (y < 0.0) return 0.0;
  return (y <= t ? y : 1.0 + t) * std::exp(-y);
}

bool criterion2() {
  Criterion c("[C2] RRS exact-law reproduction (sup-CDF and measured TV)");
  const SamplingPair pair = make_pair("gamma-exp");
  const long runs = 100000;
  std::vector<double> at_t3;
  for (double t : {1.0, 3.0, 10.0}) {
    std::vector<double> outs(runs);
    for (long r = 0; r < runs; ++r) {
      RandomStream stream =
          make_stream(kSeed, 2 + std::uint32_t(t), std::uint64_t(r));
      outs[std::size_t(r)] = rrs_terminal(pair.target, pair.prop, t, stream).x[0];
    }
    const double sup = ks_statistic(outs, [t](double y) { return rrs_output_cdf(t, y); });
    c.check(sup <= 0.01, fmt("sup-CDF distance at t=%.0f: %.5f <= 0.01", t, sup));
    if (t == 3.0) at_t3 = outs;
  }

  // Histogram-free TV between the empirical t=3 law and the target.
  const double tv_hat = tv_estimate(
      at_t3, [](double y) { return rrs_output_pdf(3.0, y); },
      [](double y) { return y * std::exp(-y); });
  const double quoted_ref = 4.0 * std::exp(-3.0);  // quoted e^{-t}(1+t) at t = 3
  const double exact_tv = std::exp(-4.0);          // exact closed form
  c.check(std::abs(tv_hat - quoted_ref) <= 0.25 * quoted_ref,
          fmt("measured TV at t=3: %.5f within 25%% of %.5f", tv_hat, quoted_ref));
  c.note(fmt("measured TV agrees with the exact closed form e^{-(t+1)} = %.5f "
             "(rel. diff %.3f)",
             exact_tv, std::abs(tv_hat - exact_tv) / exact_tv));
  c.note("the quoted e^{-t}(1+t) is an upper bound, not the distance: at t=0 "
         "it gives 1 while TV(g,f) = 1/e; the check asserts it as stated");
  return c.finish();
}

// --------------------------------------------------------------------------
// C3: bias orders with the non-asymptotic bound.
bool criterion3() {
  Criterion c("[C3] bias orders: bound respected, slopes -2/-1 over [10,100]");
  const SamplingPair pair = make_pair("gamma-exp");
  const PointFn h = [](std::span<const double> x) { return std::tanh(x[0]); };
  const double q_ref = integrate_semi_inf(
      [](double x) { return std::tanh(x) * x * std::exp(-x); }, 0.0, 1e-12);
  const std::vector<double> grid = {1.0, 5.0, 10.0, 20.0, 50.0, 100.0};
  const auto rows =
      bias_sweep(pair.target, pair.prop, h, 1.0, grid, 100000, q_ref, kSeed, g_workers);
  bool under = true;
  for (const auto& row : rows) under = under && row.pass;
  c.check(under, "|bias of q_hat(t)| <= bias_bound(t) at every grid point");
  for (const auto& row : rows)
    c.note(fmt("t=%5.0f: bias_qt=%+.3e, bound=%.3e", row.t, row.bias_fixed_time,
               row.bound));

  std::vector<double> lx, ly_fixed, ly_drop;
  for (const auto& row : rows) {
    if (row.t < 10.0) continue;
    lx.push_back(std::log(row.t));
    ly_fixed.push_back(std::log(std::abs(row.bias_fixed_time)));
    ly_drop.push_back(std::log(std::abs(row.bias_drop_last)));
  }
  const double slope_fixed = ols_slope(lx, ly_fixed);
  const double slope_drop = ols_slope(lx, ly_drop);
  c.check(std::abs(slope_fixed + 2.0) <= 0.4,
          fmt("log-log slope of |bias q_hat(t)| = %.3f within -2 +- 0.4", slope_fixed));
  c.check(std::abs(slope_drop + 1.0) <= 0.4,
          fmt("log-log slope of |bias drop-last| = %.3f within -1 +- 0.4", slope_drop));
  return c.finish();
}

// --------------------------------------------------------------------------
// C4: the bound formula itself.
bool criterion4() {
  Criterion c("[C4] bias_bound(1,1,2,6,100) = 8.0796e-3 +- 1e-6");
  const double value = bias_bound(1.0, 1.0, 2.0, 6.0, 100.0);
  c.check(std::abs(value - 8.0796e-3) <= 1e-6, fmt("value %.7e", value));
  return c.finish();
}

// --------------------------------------------------------------------------
// C5: CI coverage.
bool criterion5() {
  Criterion c("[C5] 95% CI coverage in [92%, 97%] at t = 200");
  const SamplingPair pair = make_pair("gamma-exp");
  const double t = 200.0;
  const int reps = 1000;
  int covered = 0;
  for (int r = 0; r < reps; ++r) {
    RandomStream stream = make_stream(kSeed, 5, std::uint64_t(r));
    const RegenPath path = rrs_path(pair.target, pair.prop, t, stream);
    std::vector<CyclePair> pairs(std::size_t(path.stop_index));
    for (long i = 0; i < path.stop_index; ++i) {
      const double w = path.weights[std::size_t(i)];
      pairs[std::size_t(i)] = {path.draw(i)[0] * w, w};
    }
    const double q = ratio_fixed_cycles(pairs);
    const Tavc tavc = tavc_estimate(pairs, q);
    const auto [lo, hi] = confidence_interval(q, tavc.sigma2, t, 0.95);
    covered += (lo <= 2.0 && 2.0 <= hi);
  }
  const double rate = covered / double(reps);
  c.check(rate >= 0.92 && rate <= 0.97, fmt("coverage %.3f (q = 2, h = id)", rate));
  c.note("the MC coverage oracle at 12000 replicates puts the true plug-in");
  c.note("coverage at t=200 at 0.909 +- 0.003 (0.952 with the exact sigma^2):");
  c.note("the sigma-hat/q-hat correlation costs ~4 points of coverage");
  return c.finish();
}

// --------------------------------------------------------------------------
// C6: renewal oracles.
bool criterion6() {
  Criterion c("[C6] renewal oracles: E[N(50)], L1 quadrature, empirical TV");
  const auto rows = renewal_verify(RenewalVerifyOptions{}, kSeed, g_workers);
  for (const auto& row : rows) {
    const bool relevant = row.check == "exp1_mean_N" ||
                          row.check == "gamma2_l1_quadrature" ||
                          row.check == "gamma2_tv_empirical";
    if (!relevant) continue;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s t=%.0f: %.6g vs %.6g (tol %.2g)",
                  row.check.c_str(), row.t, row.empirical, row.oracle,
                  row.tolerance);
    c.check(row.pass, buf);
  }
  return c.finish();
}

// --------------------------------------------------------------------------
// C7: coupling.
bool criterion7() {
  Criterion c("[C7] coupling: geometric sigma, inequality, stable tail slope");
  const double A = 4.0, b = 1.0;
  const double delta = coupling_delta(CouplingFamily::gamma2, 1.0, A, b);
  const long runs = 100000;
  std::vector<double> Ts(runs);
  std::vector<long> counts;
  for (long r = 0; r < runs; ++r) {
    RandomStream stream = make_stream(kSeed, 7, std::uint64_t(r));
    const CouplingRun run = coupled_simulation(CouplingFamily::gamma2, 1.0, A, b, stream);
    Ts[std::size_t(r)] = run.T;
    if (long(counts.size()) <= run.sigma) counts.resize(run.sigma + 1, 0);
    ++counts[std::size_t(run.sigma)];
  }

  // Chi-square against Geom(delta) with a merged tail (expected >= 5).
  double chi2 = 0.0;
  long df = 0;
  double tail_exp = double(runs);
  long tail_obs = runs;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double ek = runs * delta * std::pow(1.0 - delta, double(k));
    if (tail_exp - ek < 5.0) break;
    chi2 += (counts[k] - ek) * (counts[k] - ek) / ek;
    tail_exp -= ek;
    tail_obs -= counts[k];
    ++df;
  }
  chi2 += (tail_obs - tail_exp) * (tail_obs - tail_exp) / tail_exp;
  const double p = chi2_sf(chi2, double(df));
  c.check(p > 0.01, fmt("sigma ~ Geom(%.5f): chi2 p = %.4f > 0.01", delta, p));

  std::vector<double> grid;
  for (int t = 1; t <= 10; ++t) grid.push_back(t);
  const auto rows = coupling_inequality_check(CouplingFamily::gamma2, 1.0, A, b,
                                              grid, runs, kSeed + 1, g_workers);
  bool inequality = true;
  for (const auto& row : rows) inequality = inequality && row.pass;
  c.check(inequality, "TV(t) <= P(T > t) + 3 stderr on t = 1..10");

  // Tail slope: negative and stable across halves.
  std::vector<double> sorted = Ts;
  std::sort(sorted.begin(), sorted.end());
  const double lo = quantile_sorted(sorted, 0.5), hi = quantile_sorted(sorted, 0.99);
  auto slope_of = [&](const std::vector<double>& sample) {
    std::vector<double> s = sample;
    std::sort(s.begin(), s.end());
    std::vector<double> xs, ys;
    for (int i = 0; i < 12; ++i) {
      const double t = lo + (hi - lo) * i / 11.0;
      const double tail =
          double(s.end() - std::upper_bound(s.begin(), s.end(), t)) / s.size();
      xs.push_back(t);
      ys.push_back(std::log(tail));
    }
    return ols_slope(xs, ys);
  };
  const double slope = slope_of(Ts);
  const double s1 = slope_of({Ts.begin(), Ts.begin() + runs / 2});
  const double s2 = slope_of({Ts.begin() + runs / 2, Ts.end()});
  c.check(slope < 0.0, fmt("tail log-slope %.4f < 0", slope));
  c.check(std::abs(s1 - s2) <= 0.25 * std::abs(slope),
          fmt("half-sample slopes %.4f / %.4f agree within 25%%", s1, s2));
  return c.finish();
}

// --------------------------------------------------------------------------
// C8: threshold selection on the synthetic targets.
bool criterion8() {
  Criterion c("[C8] threshold selection: 56.91 and 111.1 within 2%");
  struct Case {
    const char* pair_name;
    double quoted_t;
    double quad_mass;
  };
  // Quadrature cross-checks: box integral and the polar R^2 integral.
  const TargetDensity bounded = synthetic_target(true);
  const double lim = 2.0 * M_PI;
  const double box_mass = integrate2d(
      [&](double x, double y) {
        const double p[2] = {x, y};
        return std::exp(bounded.log_f_prop({p, 2}));
      },
      -lim, lim, -lim, lim, 1e-7);
  const double plane_mass = integrate(
      [](double r) {
        return 2.0 * M_PI * r * std::exp(-0.25 * r) * (1.0 + std::sin(2.0 * r));
      },
      0.0, 250.0, 1e-9);
  const Case cases[] = {{"synthetic-bounded", 56.91, box_mass},
                        {"synthetic-unbounded", 111.1, plane_mass}};
  int purpose = 8;
  for (const auto& cs : cases) {
    const SamplingPair pair = make_pair(cs.pair_name);
    const CycleMoments moments = cycle_moments_parallel(
        pair.target, pair.prop, 1000000, kSeed, std::uint32_t(purpose++), g_workers);
    const double t = threshold_select(10000, 1000, 10000, moments.mu);
    c.check(std::abs(t - cs.quoted_t) <= 0.02 * cs.quoted_t,
            fmt((std::string(cs.pair_name) + ": t = %.4f vs %.2f +- 2%%").c_str(),
                t, cs.quoted_t));
    c.check(std::abs(moments.mu - cs.quad_mass) <= 4.0 * moments.se_mu + 1e-3,
            fmt("E[W] = %.4f matches the quadrature mass %.4f", moments.mu,
                cs.quad_mass));
  }
  return c.finish();
}

// --------------------------------------------------------------------------
// C9: probit case study.
bool criterion9() {
  Criterion c("[C9] probit: derivatives, MAP, auto-t, cross-method agreement, ACF");
  const ProbitModel model = build_probit_model(load_lupus(), 0.0);

  // Finite-difference checks.
  RandomStream fd_stream = make_stream(kSeed, 90, 0);
  bool grad_ok = true, hess_ok = true;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd beta(3);
    for (int j = 0; j < 3; ++j) beta(j) = fd_stream.uniform(-3.0, 3.0) / std::sqrt(3.0);
    const Eigen::VectorXd g = gradient(model, beta);
    const Eigen::MatrixXd H = hessian(model, beta);
    const double step = 1e-5;
    for (int j = 0; j < 3; ++j) {
      Eigen::VectorXd up = beta, dn = beta;
      up(j) += step;
      dn(j) -= step;
      const double fd = (log_posterior(model, up) - log_posterior(model, dn)) / (2 * step);
      grad_ok = grad_ok && std::abs(g(j) - fd) <= 1e-6;
      const Eigen::VectorXd fdg = (gradient(model, up) - gradient(model, dn)) / (2 * step);
      for (int i = 0; i < 3; ++i) hess_ok = hess_ok && std::abs(H(i, j) - fdg(i)) <= 1e-5;
    }
  }
  c.check(grad_ok, "gradient matches central differences at 1e-6");
  c.check(hess_ok, "hessian matches gradient differences at 1e-5");

  const NewtonResult newton = map_newton(model, Eigen::VectorXd::Zero(3), 1e-8, 50);
  const double gnorm = gradient(model, newton.mode).lpNorm<Eigen::Infinity>();
  c.check(gnorm <= 1e-8, fmt("MAP gradient inf-norm %.2e <= 1e-8", gnorm));

  // Auto-selected threshold with xi = 2, alpha^2 = 5.
  ProbitOptions rrs_opts;
  rrs_opts.method = "rrs";
  const ProbitResult rrs_run = probit_run(rrs_opts, kSeed, g_workers);
  c.check(std::abs(rrs_run.t_used - 0.7780) <= 0.05 * 0.7780,
          fmt("auto t = %.4f within 5%% of 0.7780", rrs_run.t_used));

  ProbitOptions gibbs_opts;
  gibbs_opts.method = "gibbs";
  const ProbitResult gibbs_run = probit_run(gibbs_opts, kSeed + 1, g_workers);

  // Posterior means agree within 3 combined batch-means stderrs.
  auto batch_se = [](const std::vector<double>& xs) {
    const int B = 20;
    std::vector<double> batch(B);
    const std::size_t len = xs.size() / B;
    for (int k = 0; k < B; ++k) batch[k] = mean({xs.data() + k * len, len});
    return std::sqrt(variance(batch) / B);
  };
  auto component = [](const std::vector<double>& flat, int dim, int j) {
    std::vector<double> out(flat.size() / dim);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = flat[i * dim + j];
    return out;
  };
  bool means_ok = true;
  for (int j = 0; j < 3; ++j) {
    const auto xr = component(rrs_run.samples, 3, j);
    const auto xg = component(gibbs_run.samples, 3, j);
    const double se = std::sqrt(std::pow(batch_se(xr), 2) + std::pow(batch_se(xg), 2));
    const double diff = std::abs(mean(xr) - mean(xg));
    means_ok = means_ok && diff <= 3.0 * se;
    c.note(fmt(("beta" + std::to_string(j) + ": rrs %.4f vs gibbs %.4f (3se = %.4f)").c_str(),
               mean(xr), mean(xg), 3.0 * se));
  }
  c.check(means_ok, "Gibbs and RRS posterior means agree within 3 combined stderr");

  // ACF contrast on the IgG3-IgG4 component.
  const auto rrs_series = component(rrs_run.samples, 3, 1);
  const auto gibbs_series = component(gibbs_run.samples, 3, 1);
  const double rrs_acf10 = acf(rrs_series, 10)[10];
  const double gibbs_acf100 = acf(gibbs_series, 100)[100];
  c.check(rrs_acf10 <= 0.1, fmt("RRS IgG3-IgG4 ACF at lag 10 = %.4f <= 0.1", rrs_acf10));
  c.check(gibbs_acf100 >= 0.2, fmt("Gibbs IgG3-IgG4 ACF at lag 100 = %.4f >= 0.2", gibbs_acf100));
  return c.finish();
}

// --------------------------------------------------------------------------
// C10: throughput ordering.
bool criterion10() {
  Criterion c("[C10] bench: RRS samples/sec exceeds Gibbs on the probit task");
  const auto reports = bench_probit({"rrs", "gibbs"}, 100, 10000, kSeed, g_workers);
  double rrs_rate = 0.0, gibbs_rate = 0.0;
  for (const auto& r : reports) {
    if (r.method == "rrs") rrs_rate = r.samples_per_second;
    if (r.method == "gibbs") gibbs_rate = r.samples_per_second;
    c.note(fmt((r.method + ": %.0f samples/sec").c_str(), r.samples_per_second));
  }
  c.check(rrs_rate > gibbs_rate,
          fmt("ordering over 100 reps: %.0f (rrs) > %.0f (gibbs)", rrs_rate, gibbs_rate));
  return c.finish();
}

// --------------------------------------------------------------------------
// C11: determinism across reruns and worker counts.
bool criterion11() {
  Criterion c("[C11] byte-identical outputs for workers in {1, 8}");
  namespace fs = std::filesystem;
  const std::string dir = (fs::temp_directory_path() / "rrs_acceptance").string();
  fs::create_directories(dir);

  struct Job {
    const char* label;
    std::vector<std::string> args;
    std::vector<std::string> outputs;  // compared files, relative to --out
  };
  const std::vector<Job> jobs = {
      {"sample",
       {"sample", "--method", "rrs-sub", "--target", "gamma-exp", "--t", "5",
        "--n", "2000", "--seed", "7", "--emit-acf", "5"},
       {"", ".acf.csv"}},
      {"renewal-verify",
       {"renewal-verify", "--traces-tv", "20000", "--traces-ks", "5000",
        "--traces-en", "1000", "--seed", "7"},
       {""}},
      {"coupling",
       {"coupling", "--runs", "5000", "--t-grid", "1,5,9", "--seed", "7"},
       {""}},
      {"bias-sweep",
       {"bias-sweep", "--h", "tanh", "--t-grid", "1,5,10", "--M", "5000",
        "--seed", "7"},
       {""}},
      {"moments",
       {"moments", "--target", "gamma-exp", "--M", "20000", "--seed", "7"},
       {""}},
      {"estimate",
       {"estimate", "--h", "id", "--t", "50", "--M-moments", "20000", "--seed",
        "7"},
       {""}},
      {"probit",
       {"probit", "--method", "rrs", "--t", "0.78", "--N", "500", "--seed", "7"},
       {"", ".summary.json"}},
      {"bench",
       {"bench", "--method", "rrs,gibbs", "--reps", "2", "--N", "200", "--seed",
        "7"},
       {""}},
  };

  for (const auto& job : jobs) {
    std::vector<std::string> texts;
    for (int workers : {1, 8}) {
      const std::string out = dir + "/" + job.label + "_w" + std::to_string(workers);
      std::vector<std::string> args = job.args;
      args.insert(args.end(), {"--workers", std::to_string(workers), "--out", out});
      const int code = dispatch(args);
      if (code == 2) {
        c.check(false, std::string(job.label) + ": usage error");
        continue;
      }
      std::string combined;
      for (const auto& suffix : job.outputs) combined += read_text(out + suffix);
      texts.push_back(std::move(combined));
    }
    c.check(texts.size() == 2 && texts[0] == texts[1],
            std::string(job.label) + ": workers 1 vs 8 byte-identical");
  }

  // Rerun with the same config reproduces the bytes exactly.
  const std::string out_a = dir + "/rerun_a", out_b = dir + "/rerun_b";
  dispatch({"sample", "--method", "rrs", "--target", "gamma-exp", "--t", "10",
            "--n", "1000", "--seed", "7", "--out", out_a});
  dispatch({"sample", "--method", "rrs", "--target", "gamma-exp", "--t", "10",
            "--n", "1000", "--seed", "7", "--out", out_b});
  c.check(read_text(out_a) == read_text(out_b), "identical rerun: byte-identical output");
  return c.finish();
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) only = std::atoi(argv[++i]);
    if (arg == "--workers" && i + 1 < argc) g_workers = std::atoi(argv[++i]);
  }
  const std::vector<std::function<bool()>> criteria = {
      criterion1, criterion2, criterion3, criterion4, criterion5, criterion6,
      criterion7, criterion8, criterion9, criterion10, criterion11};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && only != int(i) + 1) continue;
    failures += !criteria[i]();
  }
  return failures;
}
