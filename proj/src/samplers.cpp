#include "rrs/samplers.hpp"

#include <algorithm>
#include <cmath>

#include "rrs/errors.hpp"
#include "rrs/math.hpp"
#include "rrs/parallel.hpp"

namespace rrs {

namespace {

double weight_of(const TargetDensity& target, const Proposal& prop,
                 std::span<const double> x) {
  const double lf = target.log_f_prop(x);
  const double lg = prop.log_g(x);
  if (lf == kNegInf)
    throw ZeroWeight("proposal mass where the target vanishes (w = 0)");
  return std::exp(lf - lg);
}

}  // namespace

RejectionDraw rejection_sample(const TargetDensity& target, const Proposal& prop,
                               double C, RandomStream& stream) {
  if (!(C > 0.0)) throw Error("rejection_sample: C must be positive");
  RejectionDraw out;
  out.x.resize(static_cast<std::size_t>(prop.dim));
  for (long trials = 1;; ++trials) {
    prop.sample(stream, out.x);
    const double lf = target.log_f_prop(out.x);
    const double w = lf == kNegInf ? 0.0 : std::exp(lf - prop.log_g(out.x));
    if (w > C * (1.0 + 1e-12))
      throw RatioExceedsBound("rejection_sample: observed f_prop/g above C");
    const double u = stream.uniform01();
    if (w >= C * u) {
      out.trials = trials;
      out.u = u;
      return out;
    }
  }
}

TerminalDraw rrs_terminal(const TargetDensity& target, const Proposal& prop,
                          double t, RandomStream& stream) {
  TerminalDraw out;
  out.x.resize(static_cast<std::size_t>(prop.dim));
  KahanSum s;
  do {
    prop.sample(stream, out.x);
    s.add(weight_of(target, prop, out.x));
    ++out.n_draws;
  } while (s.total() <= t);
  out.total_weight = s.total();
  return out;
}

RegenPath rrs_path(const TargetDensity& target, const Proposal& prop, double t,
                   RandomStream& stream) {
  RegenPath path;
  path.dim = prop.dim;
  path.threshold = t;
  std::vector<double> x(static_cast<std::size_t>(prop.dim));
  KahanSum s;
  do {
    prop.sample(stream, x);
    const double w = weight_of(target, prop, x);
    s.add(w);
    path.draws.insert(path.draws.end(), x.begin(), x.end());
    path.weights.push_back(w);
    path.partials.push_back(s.total());
    ++path.stop_index;
  } while (s.total() <= t);
  return path;
}

std::vector<double> rrs_subsampled(const TargetDensity& target,
                                   const Proposal& prop, double t,
                                   long n_samples, RandomStream& stream,
                                   long* proposal_draws) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_samples) * prop.dim);
  std::vector<double> x(static_cast<std::size_t>(prop.dim));
  KahanSum s;
  long draws = 0;
  bool have_draw = false;
  for (long i = 1; i <= n_samples; ++i) {
    const double level = t * static_cast<double>(i);
    while (!have_draw || s.total() <= level) {
      prop.sample(stream, x);
      s.add(weight_of(target, prop, x));
      ++draws;
      have_draw = true;
    }
    out.insert(out.end(), x.begin(), x.end());
  }
  if (proposal_draws) *proposal_draws = draws;
  return out;
}

std::vector<double> ChainTrace::component(int j) const {
  std::vector<double> out(static_cast<std::size_t>(n()));
  for (long i = 0; i < n(); ++i) out[static_cast<std::size_t>(i)] = state(i)[j];
  return out;
}

ChainTrace imh_chain(const TargetDensity& target, const Proposal& prop,
                     long n_steps, std::span<const double> x0,
                     RandomStream& stream) {
  if (target.log_f_prop(x0) == kNegInf)
    throw Error("imh_chain: x0 outside the target support");
  ChainTrace trace;
  trace.dim = prop.dim;
  trace.states.reserve(static_cast<std::size_t>(n_steps) * prop.dim);
  trace.accepts.reserve(static_cast<std::size_t>(n_steps));
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> y(static_cast<std::size_t>(prop.dim));
  double log_w_x = target.log_f_prop(x) - prop.log_g(x);
  long accepted = 0;
  for (long i = 0; i < n_steps; ++i) {
    prop.sample(stream, y);
    const double lf = target.log_f_prop(y);
    bool accept = false;
    if (lf != kNegInf) {
      const double log_w_y = lf - prop.log_g(y);
      accept = std::log(stream.uniform01()) <= log_w_y - log_w_x;
      if (accept) {
        x = y;
        log_w_x = log_w_y;
      }
    } else {
      stream.uniform01();  // burn the accept draw either way
    }
    accepted += accept;
    trace.states.insert(trace.states.end(), x.begin(), x.end());
    trace.accepts.push_back(accept);
  }
  trace.acceptance_rate =
      static_cast<double>(accepted) / static_cast<double>(n_steps);
  return trace;
}

ChainTrace rwm_chain(const TargetDensity& target, const StepSampler& step,
                     long n_steps, std::span<const double> x0,
                     RandomStream& stream) {
  if (target.log_f_prop(x0) == kNegInf)
    throw Error("rwm_chain: x0 outside the target support");
  ChainTrace trace;
  trace.dim = target.dim;
  trace.states.reserve(static_cast<std::size_t>(n_steps) * target.dim);
  trace.accepts.reserve(static_cast<std::size_t>(n_steps));
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> y(static_cast<std::size_t>(target.dim));
  std::vector<double> dx(static_cast<std::size_t>(target.dim));
  double lf_x = target.log_f_prop(x);
  long accepted = 0;
  for (long i = 0; i < n_steps; ++i) {
    step(stream, dx);
    for (int j = 0; j < target.dim; ++j)
      y[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)] +
                                       dx[static_cast<std::size_t>(j)];
    const double lf_y = target.log_f_prop(y);
    bool accept = false;
    if (lf_y != kNegInf)
      accept = std::log(stream.uniform01()) <= lf_y - lf_x;
    else
      stream.uniform01();
    if (accept) {
      x = y;
      lf_x = lf_y;
    }
    accepted += accept;
    trace.states.insert(trace.states.end(), x.begin(), x.end());
    trace.accepts.push_back(accept);
  }
  trace.acceptance_rate =
      static_cast<double>(accepted) / static_cast<double>(n_steps);
  return trace;
}

std::vector<double> acf(std::span<const double> series, int max_lag) {
  const long n = static_cast<long>(series.size());
  if (max_lag >= n / 4)
    throw Error("acf: max_lag must be below length/4");
  const double m = mean(series);
  KahanSum denom;
  for (double x : series) denom.add((x - m) * (x - m));
  if (denom.total() == 0.0) throw ZeroVariance("acf: constant series");
  std::vector<double> rho(static_cast<std::size_t>(max_lag) + 1);
  for (int k = 0; k <= max_lag; ++k) {
    KahanSum num;
    for (long i = 0; i + k < n; ++i)
      num.add((series[static_cast<std::size_t>(i)] - m) *
              (series[static_cast<std::size_t>(i + k)] - m));
    rho[static_cast<std::size_t>(k)] = num.total() / denom.total();
  }
  return rho;
}

CycleMoments cycle_moments(const TargetDensity& target, const Proposal& prop,
                           long M, RandomStream& stream,
                           std::vector<double>* w_out) {
  KahanSum s1, s2, s3, s2sq, s4, s6;
  std::vector<double> x(static_cast<std::size_t>(prop.dim));
  if (w_out) w_out->reserve(static_cast<std::size_t>(M));
  for (long i = 0; i < M; ++i) {
    prop.sample(stream, x);
    const double w = weight_of(target, prop, x);
    const double w2 = w * w, w3 = w2 * w;
    s1.add(w);
    s2.add(w2);
    s3.add(w3);
    s2sq.add(w2);
    s4.add(w2 * w2);
    s6.add(w3 * w3);
    if (w_out) w_out->push_back(w);
  }
  const double n = static_cast<double>(M);
  CycleMoments cm;
  cm.n = M;
  cm.mu = s1.total() / n;
  cm.mu2 = s2.total() / n;
  cm.mu3 = s3.total() / n;
  cm.se_mu = std::sqrt(std::max(0.0, s2.total() / n - cm.mu * cm.mu) / n);
  cm.se_mu2 = std::sqrt(std::max(0.0, s4.total() / n - cm.mu2 * cm.mu2) / n);
  cm.se_mu3 = std::sqrt(std::max(0.0, s6.total() / n - cm.mu3 * cm.mu3) / n);
  return cm;
}

CycleMoments cycle_moments_parallel(const TargetDensity& target,
                                    const Proposal& prop, long M,
                                    std::uint64_t seed, std::uint32_t purpose,
                                    int workers, std::vector<double>* w_out) {
  constexpr long kChunks = 512;
  struct ChunkSums {
    double s1 = 0, s2 = 0, s3 = 0, s4 = 0, s6 = 0;
    std::vector<double> w;
  };
  std::vector<ChunkSums> chunks(kChunks);
  parallel_replicates(kChunks, workers, [&](std::int64_t c) {
    const long lo = c * M / kChunks, hi = (c + 1) * M / kChunks;
    RandomStream stream = make_stream(seed, purpose, static_cast<std::uint64_t>(c));
    std::vector<double> x(static_cast<std::size_t>(prop.dim));
    ChunkSums& cs = chunks[static_cast<std::size_t>(c)];
    KahanSum s1, s2, s3, s4, s6;
    if (w_out) cs.w.reserve(static_cast<std::size_t>(hi - lo));
    for (long i = lo; i < hi; ++i) {
      prop.sample(stream, x);
      const double w = weight_of(target, prop, x);
      const double w2 = w * w, w3 = w2 * w;
      s1.add(w);
      s2.add(w2);
      s3.add(w3);
      s4.add(w2 * w2);
      s6.add(w3 * w3);
      if (w_out) cs.w.push_back(w);
    }
    cs.s1 = s1.total();
    cs.s2 = s2.total();
    cs.s3 = s3.total();
    cs.s4 = s4.total();
    cs.s6 = s6.total();
  });
  KahanSum s1, s2, s3, s4, s6;
  if (w_out) w_out->reserve(static_cast<std::size_t>(M));
  for (const auto& cs : chunks) {
    s1.add(cs.s1);
    s2.add(cs.s2);
    s3.add(cs.s3);
    s4.add(cs.s4);
    s6.add(cs.s6);
    if (w_out) w_out->insert(w_out->end(), cs.w.begin(), cs.w.end());
  }
  const double n = static_cast<double>(M);
  CycleMoments cm;
  cm.n = M;
  cm.mu = s1.total() / n;
  cm.mu2 = s2.total() / n;
  cm.mu3 = s3.total() / n;
  cm.se_mu = std::sqrt(std::max(0.0, s2.total() / n - cm.mu * cm.mu) / n);
  cm.se_mu2 = std::sqrt(std::max(0.0, s4.total() / n - cm.mu2 * cm.mu2) / n);
  cm.se_mu3 = std::sqrt(std::max(0.0, s6.total() / n - cm.mu3 * cm.mu3) / n);
  return cm;
}

double threshold_select(long n_target, long burnin, long n_sub, double mu_W) {
  if (n_target <= 0 || burnin < 0 || n_sub <= 0 || !(mu_W > 0.0))
    throw Error("threshold_select: inputs must be positive");
  return static_cast<double>(n_target + burnin) / static_cast<double>(n_sub) *
         mu_W;
}

MomentStability moment_stability(const TargetDensity& target,
                                 const Proposal& prop, long M, int batches,
                                 RandomStream& stream, double threshold) {
  MomentStability ms;
  std::vector<double> x(static_cast<std::size_t>(prop.dim));
  std::vector<double> batch_vars;
  for (int b = 0; b < batches; ++b) {
    const long lo = b * M / batches, hi = (b + 1) * M / batches;
    KahanSum s1, s2;
    for (long i = lo; i < hi; ++i) {
      prop.sample(stream, x);
      const double w = weight_of(target, prop, x);
      s1.add(w);
      s2.add(w * w);
    }
    const double n = static_cast<double>(hi - lo);
    const double m = s1.total() / n;
    ms.batch_means.push_back(m);
    batch_vars.push_back(std::max(1e-300, s2.total() / n - m * m));
  }
  // A finite-variance cycle law keeps batch variances within a small factor
  // of each other; an infinite-variance one is dominated by its largest draw
  // per batch and the ratio blows up.
  const auto [mn, mx] = std::minmax_element(batch_vars.begin(), batch_vars.end());
  ms.spread = *mx / *mn;
  ms.stable = ms.spread <= threshold;
  return ms;
}

}  // namespace rrs
