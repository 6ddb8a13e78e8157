#include "rrs/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "rrs/errors.hpp"
#include "rrs/math.hpp"
#include "rrs/parallel.hpp"

namespace rrs {

double ratio_fixed_time(const RegenPath& path, const PointFn& h) {
  if (path.stop_index < 1) throw Error("ratio_fixed_time: empty path");
  KahanSum num;
  for (long i = 0; i < path.stop_index; ++i)
    num.add(h(path.draw(i)) * path.weights[static_cast<std::size_t>(i)]);
  return num.total() / path.partials[static_cast<std::size_t>(path.stop_index - 1)];
}

double ratio_drop_last(const RegenPath& path, const PointFn& h) {
  if (path.stop_index < 2)
    throw SingleCycle("ratio_drop_last: N(t) = 1, nothing left after dropping");
  KahanSum num;
  for (long i = 0; i < path.stop_index - 1; ++i)
    num.add(h(path.draw(i)) * path.weights[static_cast<std::size_t>(i)]);
  return num.total() / path.partials[static_cast<std::size_t>(path.stop_index - 2)];
}

double ratio_fixed_cycles(std::span<const CyclePair> pairs) {
  if (pairs.empty()) throw Error("ratio_fixed_cycles: no pairs");
  KahanSum num, den;
  for (const auto& p : pairs) {
    num.add(p.v);
    den.add(p.w);
  }
  return num.total() / den.total();
}

Tavc tavc_estimate(std::span<const CyclePair> pairs, double q_hat) {
  if (pairs.size() < 2) throw Error("tavc_estimate: need at least 2 pairs");
  const double n = static_cast<double>(pairs.size());
  KahanSum sv, sw;
  for (const auto& p : pairs) {
    sv.add(p.v);
    sw.add(p.w);
  }
  const double v_bar = sv.total() / n, w_bar = sw.total() / n;
  KahanSum s11, s12, s22;
  for (const auto& p : pairs) {
    const double dv = p.v - v_bar, dw = p.w - w_bar;
    s11.add(dv * dv);
    s12.add(dv * dw);
    s22.add(dw * dw);
  }
  const double c11 = s11.total() / (n - 1.0);
  const double c12 = s12.total() / (n - 1.0);
  const double c22 = s22.total() / (n - 1.0);
  Tavc tavc;
  tavc.s2 = c11 - 2.0 * q_hat * c12 + q_hat * q_hat * c22;
  tavc.eta2 = tavc.s2 / (w_bar * w_bar);
  tavc.sigma2 = tavc.s2 / w_bar;
  return tavc;
}

std::pair<double, double> confidence_interval(double q_hat, double sigma2,
                                              double t, double level) {
  if (sigma2 < 0.0 || !(t > 0.0) || !(level > 0.0 && level < 1.0))
    throw Error("confidence_interval: invalid arguments");
  if (sigma2 == 0.0) return {q_hat, q_hat};
  const double z = norm_quantile(0.5 * (1.0 + level));
  const double half = z * std::sqrt(sigma2 / t);
  return {q_hat - half, q_hat + half};
}

double bias_bound(double K, double mu, double mu2, double mu3, double t) {
  if (!(K > 0.0 && mu > 0.0 && mu2 > 0.0 && mu3 > 0.0 && t > 0.0))
    throw Error("bias_bound: all arguments must be positive");
  return std::sqrt(16.0 / 3.0 * K * K * mu3 * mu2 * (mu2 / t + mu) /
                   (mu * mu * mu)) /
         std::pow(t, 1.5);
}

RatioEstimate estimate_quantity(const TargetDensity& target,
                                const Proposal& prop, const PointFn& h,
                                double t, double level, double K,
                                const CycleMoments& indep_moments,
                                RandomStream& stream) {
  const RegenPath path = rrs_path(target, prop, t, stream);
  std::vector<CyclePair> pairs(static_cast<std::size_t>(path.stop_index));
  for (long i = 0; i < path.stop_index; ++i) {
    const double w = path.weights[static_cast<std::size_t>(i)];
    pairs[static_cast<std::size_t>(i)] = {h(path.draw(i)) * w, w};
  }
  RatioEstimate est;
  est.value = ratio_fixed_cycles(pairs);
  est.n_cycles = path.stop_index;
  est.t = t;
  if (path.stop_index >= 2) {
    const Tavc tavc = tavc_estimate(pairs, est.value);
    est.eta2 = tavc.eta2;
    est.sigma2 = tavc.sigma2;
  }
  std::tie(est.ci_lo, est.ci_hi) = confidence_interval(est.value, est.sigma2, t, level);
  est.level = level;
  est.bias_bound_value =
      bias_bound(K, indep_moments.mu, indep_moments.mu2, indep_moments.mu3, t);
  return est;
}

namespace {

struct SweepPoint {
  double q_hat = 0.0;
  double q_drop = 0.0;
  double control = 0.0;  // (sum_{n<=N(t)} Z_n) / t, exactly mean zero
  bool has_drop = false;
};

//! Walk one path across the whole grid; t_grid must be increasing.
void sweep_one_path(const TargetDensity& target, const Proposal& prop,
                    const PointFn& h, std::span<const double> t_grid,
                    double q_ref, RandomStream& stream,
                    std::span<SweepPoint> out) {
  std::vector<double> x(static_cast<std::size_t>(prop.dim));
  KahanSum weight_sum, value_sum;
  double prev_weight_total = 0.0, prev_value_total = 0.0;
  long n = 0;
  std::size_t g = 0;
  while (g < t_grid.size()) {
    prop.sample(stream, x);
    const double lf = target.log_f_prop(x);
    if (lf == kNegInf) throw ZeroWeight("bias sweep: w = 0 draw");
    const double w = std::exp(lf - prop.log_g(x));
    prev_weight_total = weight_sum.total();
    prev_value_total = value_sum.total();
    weight_sum.add(w);
    value_sum.add(h(x) * w);
    ++n;
    while (g < t_grid.size() && weight_sum.total() > t_grid[g]) {
      SweepPoint& pt = out[g];
      pt.q_hat = value_sum.total() / weight_sum.total();
      pt.control = (value_sum.total() - q_ref * weight_sum.total()) / t_grid[g];
      if (n >= 2) {
        pt.q_drop = prev_value_total / prev_weight_total;
        pt.has_drop = true;
      }
      ++g;
    }
  }
}

}  // namespace

std::vector<BiasSweepRow> bias_sweep(const TargetDensity& target,
                                     const Proposal& prop, const PointFn& h,
                                     double K, std::span<const double> t_grid,
                                     long M, double q_ref, std::uint64_t seed,
                                     int workers) {
  constexpr std::uint32_t kPurposeMain = 40;
  constexpr std::uint32_t kPurposePilot = 41;
  constexpr std::uint32_t kPurposeMoments = 42;
  const std::size_t G = t_grid.size();

  // Pilot pass: control-variate coefficients per t, on reserved streams.
  const long pilot = std::min<long>(4000, std::max<long>(500, M / 25));
  std::vector<SweepPoint> pilot_points(static_cast<std::size_t>(pilot) * G);
  parallel_replicates(pilot, workers, [&](std::int64_t r) {
    RandomStream stream = make_stream(seed, kPurposePilot, static_cast<std::uint64_t>(r));
    sweep_one_path(target, prop, h, t_grid, q_ref, stream,
                   {pilot_points.data() + static_cast<std::size_t>(r) * G, G});
  });
  std::vector<double> c_fixed(G, 0.0), c_drop(G, 0.0);
  for (std::size_t g = 0; g < G; ++g) {
    double su = 0, sq = 0, sd = 0;
    long nd = 0;
    for (long r = 0; r < pilot; ++r) {
      const SweepPoint& pt = pilot_points[static_cast<std::size_t>(r) * G + g];
      su += pt.control;
      sq += pt.q_hat;
      if (pt.has_drop) {
        sd += pt.q_drop;
        ++nd;
      }
    }
    const double mu_u = su / pilot, mu_q = sq / pilot;
    const double mu_d = nd > 0 ? sd / nd : 0.0;
    double cuu = 0, cuq = 0, cud = 0;
    for (long r = 0; r < pilot; ++r) {
      const SweepPoint& pt = pilot_points[static_cast<std::size_t>(r) * G + g];
      const double du = pt.control - mu_u;
      cuu += du * du;
      cuq += du * (pt.q_hat - mu_q);
      if (pt.has_drop) cud += du * (pt.q_drop - mu_d);
    }
    if (cuu > 0.0) {
      c_fixed[g] = cuq / cuu;
      c_drop[g] = nd > 1 ? cud / cuu : 0.0;
    }
  }

  // Main pass with the frozen coefficients (fixed c keeps E[estimate] exact).
  struct ChunkAcc {
    std::vector<double> sf, sf2, sd, sd2;
    std::vector<long> nd;
  };
  constexpr long kChunks = 512;
  std::vector<ChunkAcc> chunks(kChunks);
  parallel_replicates(kChunks, workers, [&](std::int64_t c) {
    ChunkAcc& acc = chunks[static_cast<std::size_t>(c)];
    acc.sf.assign(G, 0.0);
    acc.sf2.assign(G, 0.0);
    acc.sd.assign(G, 0.0);
    acc.sd2.assign(G, 0.0);
    acc.nd.assign(G, 0);
    const long lo = c * M / kChunks, hi = (c + 1) * M / kChunks;
    std::vector<SweepPoint> pts(G);
    for (long r = lo; r < hi; ++r) {
      RandomStream stream = make_stream(seed, kPurposeMain, static_cast<std::uint64_t>(r));
      sweep_one_path(target, prop, h, t_grid, q_ref, stream, pts);
      for (std::size_t g = 0; g < G; ++g) {
        const double ef = pts[g].q_hat - c_fixed[g] * pts[g].control;
        acc.sf[g] += ef;
        acc.sf2[g] += ef * ef;
        if (pts[g].has_drop) {
          const double ed = pts[g].q_drop - c_drop[g] * pts[g].control;
          acc.sd[g] += ed;
          acc.sd2[g] += ed * ed;
          ++acc.nd[g];
        }
      }
    }
  });

  // Moments for the bound from an independent run (bound and estimate must
  // not share randomness).
  const CycleMoments moments = cycle_moments_parallel(
      target, prop, std::max<long>(100000, M), seed, kPurposeMoments, workers);

  std::vector<BiasSweepRow> rows(G);
  for (std::size_t g = 0; g < G; ++g) {
    KahanSum sf, sf2, sd, sd2;
    long nd = 0;
    for (const auto& acc : chunks) {
      sf.add(acc.sf[g]);
      sf2.add(acc.sf2[g]);
      sd.add(acc.sd[g]);
      sd2.add(acc.sd2[g]);
      nd += acc.nd[g];
    }
    const double n = static_cast<double>(M);
    BiasSweepRow& row = rows[g];
    row.t = t_grid[g];
    row.q_ref = q_ref;
    const double mf = sf.total() / n;
    row.bias_fixed_time = mf - q_ref;
    row.stderr_fixed =
        std::sqrt(std::max(0.0, sf2.total() / n - mf * mf) / n);
    if (nd > 1) {
      const double md = sd.total() / static_cast<double>(nd);
      row.bias_drop_last = md - q_ref;
      row.stderr_drop = std::sqrt(
          std::max(0.0, sd2.total() / static_cast<double>(nd) - md * md) /
          static_cast<double>(nd));
    }
    row.bound = bias_bound(K, moments.mu, moments.mu2, moments.mu3, row.t);
    row.pass = std::abs(row.bias_fixed_time) <= row.bound;
  }
  return rows;
}

std::vector<McmcBiasRow> mcmc_bias_reference(
    const TargetDensity& target, const Proposal& prop, double C_exact,
    const PointFn& h, std::span<const long> N_grid, long M, double x0,
    std::uint64_t seed, int workers) {
  constexpr std::uint32_t kPurpose = 45;
  const long N_max = *std::max_element(N_grid.begin(), N_grid.end());
  const std::size_t G = N_grid.size();

  constexpr long kChunks = 512;
  struct ChunkAcc {
    std::vector<double> s, s2;
  };
  std::vector<ChunkAcc> chunks(kChunks);
  parallel_replicates(kChunks, workers, [&](std::int64_t c) {
    ChunkAcc& acc = chunks[static_cast<std::size_t>(c)];
    acc.s.assign(G, 0.0);
    acc.s2.assign(G, 0.0);
    const long lo = c * M / kChunks, hi = (c + 1) * M / kChunks;
    std::vector<double> y(static_cast<std::size_t>(prop.dim));
    for (long r = lo; r < hi; ++r) {
      RandomStream stream = make_stream(seed, kPurpose, static_cast<std::uint64_t>(r));
      // Stationary twin from an exact rejection-sampling draw.
      double xs = rejection_sample(target, prop, C_exact, stream).x[0];
      double xc = x0;
      double lw_s = target.log_f_prop({&xs, 1}) - prop.log_g({&xs, 1});
      double lw_c = target.log_f_prop({&xc, 1}) - prop.log_g({&xc, 1});
      KahanSum diff;  // sum of h(X_n) - h(X'_n) until coalescence
      std::size_t g = 0;
      for (long n = 1; n <= N_max && g < G; ++n) {
        if (xc != xs) {
          prop.sample(stream, y);
          const double lf = target.log_f_prop(y);
          const double log_u = std::log(stream.uniform01());
          if (lf != kNegInf) {
            const double lw_y = lf - prop.log_g(y);
            if (log_u <= lw_y - lw_c) {
              xc = y[0];
              lw_c = lw_y;
            }
            if (log_u <= lw_y - lw_s) {
              xs = y[0];
              lw_s = lw_y;
            }
          }
          diff.add(h({&xc, 1}) - h({&xs, 1}));
        }
        while (g < G && n == N_grid[g]) {
          const double d = diff.total() / static_cast<double>(N_grid[g]);
          acc.s[g] += d;
          acc.s2[g] += d * d;
          ++g;
        }
      }
    }
  });

  std::vector<McmcBiasRow> rows(G);
  for (std::size_t g = 0; g < G; ++g) {
    KahanSum s, s2;
    for (const auto& acc : chunks) {
      s.add(acc.s[g]);
      s2.add(acc.s2[g]);
    }
    const double n = static_cast<double>(M);
    const double m = s.total() / n;
    rows[g].n_steps = static_cast<double>(N_grid[g]);
    rows[g].bias = m;
    rows[g].stderr_ = std::sqrt(std::max(0.0, s2.total() / n - m * m) / n);
  }
  return rows;
}

}  // namespace rrs
