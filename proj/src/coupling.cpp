#include "rrs/coupling.hpp"

#include <cmath>

#include "rrs/errors.hpp"
#include "rrs/math.hpp"
#include "rrs/parallel.hpp"

namespace rrs {

UniformComponent uniform_component(const ScalarFn& density, double a, double b) {
  if (!(b > 0.0)) throw Error("uniform_component: b must be positive");
  // Grid scan for the infimum, then bracket refinement around the argmin.
  const int n = 4096;
  double alpha = density(a + b * (0.5 / n));
  int argmin = 0;
  for (int i = 0; i < n; ++i) {
    const double x = a + b * ((i + 0.5) / n);
    const double v = density(x);
    if (v < alpha) {
      alpha = v;
      argmin = i;
    }
  }
  double lo = a + b * (std::max(0, argmin - 1) + 0.5) / n;
  double hi = a + b * (std::min(n - 1, argmin + 1) + 0.5) / n;
  for (int pass = 0; pass < 40; ++pass) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    const double v1 = density(m1), v2 = density(m2);
    alpha = std::min({alpha, v1, v2});
    if (v1 < v2)
      hi = m2;
    else
      lo = m1;
  }
  // Interval endpoints too: the infimum of a monotone density sits there.
  alpha = std::min(alpha, std::min(density(a + 1e-12 * b), density(a + b * (1 - 1e-12))));
  if (!(alpha > 0.0))
    throw DegenerateComponent("uniform_component: density infimum <= 0");
  UniformComponent comp;
  comp.a = a;
  comp.b = b;
  comp.alpha = alpha;
  comp.eps = std::min(1.0, alpha * b);
  const double eps = comp.eps;
  comp.residual = [density, a, b, alpha, eps](double x) {
    if (eps >= 1.0) return 0.0;
    const double ind = (x > a && x < a + b) ? alpha : 0.0;
    return (density(x) - ind) / (1.0 - eps);
  };
  return comp;
}

double residual_draw(const UniformComponent& comp, const Envelope& envelope,
                     RandomStream& stream, long trial_cap) {
  for (long trial = 0; trial < trial_cap; ++trial) {
    const double y = envelope.sample(stream);
    const double accept =
        (1.0 - comp.eps) * comp.residual(y) / (envelope.bound * envelope.density(y));
    if (stream.uniform01() <= accept) return y;
  }
  throw TrialBudgetExceeded("residual_draw: trial cap reached");
}

double coupling_delta(CouplingFamily family, double lambda, double A, double b) {
  if (family == CouplingFamily::gamma2) {
    const double alpha =
        0.5 * lambda * std::exp(-lambda * b) * (1.0 - std::exp(-2.0 * lambda * A));
    return alpha * b;
  }
  // Exponential: R(t) ~ Exp(lambda) for all t; component on (0,b).
  return lambda * std::exp(-lambda * b) * b;
}

namespace {

//! Residual draw from the law of R(s) for the given family, minorized by
//! alpha * 1_{(0,b)}.  The recurrence laws are Exp/Gamma2 mixtures, so the
//! law itself is the envelope with domination constant 1/(1-delta).
double recurrence_residual(CouplingFamily family, const Gamma2Oracle& oracle,
                           double s, double alpha, double b, double delta,
                           RandomStream& stream) {
  ScalarSampler sampler;
  ScalarFn density;
  if (family == CouplingFamily::gamma2) {
    const bool stationary = std::isinf(s);
    sampler = [&oracle, s, stationary](RandomStream& rs) {
      return stationary ? oracle.sample_f0(rs) : oracle.sample_f_R(s, rs);
    };
    density = [&oracle, s, stationary](double x) {
      return stationary ? oracle.f0(x) : oracle.f_R(s, x);
    };
  } else {
    const double lambda = oracle.lambda;
    sampler = [lambda](RandomStream& rs) { return rs.exponential(lambda); };
    density = [lambda](double x) {
      return x < 0.0 ? 0.0 : lambda * std::exp(-lambda * x);
    };
  }
  UniformComponent comp;
  comp.a = 0.0;
  comp.b = b;
  comp.alpha = alpha;
  comp.eps = delta;
  ScalarFn dens = density;
  comp.residual = [dens, alpha, b, delta](double x) {
    const double ind = (x > 0.0 && x < b) ? alpha : 0.0;
    return (dens(x) - ind) / (1.0 - delta);
  };
  return residual_draw(comp, Envelope{sampler, density, 1.0}, stream);
}

}  // namespace

CouplingRun coupled_simulation(CouplingFamily family, double lambda, double A,
                               double b, RandomStream& stream) {
  const Gamma2Oracle oracle = gamma2_oracle(lambda);
  const double delta = coupling_delta(family, lambda, A, b);
  const double alpha = delta / b;

  CouplingRun run;
  run.A = A;
  run.b = b;
  run.delta = delta;

  double r = 0.0;  // zero-delayed copy
  double rp = family == CouplingFamily::gamma2 ? oracle.sample_f0(stream)
                                               : stream.exponential(lambda);
  double t = 0.0;
  run.checkpoints.push_back({t, r, rp});

  for (long k = 0;; ++k) {
    const double L = std::max(r, rp);
    const double t_next = t + L + A;
    const double s = L + A - r;    // >= A
    const double sp = L + A - rp;  // >= A
    const bool success = stream.uniform01() < delta;
    const double v = stream.uniform(0.0, b);
    if (success) {
      r = rp = v;
      run.sigma = k;
      run.v_final = v;
      t = t_next;
      run.checkpoints.push_back({t, r, rp});
      // Common renewal of both copies at T = t_{sigma+1} + L_{sigma+1}.
      run.T = t + std::max(r, rp);
      return run;
    }
    r = recurrence_residual(family, oracle, s, alpha, b, delta, stream);
    rp = recurrence_residual(family, oracle,
                             family == CouplingFamily::gamma2
                                 ? std::numeric_limits<double>::infinity()
                                 : sp,
                             alpha, b, delta, stream);
    t = t_next;
    run.checkpoints.push_back({t, r, rp});
  }
}

std::vector<CouplingTailRow> coupling_inequality_check(
    CouplingFamily family, double lambda, double A, double b,
    const std::vector<double>& t_grid, long runs, std::uint64_t seed,
    int workers) {
  constexpr std::uint32_t kPurpose = 31;
  std::vector<double> T(static_cast<std::size_t>(runs));
  parallel_replicates(runs, workers, [&](std::int64_t r) {
    RandomStream stream = make_stream(seed, kPurpose, static_cast<std::uint64_t>(r));
    T[static_cast<std::size_t>(r)] =
        coupled_simulation(family, lambda, A, b, stream).T;
  });
  const Gamma2Oracle oracle = gamma2_oracle(lambda);
  std::vector<CouplingTailRow> rows;
  rows.reserve(t_grid.size());
  for (double t : t_grid) {
    long tail = 0;
    for (double Ti : T)
      if (Ti > t) ++tail;
    CouplingTailRow row;
    row.t = t;
    row.p_tail = static_cast<double>(tail) / static_cast<double>(runs);
    row.p_stderr =
        std::sqrt(row.p_tail * (1.0 - row.p_tail) / static_cast<double>(runs));
    row.tv_oracle = family == CouplingFamily::gamma2 ? oracle.tv(t) : 0.0;
    row.pass = row.tv_oracle <= row.p_tail + 3.0 * row.p_stderr;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rrs
