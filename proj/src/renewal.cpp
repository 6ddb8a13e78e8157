#include "rrs/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rrs/errors.hpp"
#include "rrs/math.hpp"

namespace rrs {

RenewalTrace simulate_renewal(const ScalarSampler& interarrival,
                              const ScalarSampler* delay, double horizon,
                              RandomStream& stream) {
  RenewalTrace trace;
  trace.horizon = horizon;
  trace.delay = delay ? (*delay)(stream) : 0.0;
  if (delay && trace.delay <= 0.0)
    throw NonpositiveInterarrival("delay draw <= 0");
  KahanSum t;
  t.add(trace.delay);
  trace.epochs.push_back(t.total());
  while (trace.epochs.back() <= horizon) {
    const double x = interarrival(stream);
    if (x <= 0.0) throw NonpositiveInterarrival("interarrival draw <= 0");
    t.add(x);
    trace.epochs.push_back(t.total());
  }
  return trace;
}

RenewalState state_at(const RenewalTrace& trace, double t) {
  // The trace keeps one epoch beyond the horizon, so any t <= horizon has a
  // well-defined next renewal.
  if (t > trace.horizon) throw QueryPastHorizon("state_at: t > horizon");
  // N(t) = inf{n : T_n > t}; epochs[k] is T_k.
  const auto it =
      std::upper_bound(trace.epochs.begin(), trace.epochs.end(), t);
  const long n = static_cast<long>(it - trace.epochs.begin());
  RenewalState state;
  state.t = t;
  state.n = n;
  state.residual = trace.epochs[static_cast<std::size_t>(n)] - t;
  state.elapsed =
      n >= 1 ? t - trace.epochs[static_cast<std::size_t>(n - 1)]
             : std::numeric_limits<double>::quiet_NaN();  // delayed, t < T_0
  state.current = state.elapsed + state.residual;
  return state;
}

StationaryLaw stationary_law(const ScalarFn& interarrival_cdf, double mu,
                             ScalarFn interarrival_density) {
  if (!(mu > 0.0) || !std::isfinite(mu))
    throw Error("stationary_law: mu must be finite and positive");
  StationaryLaw law;
  law.mu = mu;
  law.f0_density = [interarrival_cdf, mu](double x) {
    if (x < 0.0) return 0.0;
    return (1.0 - interarrival_cdf(x)) / mu;
  };
  ScalarFn f0 = law.f0_density;
  law.f0_cdf = [f0](double x) {
    if (x <= 0.0) return 0.0;
    return integrate(f0, 0.0, x, 1e-12);
  };
  ScalarFn density = interarrival_density;
  if (!density) {
    density = [interarrival_cdf](double x) {
      const double h = 1e-6 * std::max(1.0, std::abs(x));
      const double lo = std::max(0.0, x - h);
      return (interarrival_cdf(x + h) - interarrival_cdf(lo)) / (x + h - lo);
    };
  }
  law.f1_density = [density, mu](double x) {
    if (x < 0.0) return 0.0;
    return x * density(x) / mu;
  };
  return law;
}

std::vector<double> solve_renewal_equation(const ScalarFn& z,
                                           const ScalarFn& interarrival_density,
                                           double grid_step, double t_max) {
  if (!(grid_step > 0.0)) throw Error("solve_renewal_equation: bad grid step");
  const std::size_t n = static_cast<std::size_t>(std::floor(t_max / grid_step)) + 1;
  std::vector<double> fgrid(n), zgrid(n), Z(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = grid_step * static_cast<double>(i);
    fgrid[i] = interarrival_density(t);
    zgrid[i] = z(t);
  }
  Z[0] = zgrid[0];
  for (std::size_t i = 1; i < n; ++i) {
    // int_0^{t_i} Z(s) f(t_i - s) ds, left-endpoint rule in s (explicit,
    // first order: halving the step halves the error).
    KahanSum conv;
    for (std::size_t j = 0; j < i; ++j) conv.add(Z[j] * fgrid[i - j]);
    Z[i] = zgrid[i] + grid_step * conv.total();
  }
  return Z;
}

double Gamma2Oracle::f0(double x) const {
  if (x < 0.0) return 0.0;
  return 0.5 * lambda * std::exp(-lambda * x) * (1.0 + lambda * x);
}

double Gamma2Oracle::F0(double x) const {
  if (x <= 0.0) return 0.0;
  return 1.0 - std::exp(-lambda * x) * (1.0 + 0.5 * lambda * x);
}

double Gamma2Oracle::u1(double x) const {
  if (x < 0.0) return 0.0;
  return 0.5 * lambda * (1.0 - std::exp(-2.0 * lambda * x));
}

double Gamma2Oracle::F_R(double t, double x) const {
  if (x <= 0.0) return 0.0;
  return 1.0 - std::exp(-lambda * x) * (1.0 + 0.5 * lambda * x) -
         0.5 * lambda * x * std::exp(-lambda * x) * std::exp(-2.0 * lambda * t);
}

double Gamma2Oracle::f_R(double t, double x) const {
  if (x < 0.0) return 0.0;
  const double e2t = std::exp(-2.0 * lambda * t);
  return 0.5 * lambda * std::exp(-lambda * x) *
         ((1.0 - e2t) + lambda * x * (1.0 + e2t));
}

double Gamma2Oracle::tv(double t) const {
  if (lambda != 1.0)
    throw Error("Gamma2Oracle::tv: closed form exposed for lambda == 1 only");
  return 0.5 * std::exp(-2.0 * t - 1.0);
}

double Gamma2Oracle::sample_f_R(double t, RandomStream& stream) const {
  // f_R^t = c0/2 * Exp(l) + c1/2 * Gamma(2,l), c0 = 1-e^{-2lt}, c1 = 1+e^{-2lt}.
  const double w_exp = 0.5 * (1.0 - std::exp(-2.0 * lambda * t));
  if (stream.uniform01() < w_exp) return stream.exponential(lambda);
  return stream.exponential(lambda) + stream.exponential(lambda);
}

double Gamma2Oracle::sample_f0(RandomStream& stream) const {
  if (stream.uniform01() < 0.5) return stream.exponential(lambda);
  return stream.exponential(lambda) + stream.exponential(lambda);
}

Gamma2Oracle gamma2_oracle(double lambda) {
  if (!(lambda > 0.0)) throw Error("gamma2_oracle: lambda must be positive");
  return Gamma2Oracle{lambda, 2.0 / lambda};
}

double PoissonOracle::U(double t) const { return 1.0 + lambda * t; }

double PoissonOracle::pmf(long n, double t) const {
  if (n < 1) return 0.0;
  return std::exp(-lambda * t + (n - 1) * std::log(lambda * t) -
                  std::lgamma(static_cast<double>(n)));
}

double PoissonOracle::f0(double x) const {
  return x < 0.0 ? 0.0 : lambda * std::exp(-lambda * x);
}

double PoissonOracle::F0(double x) const {
  return x <= 0.0 ? 0.0 : -std::expm1(-lambda * x);
}

PoissonOracle poisson_oracle(double lambda) {
  if (!(lambda > 0.0)) throw Error("poisson_oracle: lambda must be positive");
  return PoissonOracle{lambda};
}

}  // namespace rrs
