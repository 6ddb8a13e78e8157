#include "rrs/dists.hpp"

#include <cmath>

#include "rrs/errors.hpp"
#include "rrs/math.hpp"

namespace rrs {

double laplace_draw(RandomStream& stream, double scale) {
  double u;
  do {
    u = stream.uniform01() - 0.5;
  } while (std::abs(u) >= 0.5);
  const double sign = (u >= 0.0) ? 1.0 : -1.0;
  return scale * sign * std::log1p(-2.0 * std::abs(u));
}

double laplace_logpdf(double x, double scale) {
  return -std::abs(x) / scale - std::log(2.0 * scale);
}

double laplace_cdf(double x, double scale) {
  if (x < 0.0) return 0.5 * std::exp(x / scale);
  return 1.0 - 0.5 * std::exp(-x / scale);
}

double exp_logpdf(double x, double rate) {
  if (x < 0.0) return kNegInf;
  return std::log(rate) - rate * x;
}

double exp_cdf(double x, double rate) {
  return x <= 0.0 ? 0.0 : -std::expm1(-rate * x);
}

double gamma2_cdf(double x, double lambda) {
  if (x <= 0.0) return 0.0;
  return 1.0 - std::exp(-lambda * x) * (1.0 + lambda * x);
}

long truncated_sample(const Proposal& prop, const Box& box, RandomStream& stream,
                      std::span<double> out, long trial_cap) {
  for (long trials = 1; trials <= trial_cap; ++trials) {
    prop.sample(stream, out);
    if (box.contains(out)) return trials;
  }
  throw TrialBudgetExceeded("truncated_sample: trial cap reached");
}

double truncated_normal_lower(double mean, RandomStream& stream) {
  const double a = -mean;  // standardized truncation point: Z > a
  if (a <= 2.0) {
    for (;;) {
      const double z = stream.normal();
      if (z > a) return mean + z;
    }
  }
  // Robert's exponential-tilted rejection for the deep tail.
  const double alpha = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double z = a + stream.exponential(alpha);
    const double d = z - alpha;
    if (std::log(stream.uniform01()) <= -0.5 * d * d) return mean + z;
  }
}

TargetDensity synthetic_target(bool bounded) {
  TargetDensity target;
  target.dim = 2;
  const double lim = 2.0 * M_PI;
  target.support = bounded ? Box{{{-lim, lim}, {-lim, lim}}} : Box::whole(2);
  Box support = target.support;
  target.log_f_prop = [support](std::span<const double> x) {
    if (!support.contains(x)) return kNegInf;
    const double r = std::hypot(x[0], x[1]);
    return -0.25 * r + std::log(std::sin(2.0 * r) + 1.0);
  };
  return target;
}

TargetDensity gamma_target(double alpha, double lambda) {
  TargetDensity target;
  target.dim = 1;
  target.support = Box{{{0.0, kInf}}};
  target.log_f_prop = [alpha, lambda](std::span<const double> x) {
    if (x[0] < 0.0) return kNegInf;
    if (x[0] == 0.0) return alpha > 1.0 ? kNegInf : 0.0;
    return (alpha - 1.0) * std::log(x[0]) - lambda * x[0];
  };
  return target;
}

Proposal exp_proposal(double rate) {
  Proposal prop;
  prop.dim = 1;
  prop.sample = [rate](RandomStream& stream, std::span<double> out) {
    out[0] = stream.exponential(rate);
  };
  prop.log_g = [rate](std::span<const double> x) {
    return exp_logpdf(x[0], rate);
  };
  return prop;
}

Proposal laplace2d_proposal(double scale) {
  Proposal prop;
  prop.dim = 2;
  prop.sample = [scale](RandomStream& stream, std::span<double> out) {
    out[0] = laplace_draw(stream, scale);
    out[1] = laplace_draw(stream, scale);
  };
  prop.log_g = [scale](std::span<const double> x) {
    return laplace_logpdf(x[0], scale) + laplace_logpdf(x[1], scale);
  };
  return prop;
}

Proposal truncated_laplace2d_proposal(double scale, const Box& box) {
  Proposal base = laplace2d_proposal(scale);
  double log_mass = 0.0;
  for (const auto& [lo, hi] : box.bounds)
    log_mass += std::log(laplace_cdf(hi, scale) - laplace_cdf(lo, scale));
  Proposal prop;
  prop.dim = 2;
  prop.sample = [base, box](RandomStream& stream, std::span<double> out) {
    truncated_sample(base, box, stream, out);
  };
  prop.log_g = [base, box, log_mass](std::span<const double> x) {
    if (!box.contains(x)) return kNegInf;
    return base.log_g(x) - log_mass;
  };
  return prop;
}

}  // namespace rrs
