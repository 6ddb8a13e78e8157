#ifndef RRS_DISTS_HPP
#define RRS_DISTS_HPP

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "rrs/rng.hpp"

namespace rrs {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

//! Axis-aligned support box; coordinates may be infinite.
struct Box {
  std::vector<std::array<double, 2>> bounds;

  bool contains(std::span<const double> x) const {
    for (std::size_t i = 0; i < bounds.size(); ++i)
      if (x[i] < bounds[i][0] || x[i] > bounds[i][1]) return false;
    return true;
  }
  static Box whole(int dim) {
    return Box{std::vector<std::array<double, 2>>(
        static_cast<std::size_t>(dim), {kNegInf, kInf})};
  }
};

//! Unnormalized target density, evaluated in log space.  log_f_prop is
//! -inf outside `support` and exp(log_f_prop) is finite inside.
struct TargetDensity {
  int dim = 1;
  Box support;
  std::function<double(std::span<const double>)> log_f_prop;
};

//! Proposal = paired sampler and exact normalized log-density.
struct Proposal {
  int dim = 1;
  std::function<void(RandomStream&, std::span<double>)> sample;
  std::function<double(std::span<const double>)> log_g;
};

//! Laplace draw via the inverse transform scale*sign(U)*log(1-2|U|),
//! U ~ Unif(-1/2,1/2).  Mirror of the textbook sign convention, kept as is;
//! the law is symmetric either way.
double laplace_draw(RandomStream& stream, double scale);

double laplace_logpdf(double x, double scale);
double laplace_cdf(double x, double scale);
double exp_logpdf(double x, double rate);
double exp_cdf(double x, double rate);
//! Gamma(2,lambda) CDF 1 - e^{-lx}(1+lx).
double gamma2_cdf(double x, double lambda);

//! Draw from `prop` conditioned on `box` by resampling; returns the number of
//! proposal draws consumed.  Throws TrialBudgetExceeded past `trial_cap`
//! (a near-null truncation region is a configuration error).
long truncated_sample(const Proposal& prop, const Box& box, RandomStream& stream,
                      std::span<double> out, long trial_cap = 1'000'000);

//! N(mean,1) conditioned on (0,inf).  Naive resampling while the truncation
//! point is <= mean + 2, exponential-tilted rejection in the deep tail.
double truncated_normal_lower(double mean, RandomStream& stream);

//! The 2-D target exp(-r/4)(sin(2r)+1), r = |x|; support [-2pi,2pi]^2 when
//! bounded, R^2 otherwise.
TargetDensity synthetic_target(bool bounded);

//! Gamma(alpha,lambda) with f_prop = x^{alpha-1} e^{-lambda x}.
TargetDensity gamma_target(double alpha, double lambda);

Proposal exp_proposal(double rate);
//! Product Laplace(0,scale) proposal on R^2.
Proposal laplace2d_proposal(double scale);
//! Product Laplace(0,scale) conditioned on a finite box, with the exact
//! renormalized log-density.
Proposal truncated_laplace2d_proposal(double scale, const Box& box);

}  // namespace rrs

#endif
