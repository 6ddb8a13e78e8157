#ifndef RRS_RENEWAL_HPP
#define RRS_RENEWAL_HPP

#include <functional>
#include <vector>

#include "rrs/rng.hpp"

namespace rrs {

using ScalarSampler = std::function<double(RandomStream&)>;
using ScalarFn = std::function<double(double)>;

//! Epochs T_n of one renewal path, simulated past `horizon` with one
//! overshoot retained.  epochs[0] is the delay (0 for a pure process).
struct RenewalTrace {
  double delay = 0.0;
  std::vector<double> epochs;
  double horizon = 0.0;
};

//! Recurrence processes at a query time: n = N(t) = inf{n : T_n > t},
//! elapsed E(t), residual R(t), current C(t) = E + R.  The epoch at 0 counts
//! for zero-delayed traces, matching U(t) = 1 + lambda t for the Poisson case.
struct RenewalState {
  double t = 0.0;
  long n = 0;
  double elapsed = 0.0;
  double residual = 0.0;
  double current = 0.0;
};

struct StationaryLaw {
  ScalarFn f0_density;  // Fbar(x)/mu
  ScalarFn f0_cdf;
  ScalarFn f1_density;  // x f(x)/mu (length-biased)
  double mu = 0.0;
};

//! delay == nullptr gives the zero-delayed process.
RenewalTrace simulate_renewal(const ScalarSampler& interarrival,
                              const ScalarSampler* delay, double horizon,
                              RandomStream& stream);

RenewalState state_at(const RenewalTrace& trace, double t);

//! Stationary recurrence-time law from the interarrival CDF.  The density of
//! F1 needs the interarrival density; a central difference of the CDF is used
//! when it is not supplied.
StationaryLaw stationary_law(const ScalarFn& interarrival_cdf, double mu,
                             ScalarFn interarrival_density = {});

//! Forward recursion for Z = z + F*Z on a uniform grid, F absolutely
//! continuous with the given density.  Left-endpoint (first-order) rule, so
//! the error halves when the step does.
std::vector<double> solve_renewal_equation(const ScalarFn& z,
                                           const ScalarFn& interarrival_density,
                                           double grid_step, double t_max);

//! Closed forms for the Gamma(2,lambda) interarrival family.
struct Gamma2Oracle {
  double lambda = 1.0;
  double mu = 2.0;

  double f0(double x) const;   // stationary density
  double F0(double x) const;   // stationary CDF
  double u1(double x) const;   // Stone density of the renewal measure
  double F_R(double t, double x) const;  // law of R(t), zero-delayed
  //! Density of R(t).  Obtained by differentiating the CDF; the leading
  //! factor is lambda/2, not lambda x/2 (numeric differentiation of F_R
  //! confirms to 1e-6, and this is the version that integrates to one).
  double f_R(double t, double x) const;
  //! Exact TV distance between R(t) and F0; exposed for lambda == 1 where
  //! the closed-form constant 1/(2e) is checked by quadrature.
  double tv(double t) const;

  //! Exact draws via the Exp/Gamma2 mixture representation of f_R^t.
  double sample_f_R(double t, RandomStream& stream) const;
  double sample_f0(RandomStream& stream) const;
};

Gamma2Oracle gamma2_oracle(double lambda);

//! Closed forms for the Exp(lambda) (Poisson) family.
struct PoissonOracle {
  double lambda = 1.0;
  double U(double t) const;             // renewal function 1 + lambda t
  double pmf(long n, double t) const;   // shifted Poisson law of N(t), n >= 1
  double f0(double x) const;            // stationary Exp density
  double F0(double x) const;
};

PoissonOracle poisson_oracle(double lambda);

}  // namespace rrs

#endif
