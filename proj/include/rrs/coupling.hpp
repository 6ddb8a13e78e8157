#ifndef RRS_COUPLING_HPP
#define RRS_COUPLING_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "rrs/renewal.hpp"
#include "rrs/rng.hpp"

namespace rrs {

//! Uniform-component decomposition f = eps*Unif(a,a+b) + (1-eps)*h with
//! alpha = inf of f over (a,a+b) and eps = alpha*b.
struct UniformComponent {
  double a = 0.0;
  double b = 1.0;
  double alpha = 0.0;
  double eps = 0.0;
  ScalarFn residual;  // h(x) = (f(x) - alpha*1_{(a,a+b)}(x)) / (1-eps)
};

//! alpha is located by a fine grid scan refined around the argmin.
UniformComponent uniform_component(const ScalarFn& density, double a, double b);

//! Envelope for residual rejection: (1-eps)*h(x) <= bound * density(x).
struct Envelope {
  ScalarSampler sample;
  ScalarFn density;
  double bound = 1.0;
};

double residual_draw(const UniformComponent& comp, const Envelope& envelope,
                     RandomStream& stream, long trial_cap = 1'000'000);

enum class CouplingFamily { exponential, gamma2 };

struct CouplingCheckpoint {
  double t = 0.0;
  double r = 0.0;        // zero-delayed copy R(t_k)
  double r_prime = 0.0;  // stationary copy R'(t_k)
};

//! One run of the recursive coupling construction: shared Ber(delta) and
//! Unif(0,b) draws, independent residual draws, stopped at the first
//! Bernoulli success sigma; T = t_{sigma+1} + L_{sigma+1}.
struct CouplingRun {
  double A = 0.0;
  double b = 0.0;
  double delta = 0.0;
  long sigma = 0;
  double T = 0.0;
  std::vector<CouplingCheckpoint> checkpoints;  // k = 0 .. sigma+1
  double v_final = 0.0;                         // shared uniform at success
};

//! Mixture weight delta(A,b) of the common Unif(0,b) component of the laws
//! of R(t), t >= A.  Gamma(2,lambda): (lambda/2) e^{-lambda b}(1-e^{-2 lambda A}) * b.
double coupling_delta(CouplingFamily family, double lambda, double A, double b);

CouplingRun coupled_simulation(CouplingFamily family, double lambda, double A,
                               double b, RandomStream& stream);

struct CouplingTailRow {
  double t = 0.0;
  double p_tail = 0.0;
  double p_stderr = 0.0;
  double tv_oracle = 0.0;
  bool pass = true;
};

//! Empirical P(T > t) against the closed-form TV oracle; asserts the coupling
//! inequality TV(t) <= P(T>t) + 3*stderr at every grid point.
std::vector<CouplingTailRow> coupling_inequality_check(
    CouplingFamily family, double lambda, double A, double b,
    const std::vector<double>& t_grid, long runs, std::uint64_t seed,
    int workers);

}  // namespace rrs

#endif
