#ifndef RRS_MATH_HPP
#define RRS_MATH_HPP

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace rrs {

//! Neumaier compensated accumulator.  Partial sums of RRS cycle lengths run
//! to 1e6+ terms of widely varying magnitude; plain summation drifts.
class KahanSum {
public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double total() const { return sum_ + comp_; }
  void reset() { sum_ = comp_ = 0.0; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double norm_pdf(double x);
double norm_cdf(double x);
//! log Phi(x); erfc-based above -8, Mills asymptotic expansion below.
double log_norm_cdf(double x);
//! Inverse Mills ratio phi(x)/Phi(x).
double inv_mills(double x);
//! Standard normal quantile, |error| < 1e-13 (rational approx + one Halley step).
double norm_quantile(double p);

//! Regularized lower incomplete gamma P(a,x).
double gamma_p(double a, double x);
//! Regularized upper incomplete gamma Q(a,x).
double gamma_q(double a, double x);
//! Survival function of chi-square with df degrees of freedom.
double chi2_sf(double x, double df);

//! Adaptive Simpson quadrature on [a,b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10);
//! Adaptive quadrature on [a, inf) via u = a + s/(1-s) substitution.
double integrate_semi_inf(const std::function<double(double)>& f, double a,
                          double tol = 1e-10);
//! Iterated adaptive quadrature over an axis-aligned rectangle.
double integrate2d(const std::function<double(double, double)>& f, double x_lo,
                   double x_hi, double y_lo, double y_hi, double tol = 1e-8);

//! Kolmogorov-Smirnov statistic of a sample against a CDF (sorts a copy).
double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf);

double mean(std::span<const double> xs);
double variance(std::span<const double> xs);  // divisor n-1
double pearson_corr(std::span<const double> xs, std::span<const double> ys);
//! Least-squares slope of y on x.
double ols_slope(std::span<const double> xs, std::span<const double> ys);
//! Type-7 (linear interpolation) quantile of a sorted sample.
double quantile_sorted(std::span<const double> sorted, double p);

}  // namespace rrs

#endif
