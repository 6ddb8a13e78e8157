#ifndef RRS_PROBIT_HPP
#define RRS_PROBIT_HPP

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "rrs/dists.hpp"
#include "rrs/rng.hpp"
#include "rrs/samplers.hpp"

namespace rrs {

//! One patient record: outcome and the two immunoglobulin covariates.
struct LupusRecord {
  int y = 0;
  double igg_diff = 0.0;  // IgG3 - IgG4
  double iga = 0.0;
};

struct LupusData {
  std::vector<LupusRecord> rows;
};

//! Parse the cell-grid text format ("a/b" counts on the IgG3-IgG4 x IgA
//! grid) and expand each cell into individual records.  Checks the known
//! totals (55 patients, 18 cases).
LupusData parse_lupus(const std::string& text);
//! The embedded dataset (same text as data/lupus.txt).
LupusData load_lupus();
const std::string& lupus_table_text();

struct ProbitModel {
  Eigen::MatrixXd X_signed;  // rows (2y_i - 1) * (1, x_i)
  double prior_inv_var = 0.0;  // 0 = flat improper prior, else 1/sigma^2
};

ProbitModel build_probit_model(const LupusData& data, double prior_inv_var = 0.0);

double log_posterior(const ProbitModel& model, const Eigen::VectorXd& beta);
Eigen::VectorXd gradient(const ProbitModel& model, const Eigen::VectorXd& beta);
Eigen::MatrixXd hessian(const ProbitModel& model, const Eigen::VectorXd& beta);

struct NewtonResult {
  Eigen::VectorXd mode;
  Eigen::MatrixXd hessian_at_mode;
  int iterations = 0;
};

//! Damped Newton (Armijo backtracking) on the log-posterior with the exact
//! Hessian.  Throws NoConvergence past max_iter or when the iterates run off
//! (flat-prior separable data has no mode), IndefiniteHessian when -H fails
//! to factor at the reported mode.
NewtonResult map_newton(const ProbitModel& model, const Eigen::VectorXd& beta0,
                        double tol = 1e-8, int max_iter = 50);

//! Gaussian proposal centered at the MAP with covariance alpha^2 (-H)^{-1};
//! xi scales the RRS weight without changing the proposal law.
struct LaplaceProposal {
  Eigen::VectorXd mode;
  Eigen::MatrixXd hessian;  // H at the mode (negative definite)
  double alpha2 = 5.0;
  double xi = 2.0;
  Eigen::MatrixXd chol_lower;  // L with -H = L L^T
  double log_norm = 0.0;       // log of the proposal normalizing constant

  Eigen::VectorXd sample(RandomStream& stream) const;
  double log_pdf(const Eigen::VectorXd& beta) const;
};

LaplaceProposal make_laplace_proposal(const Eigen::VectorXd& mode,
                                      const Eigen::MatrixXd& hessian_at_mode,
                                      double alpha2, double xi);

//! RRS cycle length W(beta) = exp(xi + log posterior - log proposal pdf).
double rrs_weight_probit(const ProbitModel& model, const LaplaceProposal& prop,
                         const Eigen::VectorXd& beta);

//! Adapters into the generic sampling machinery (target carries e^xi).
TargetDensity probit_target(const ProbitModel& model, double xi);
Proposal probit_proposal(const LaplaceProposal& prop);

//! Albert-Chib data augmentation: z | beta componentwise N(X_i beta, 1)
//! truncated to (0, inf), beta | z ~ N(Sigma X^T z, Sigma) with
//! Sigma = (X^T X + prior_inv_var I)^{-1}.  The latent z is not retained.
ChainTrace gibbs_probit(const ProbitModel& model, const Eigen::VectorXd& beta0,
                        long n_steps, RandomStream& stream);

struct ComponentSummary {
  double mean = 0.0;
  double sd = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double whisker_lo = 0.0;
  double whisker_hi = 0.0;
  long outliers = 0;
};

//! Tukey boxplot statistics per component of a flat n x dim sample array.
std::vector<ComponentSummary> posterior_summary(std::span<const double> samples,
                                                int dim);

}  // namespace rrs

#endif
