#include "rrs/probit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rrs/errors.hpp"
#include "rrs/math.hpp"

namespace rrs {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

// The Latent Membranous Lupus Nephritis table: rows IgG3-IgG4, columns IgA,
// cells "cases/total".
const char* const kLupusTable = R"(# Latent membranous lupus nephritis, 55 patients
# cell = cases/total at (IgG3-IgG4, IgA)
iga:   0    0.5  1    1.5  2
-3.0   0/1  -    -    -    -
-2.5   0/3  -    -    -    -
-2.0   0/7  -    -    -    0/1
-1.5   0/6  0/1  -    -    -
-1.0   0/6  0/1  0/1  -    0/1
-0.5   0/4  -    -    1/1  -
0.0    0/3  -    0/1  1/1  -
0.5    3/4  -    1/1  1/1  1/1
1.0    1/1  -    1/1  1/1  4/4
1.5    1/1  -    -    2/2  -
)";

}  // namespace

const std::string& lupus_table_text() {
  static const std::string text = kLupusTable;
  return text;
}

LupusData parse_lupus(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> iga_grid;
  LupusData data;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "iga:") {
      double v;
      while (ls >> v) iga_grid.push_back(v);
      continue;
    }
    if (iga_grid.empty()) throw DataIntegrity("lupus table: missing iga header");
    const double igg = std::stod(tok);
    for (double iga : iga_grid) {
      if (!(ls >> tok)) throw DataIntegrity("lupus table: short row");
      if (tok == "-") continue;
      const auto slash = tok.find('/');
      if (slash == std::string::npos)
        throw DataIntegrity("lupus table: bad cell " + tok);
      const int cases = std::stoi(tok.substr(0, slash));
      const int total = std::stoi(tok.substr(slash + 1));
      if (cases < 0 || total < cases)
        throw DataIntegrity("lupus table: bad counts in " + tok);
      for (int i = 0; i < total; ++i)
        data.rows.push_back({i < cases ? 1 : 0, igg, iga});
    }
  }
  long positives = 0;
  for (const auto& r : data.rows) positives += r.y;
  if (data.rows.size() != 55 || positives != 18)
    throw DataIntegrity("lupus table: expected 55 patients with 18 cases, got " +
                        std::to_string(data.rows.size()) + "/" +
                        std::to_string(positives));
  return data;
}

LupusData load_lupus() { return parse_lupus(lupus_table_text()); }

ProbitModel build_probit_model(const LupusData& data, double prior_inv_var) {
  const long n = static_cast<long>(data.rows.size());
  ProbitModel model;
  model.prior_inv_var = prior_inv_var;
  model.X_signed.resize(n, 3);
  for (long i = 0; i < n; ++i) {
    const auto& r = data.rows[static_cast<std::size_t>(i)];
    const double s = 2.0 * r.y - 1.0;
    model.X_signed(i, 0) = s;
    model.X_signed(i, 1) = s * r.igg_diff;
    model.X_signed(i, 2) = s * r.iga;
  }
  return model;
}

double log_posterior(const ProbitModel& model, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd u = model.X_signed * beta;
  double lp = 0.0;
  for (long i = 0; i < u.size(); ++i) lp += log_norm_cdf(u(i));
  if (model.prior_inv_var > 0.0)
    lp -= 0.5 * model.prior_inv_var * beta.squaredNorm();
  return lp;
}

Eigen::VectorXd gradient(const ProbitModel& model, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd u = model.X_signed * beta;
  Eigen::VectorXd eta(u.size());
  for (long i = 0; i < u.size(); ++i) eta(i) = inv_mills(u(i));
  Eigen::VectorXd g = model.X_signed.transpose() * eta;
  if (model.prior_inv_var > 0.0) g -= model.prior_inv_var * beta;
  return g;
}

Eigen::MatrixXd hessian(const ProbitModel& model, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd u = model.X_signed * beta;
  Eigen::VectorXd d(u.size());
  for (long i = 0; i < u.size(); ++i) {
    const double m = inv_mills(u(i));
    d(i) = -u(i) * m - m * m;
  }
  Eigen::MatrixXd H =
      model.X_signed.transpose() * d.asDiagonal() * model.X_signed;
  if (model.prior_inv_var > 0.0)
    H -= model.prior_inv_var *
         Eigen::MatrixXd::Identity(beta.size(), beta.size());
  return H;
}

NewtonResult map_newton(const ProbitModel& model, const Eigen::VectorXd& beta0,
                        double tol, int max_iter) {
  if (!(tol > 0.0)) throw Error("map_newton: tol must be positive");
  Eigen::VectorXd beta = beta0;
  double lp = log_posterior(model, beta);
  for (int iter = 1; iter <= max_iter; ++iter) {
    const Eigen::VectorXd g = gradient(model, beta);
    if (g.lpNorm<Eigen::Infinity>() <= tol) {
      // With a flat prior, a vanishing gradient in the far tail is how
      // perfectly separated data look: every argument is nonnegative, the
      // likelihood still increases along the ray t*beta, and the mode sits
      // at infinity.
      if (model.prior_inv_var == 0.0 && beta.squaredNorm() > 0.0 &&
          (model.X_signed * beta).minCoeff() >= 0.0)
        throw NoConvergence(
            "map_newton: data are separated, flat-prior mode at infinity");
      const Eigen::MatrixXd H = hessian(model, beta);
      Eigen::LLT<Eigen::MatrixXd> llt(-H);
      if (llt.info() != Eigen::Success)
        throw IndefiniteHessian("map_newton: -H not positive definite at mode");
      return {beta, H, iter - 1};
    }
    const Eigen::MatrixXd H = hessian(model, beta);
    Eigen::LLT<Eigen::MatrixXd> llt(-H);
    if (llt.info() != Eigen::Success)
      throw IndefiniteHessian("map_newton: -H not positive definite");
    const Eigen::VectorXd dir = llt.solve(g);
    double step = 1.0;
    const double slope = g.dot(dir);
    for (int back = 0; back < 60; ++back) {
      const Eigen::VectorXd cand = beta + step * dir;
      const double lp_cand = log_posterior(model, cand);
      if (lp_cand >= lp + 1e-4 * step * slope) {
        beta = cand;
        lp = lp_cand;
        break;
      }
      step *= 0.5;
    }
    // Separable data sends the flat-prior mode to infinity; fail loudly.
    if (beta.norm() > 1e3)
      throw NoConvergence("map_newton: iterates diverging (mode at infinity?)");
  }
  throw NoConvergence("map_newton: gradient tolerance not reached");
}

Eigen::VectorXd LaplaceProposal::sample(RandomStream& stream) const {
  Eigen::VectorXd z(mode.size());
  for (long i = 0; i < z.size(); ++i) z(i) = stream.normal();
  // cov = alpha^2 (-H)^{-1} = (alpha L^{-T}) (alpha L^{-T})^T
  return mode + std::sqrt(alpha2) *
                    chol_lower.transpose().triangularView<Eigen::Upper>().solve(z);
}

double LaplaceProposal::log_pdf(const Eigen::VectorXd& beta) const {
  const Eigen::VectorXd d = beta - mode;
  // d^T (-H) d via the Cholesky factor
  const Eigen::VectorXd Ltd = chol_lower.transpose() * d;
  return log_norm - 0.5 * Ltd.squaredNorm() / alpha2;
}

LaplaceProposal make_laplace_proposal(const Eigen::VectorXd& mode,
                                      const Eigen::MatrixXd& hessian_at_mode,
                                      double alpha2, double xi) {
  LaplaceProposal prop;
  prop.mode = mode;
  prop.hessian = hessian_at_mode;
  prop.alpha2 = alpha2;
  prop.xi = xi;
  Eigen::LLT<Eigen::MatrixXd> llt(-hessian_at_mode);
  if (llt.info() != Eigen::Success)
    throw IndefiniteHessian("make_laplace_proposal: -H not positive definite");
  prop.chol_lower = llt.matrixL();
  const long k = mode.size();
  double log_det_negH = 0.0;
  for (long i = 0; i < k; ++i) log_det_negH += 2.0 * std::log(prop.chol_lower(i, i));
  // log det cov = k log alpha^2 - log det(-H)
  prop.log_norm = -0.5 * (k * kLog2Pi + k * std::log(alpha2) - log_det_negH);
  return prop;
}

double rrs_weight_probit(const ProbitModel& model, const LaplaceProposal& prop,
                         const Eigen::VectorXd& beta) {
  return std::exp(prop.xi + log_posterior(model, beta) - prop.log_pdf(beta));
}

TargetDensity probit_target(const ProbitModel& model, double xi) {
  TargetDensity target;
  target.dim = static_cast<int>(model.X_signed.cols());
  target.support = Box::whole(target.dim);
  target.log_f_prop = [model, xi](std::span<const double> x) {
    const Eigen::Map<const Eigen::VectorXd> beta(x.data(),
                                                 static_cast<long>(x.size()));
    return xi + log_posterior(model, beta);
  };
  return target;
}

Proposal probit_proposal(const LaplaceProposal& prop) {
  Proposal out;
  out.dim = static_cast<int>(prop.mode.size());
  out.sample = [prop](RandomStream& stream, std::span<double> x) {
    const Eigen::VectorXd draw = prop.sample(stream);
    for (long i = 0; i < draw.size(); ++i) x[static_cast<std::size_t>(i)] = draw(i);
  };
  out.log_g = [prop](std::span<const double> x) {
    const Eigen::Map<const Eigen::VectorXd> beta(x.data(),
                                                 static_cast<long>(x.size()));
    return prop.log_pdf(beta);
  };
  return out;
}

ChainTrace gibbs_probit(const ProbitModel& model, const Eigen::VectorXd& beta0,
                        long n_steps, RandomStream& stream) {
  const long n = model.X_signed.rows();
  const long k = model.X_signed.cols();
  Eigen::MatrixXd precision = model.X_signed.transpose() * model.X_signed;
  if (model.prior_inv_var > 0.0)
    precision += model.prior_inv_var * Eigen::MatrixXd::Identity(k, k);
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success)
    throw SingularDesign("gibbs_probit: X^T X + prior not positive definite");
  // Rounding can push an exactly singular design through the factorization;
  // a collapsed pivot is still a singular design.
  const Eigen::MatrixXd L = llt.matrixL();
  if (L.diagonal().minCoeff() <= 1e-7 * L.diagonal().maxCoeff())
    throw SingularDesign("gibbs_probit: rank-deficient design matrix");

  ChainTrace trace;
  trace.dim = static_cast<int>(k);
  trace.states.reserve(static_cast<std::size_t>(n_steps * k));
  trace.accepts.assign(static_cast<std::size_t>(n_steps), 1);  // Gibbs always moves
  trace.acceptance_rate = 1.0;

  Eigen::VectorXd beta = beta0;
  Eigen::VectorXd z(n), xi(k);
  for (long step = 0; step < n_steps; ++step) {
    const Eigen::VectorXd mean = model.X_signed * beta;
    for (long i = 0; i < n; ++i) z(i) = truncated_normal_lower(mean(i), stream);
    const Eigen::VectorXd rhs = model.X_signed.transpose() * z;
    const Eigen::VectorXd mu = llt.solve(rhs);
    for (long i = 0; i < k; ++i) xi(i) = stream.normal();
    // beta = mu + L^{-T} xi gives covariance (X^T X + prior)^{-1}
    beta = mu + llt.matrixU().solve(xi);
    for (long i = 0; i < k; ++i) trace.states.push_back(beta(i));
  }
  return trace;
}

std::vector<ComponentSummary> posterior_summary(std::span<const double> samples,
                                                int dim) {
  const long n = static_cast<long>(samples.size()) / dim;
  if (n < 2) throw Error("posterior_summary: need at least 2 samples");
  std::vector<ComponentSummary> out(static_cast<std::size_t>(dim));
  std::vector<double> col(static_cast<std::size_t>(n));
  for (int j = 0; j < dim; ++j) {
    for (long i = 0; i < n; ++i)
      col[static_cast<std::size_t>(i)] =
          samples[static_cast<std::size_t>(i) * dim + j];
    std::sort(col.begin(), col.end());
    ComponentSummary& cs = out[static_cast<std::size_t>(j)];
    cs.mean = mean(col);
    cs.sd = n > 1 ? std::sqrt(variance(col)) : 0.0;
    cs.q1 = quantile_sorted(col, 0.25);
    cs.median = quantile_sorted(col, 0.5);
    cs.q3 = quantile_sorted(col, 0.75);
    const double iqr = cs.q3 - cs.q1;
    const double lo_fence = cs.q1 - 1.5 * iqr, hi_fence = cs.q3 + 1.5 * iqr;
    cs.whisker_lo = cs.q3;
    cs.whisker_hi = cs.q1;
    cs.outliers = 0;
    for (double v : col) {
      if (v < lo_fence || v > hi_fence)
        ++cs.outliers;
      else {
        cs.whisker_lo = std::min(cs.whisker_lo, v);
        cs.whisker_hi = std::max(cs.whisker_hi, v);
      }
    }
  }
  return out;
}

}  // namespace rrs
