#ifndef CGN_DISTRIBUTIONS_HPP
#define CGN_DISTRIBUTIONS_HPP

#include <vector>

#include "cgn/linalg.hpp"

namespace cgn {

// Probability vector over m category labels. Entries strictly positive and
// summing to 1 within 1e-12.
struct MultinomialParams {
  Vector theta;

  MultinomialParams() = default;
  explicit MultinomialParams(Vector t);
  int size() const { return static_cast<int>(theta.size()); }
};

// Positive Dirichlet pseudo-counts.
struct DirichletParams {
  Vector psi;

  DirichletParams() = default;
  explicit DirichletParams(Vector p);
  int size() const { return static_cast<int>(psi.size()); }
  double total() const { return psi.sum(); }
};

// Gaussian linear regression: y ~ N(beta' z, sigma2), z = [1, regressors].
struct GaussLinRegParams {
  Vector beta;  // intercept first
  double sigma2 = 1.0;

  GaussLinRegParams() = default;
  GaussLinRegParams(Vector b, double s2);
  int dim() const { return static_cast<int>(beta.size()); }
};

// Normal-inverse-gamma over (beta, sigma2): sigma2 ~ IG(rho, phi),
// beta | sigma2 ~ N(mu, sigma2 V).
struct NigParams {
  Vector mu;
  Matrix V;
  double rho = 1.0;
  double phi = 1.0;

  NigParams() = default;
  NigParams(Vector mu_, Matrix v, double rho_, double phi_);
  int dim() const { return static_cast<int>(mu.size()); }
};

// Multivariate Student: nu degrees of freedom, location vector, PD scale
// matrix. Univariate values are held as 1-vectors.
struct StudentParams {
  double nu = 1.0;
  Vector location;
  Matrix scale;

  StudentParams() = default;
  StudentParams(double nu_, Vector loc, Matrix sc);
  static StudentParams univariate(double nu, double location, double scale);
  int dim() const { return static_cast<int>(location.size()); }
};

// ln N(y | mean, variance). Throws DomainError for variance <= 0.
double log_gaussian(double y, double mean, double variance);

// ln MVSt(x | nu, mu, Sigma).
double log_mv_student(const Vector& x, const StudentParams& params);
double log_student(double x, const StudentParams& params);

// Dirichlet conjugate update: psi'_w = psi_w + counts_w.
DirichletParams dirichlet_posterior(const DirichletParams& prior,
                                    const std::vector<long>& counts);

// Posterior-predictive category probabilities: phi_w = psi_w / sum(psi).
MultinomialParams multinomial_predictive(const DirichletParams& psi);

// NIG conjugate update from an n x p design matrix and n responses:
//   V' = (V^-1 + Z'Z)^-1,  mu' = V'(V^-1 mu + Z'y),
//   rho' = rho + n/2,
//   phi' = phi + (mu'V^-1 mu + y'y - mu''V'^-1 mu')/2.
// n = 0 returns the prior unchanged.
NigParams nig_posterior(const NigParams& prior, const Matrix& design,
                        const Vector& responses);

// Posterior predictive for one regressor vector z:
//   St(2 rho, z'mu, (phi/rho)(1 + z'Vz)).
StudentParams nig_predictive(const NigParams& params, const Vector& z);

}  // namespace cgn

#endif  // CGN_DISTRIBUTIONS_HPP
