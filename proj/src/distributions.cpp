#include "cgn/distributions.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cgn/errors.hpp"

namespace cgn {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // ln(2*pi)

void require(bool ok, const char* what) {
  if (!ok) throw ContractViolation(what);
}

}  // namespace

MultinomialParams::MultinomialParams(Vector t) : theta(std::move(t)) {
  require(theta.size() > 0, "MultinomialParams: empty vector");
  require((theta.array() > 0.0).all(), "MultinomialParams: entries must be > 0");
  require(std::abs(theta.sum() - 1.0) <= 1e-12, "MultinomialParams: entries must sum to 1");
}

DirichletParams::DirichletParams(Vector p) : psi(std::move(p)) {
  require(psi.size() > 0, "DirichletParams: empty vector");
  require((psi.array() > 0.0).all() && psi.allFinite(),
          "DirichletParams: entries must be positive and finite");
}

GaussLinRegParams::GaussLinRegParams(Vector b, double s2) : beta(std::move(b)), sigma2(s2) {
  require(beta.size() > 0 && beta.allFinite(), "GaussLinRegParams: beta must be finite");
  require(sigma2 > 0.0 && std::isfinite(sigma2), "GaussLinRegParams: sigma2 must be > 0");
}

NigParams::NigParams(Vector mu_, Matrix v, double rho_, double phi_)
    : mu(std::move(mu_)), V(std::move(v)), rho(rho_), phi(phi_) {
  require(mu.size() > 0 && V.rows() == mu.size() && V.cols() == mu.size(),
          "NigParams: dimension mismatch between mu and V");
  require(max_symmetry_error(V) <= 1e-10, "NigParams: V must be symmetric");
  require(is_positive_definite(V, 0.0), "NigParams: V must be positive definite");
  require(rho > 0.0 && phi > 0.0, "NigParams: rho and phi must be > 0");
}

StudentParams::StudentParams(double nu_, Vector loc, Matrix sc)
    : nu(nu_), location(std::move(loc)), scale(std::move(sc)) {
  require(nu > 0.0, "StudentParams: nu must be > 0");
  require(location.size() > 0 && scale.rows() == location.size() &&
              scale.cols() == location.size(),
          "StudentParams: dimension mismatch");
  require(is_positive_definite(scale, 0.0), "StudentParams: scale must be positive definite");
}

StudentParams StudentParams::univariate(double nu, double location, double scale) {
  Vector loc(1);
  loc << location;
  Matrix sc(1, 1);
  sc << scale;
  return StudentParams(nu, std::move(loc), std::move(sc));
}

double log_gaussian(double y, double mean, double variance) {
  if (!(variance > 0.0)) throw DomainError("log_gaussian: variance must be > 0");
  const double d = y - mean;
  return -0.5 * (kLog2Pi + std::log(variance)) - d * d / (2.0 * variance);
}

double log_mv_student(const Vector& x, const StudentParams& params) {
  const int m = params.dim();
  if (x.size() != m) throw ContractViolation("log_mv_student: dimension mismatch");
  const auto l = cholesky(params.scale, 0.0);
  if (!l) throw DomainError("log_mv_student: singular scale matrix");
  const Vector d = x - params.location;
  const Vector w = l->triangularView<Eigen::Lower>().solve(d);
  const double maha = w.squaredNorm();
  const double nu = params.nu;
  return std::lgamma(0.5 * (nu + m)) - std::lgamma(0.5 * nu) -
         0.5 * m * std::log(std::numbers::pi * nu) - 0.5 * cholesky_logdet(*l) -
         0.5 * (nu + m) * std::log1p(maha / nu);
}

double log_student(double x, const StudentParams& params) {
  Vector v(1);
  v << x;
  return log_mv_student(v, params);
}

DirichletParams dirichlet_posterior(const DirichletParams& prior,
                                    const std::vector<long>& counts) {
  if (static_cast<int>(counts.size()) != prior.size())
    throw ContractViolation("dirichlet_posterior: counts length mismatch");
  Vector psi = prior.psi;
  for (int i = 0; i < prior.size(); ++i) {
    if (counts[i] < 0) throw ContractViolation("dirichlet_posterior: negative count");
    psi[i] += static_cast<double>(counts[i]);
  }
  return DirichletParams(std::move(psi));
}

MultinomialParams multinomial_predictive(const DirichletParams& psi) {
  return MultinomialParams(psi.psi / psi.total());
}

NigParams nig_posterior(const NigParams& prior, const Matrix& design,
                        const Vector& responses) {
  const int p = prior.dim();
  if (design.cols() != p)
    throw ContractViolation("nig_posterior: design has wrong column count");
  if (design.rows() != responses.size())
    throw ContractViolation("nig_posterior: design rows and responses misaligned");
  const auto n = design.rows();
  if (n == 0) return prior;

  const auto lv = cholesky(prior.V, 0.0);
  if (!lv) throw NumericalError("nig_posterior: prior V not factorizable");
  const Matrix v_inv = cholesky_inverse(*lv);

  const Matrix post_precision = v_inv + design.transpose() * design;
  const auto lp = cholesky(post_precision, 0.0);
  if (!lp) {
    std::ostringstream os;
    os << "nig_posterior: posterior precision not positive definite (p=" << p
       << ", n=" << n << ", min diag=" << post_precision.diagonal().minCoeff() << ")";
    throw NumericalError(os.str());
  }
  const Matrix v_post = cholesky_inverse(*lp);

  const Vector rhs = v_inv * prior.mu + design.transpose() * responses;
  const Vector mu_post = cholesky_solve(*lp, rhs);

  const double rho_post = prior.rho + 0.5 * static_cast<double>(n);
  const double phi_post =
      prior.phi + 0.5 * (quadratic_form(v_inv, prior.mu) + responses.squaredNorm() -
                         mu_post.dot(rhs));

  // Re-symmetrize: cholesky_inverse is symmetric up to rounding, the type
  // invariant requires 1e-10.
  const Matrix v_sym = 0.5 * (v_post + v_post.transpose());
  return NigParams(mu_post, v_sym, rho_post, phi_post);
}

StudentParams nig_predictive(const NigParams& params, const Vector& z) {
  if (z.size() != params.dim())
    throw ContractViolation("nig_predictive: regressor length mismatch");
  const double location = z.dot(params.mu);
  const double scale = params.phi / params.rho * (1.0 + quadratic_form(params.V, z));
  return StudentParams::univariate(2.0 * params.rho, location, scale);
}

}  // namespace cgn
