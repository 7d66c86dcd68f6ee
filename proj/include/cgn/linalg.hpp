#ifndef CGN_LINALG_HPP
#define CGN_LINALG_HPP

#include <Eigen/Dense>
#include <cmath>
#include <optional>

namespace cgn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Pivot tolerance used everywhere a positive-definiteness decision is made.
inline constexpr double kPdPivotTol = 1e-10;

// Lower-triangular Cholesky factor of a symmetric matrix, or nullopt when a
// pivot (the residual diagonal before its square root) falls at or below tol.
// A plain loop rather than Eigen's LLT so the pivot test is explicit.
inline std::optional<Matrix> cholesky(const Matrix& a, double tol = kPdPivotTol) {
  const Eigen::Index n = a.rows();
  if (n != a.cols()) return std::nullopt;
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = a(j, j);
    for (Eigen::Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > tol)) return std::nullopt;
    l(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

inline bool is_positive_definite(const Matrix& a, double tol = kPdPivotTol) {
  return cholesky(a, tol).has_value();
}

// Solve a x = b given the lower Cholesky factor l of a.
inline Vector cholesky_solve(const Matrix& l, const Vector& b) {
  Vector y = l.triangularView<Eigen::Lower>().solve(b);
  return l.transpose().triangularView<Eigen::Upper>().solve(y);
}

inline Matrix cholesky_inverse(const Matrix& l) {
  const Eigen::Index n = l.rows();
  Matrix inv_l = l.triangularView<Eigen::Lower>().solve(Matrix::Identity(n, n));
  return inv_l.transpose() * inv_l;
}

// log(det(a)) from a's lower Cholesky factor.
inline double cholesky_logdet(const Matrix& l) {
  return 2.0 * l.diagonal().array().log().sum();
}

inline double quadratic_form(const Matrix& a, const Vector& x) {
  return x.dot(a * x);
}

inline double max_symmetry_error(const Matrix& a) {
  return (a - a.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace cgn

#endif  // CGN_LINALG_HPP
