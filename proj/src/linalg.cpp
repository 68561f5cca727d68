#include "frameforge/linalg.hpp"

#include "frameforge/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace frameforge {

Mat hermitian_part(const Mat& a) {
  return (a + a.adjoint()) * 0.5;
}

EigenPairs hermitian_eigen(const Mat& a) {
  if (a.rows() == 0) return {Eigen::VectorXd(0), Mat(0, 0)};
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(a));
  if (es.info() != Eigen::Success)
    throw NumericalFailure("hermitian_eigen: solver did not converge", INFINITY);
  EigenPairs out{es.eigenvalues(), es.eigenvectors()};
  double scale = std::max(1.0, out.values.cwiseAbs().maxCoeff());
  double resid = (hermitian_part(a) * out.vectors -
                  out.vectors * out.values.cast<cplx>().asDiagonal())
                     .norm();
  if (!std::isfinite(resid) || resid > 1e-8 * scale * a.rows())
    throw NumericalFailure("hermitian_eigen: residual too large", resid);
  return out;
}

Eigen::VectorXd hermitian_eigenvalues(const Mat& a) {
  if (a.rows() == 0) return Eigen::VectorXd(0);
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalFailure("hermitian_eigenvalues: solver did not converge", INFINITY);
  return es.eigenvalues();
}

double lambda_max(const Mat& a) {
  if (a.rows() == 0) return 0.0;
  return hermitian_eigenvalues(a).maxCoeff();
}

double lambda_min(const Mat& a) {
  if (a.rows() == 0) return 0.0;
  return hermitian_eigenvalues(a).minCoeff();
}

Mat hermitian_power(const Mat& a, double p, double floor) {
  EigenPairs e = hermitian_eigen(a);
  Eigen::VectorXd v = e.values;
  for (int i = 0; i < v.size(); ++i) v[i] = std::pow(std::max(v[i], floor), p);
  return e.vectors * v.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

Mat inverse_sqrt(const Mat& a) {
  EigenPairs e = hermitian_eigen(a);
  if (e.values.size() && e.values.minCoeff() <= 0.0)
    throw NumericalFailure("inverse_sqrt: operator not positive definite", e.values.minCoeff());
  Eigen::VectorXd v = e.values.cwiseSqrt().cwiseInverse();
  return e.vectors * v.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

Mat sqrt_psd(const Mat& a) {
  return hermitian_power(a, 0.5, 0.0);
}

Mat orthonormal_span(const Mat& a, double rel_tol) {
  if (a.cols() == 0 || a.rows() == 0) return Mat(a.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  double top = s.size() ? s[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > rel_tol * std::max(top, 1.0)) ++rank;
  return svd.matrixU().leftCols(rank);
}

Mat orthogonal_complement(const Mat& q, int dim) {
  Mat p = Mat::Identity(dim, dim);
  if (q.cols() > 0) p -= q * q.adjoint();
  return orthonormal_span(p, 1e-8);
}

}  // namespace frameforge
