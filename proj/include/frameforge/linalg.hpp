#pragma once

#include <Eigen/Dense>

#include <complex>

namespace frameforge {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

struct EigenPairs {
  Eigen::VectorXd values;  // ascending
  Mat vectors;
};

// Hermitian eigendecomposition; throws NumericalFailure if the solver
// fails or the reconstruction residual is off.
EigenPairs hermitian_eigen(const Mat& a);
Eigen::VectorXd hermitian_eigenvalues(const Mat& a);

double lambda_max(const Mat& a);
double lambda_min(const Mat& a);

Mat hermitian_part(const Mat& a);
Mat hermitian_power(const Mat& a, double p, double floor = 0.0);
Mat inverse_sqrt(const Mat& a);
Mat sqrt_psd(const Mat& a);

// Orthonormal basis (columns) for the column span of `a`, rank cut at rel_tol.
Mat orthonormal_span(const Mat& a, double rel_tol = 1e-10);
// Orthonormal basis for the orthogonal complement of span(q) inside C^dim.
Mat orthogonal_complement(const Mat& q, int dim);

}  // namespace frameforge
