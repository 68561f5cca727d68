#pragma once

#include "frameforge/frame.hpp"
#include "frameforge/rational.hpp"

#include <string>
#include <vector>

namespace frameforge {

using IntMat = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

IntMat sylvester_hadamard(int n);

struct HadamardFuntf {
  int n = 0;
  IntMat hadamard;
  // Squared column scalings of the two stacked blocks.
  std::vector<Rational> alpha2;
  std::vector<Rational> beta2;
  Eigen::MatrixXd matrix;  // 2^{n+1} x 2^n, rows are the frame vectors

  int rows() const { return static_cast<int>(matrix.rows()); }
  int cols() const { return static_cast<int>(matrix.cols()); }
  Frame to_frame() const;
};

HadamardFuntf build_funtf(int n);

struct FuntfInvariants {
  bool hadamard_orthogonal = false;  // H H^T = 2^n I in integers
  bool rows_unit = false;            // exact squared row norms equal 1
  bool columns_orthogonal = false;
  bool columns_norm_two = false;
  bool all() const { return hadamard_orthogonal && rows_unit && columns_orthogonal && columns_norm_two; }
};

// Exact checks in integer/rational arithmetic.
FuntfInvariants funtf_invariants(const HadamardFuntf& f);

// <x_j, x_{j+2^{n-1}}> for rows j, j + 2^{n-1} of the second block, exactly.
Rational aligned_pair_inner_product(const HadamardFuntf& f, int j = 0);

double case_one_bound(int n);  // 2 / (2^{n-1} + 1)
double pair_bound(int n);      // 1 - (2^{n-1} - 1)/(2^{n-1} + 1)

struct RieszAudit {
  int case_id = 0;  // 1, 2 or 3
  bool spanning = false;
  double lower_riesz = 0.0;
  double case_bound = 0.0;
  bool bound_holds = false;
};

RieszAudit subset_riesz_audit(const HadamardFuntf& f, const std::vector<int>& subset);
RieszAudit subset_riesz_audit(const Eigen::MatrixXd& rows, int n, const std::vector<int>& subset);

struct AuditRow {
  std::vector<int> subset;
  RieszAudit audit;
};

struct ExhaustiveAudit {
  int n = 0;
  long long subsets = 0;
  long long spanning = 0;
  double max_lower_riesz = 0.0;
  std::vector<int> argmax;
  double bound = 0.0;  // max(case-one bound, pair bound)
  std::vector<AuditRow> rows;
};

ExhaustiveAudit exhaustive_basis_audit(const HadamardFuntf& f, bool keep_rows = false);

// k stacked copies of the FUNTF rows.
Eigen::MatrixXd funtf_copies(const HadamardFuntf& f, int k);

std::string audit_csv(const ExhaustiveAudit& a);

}  // namespace frameforge
