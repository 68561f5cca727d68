#include "frameforge/funtf.hpp"

#include "frameforge/errors.hpp"
#include "frameforge/parallel.hpp"

#include <cmath>
#include <sstream>

namespace frameforge {

IntMat sylvester_hadamard(int n) {
  if (n < 1) throw InvalidInput("Hadamard order must be at least 1");
  if (n > 20) throw ResourceLimit("Hadamard order too large");
  IntMat h(1, 1);
  h(0, 0) = 1;
  for (int k = 0; k < n; ++k) {
    const Eigen::Index s = h.rows();
    IntMat g(2 * s, 2 * s);
    g << h, h, h, -h;
    h = g;
  }
  return h;
}

HadamardFuntf build_funtf(int n) {
  if (n < 2) throw InvalidInput("FUNTF construction needs n >= 2");
  if (n > 12) throw ResourceLimit("FUNTF order too large");
  HadamardFuntf f;
  f.n = n;
  f.hadamard = sylvester_hadamard(n);
  const long long half = 1LL << (n - 1);
  const int cols = 1 << n;
  for (int c = 0; c < cols; ++c) {
    if (c < half - 1) {
      f.alpha2.emplace_back(1, half);
      f.beta2.emplace_back(0, 1);
    } else {
      f.alpha2.emplace_back(1, half * (half + 1));
      f.beta2.emplace_back(1, half + 1);
    }
  }
  f.matrix.resize(2 * cols, cols);
  for (int r = 0; r < cols; ++r)
    for (int c = 0; c < cols; ++c) {
      double h = static_cast<double>(f.hadamard(r, c));
      f.matrix(r, c) = h * std::sqrt(to_double(f.alpha2[c]));
      f.matrix(cols + r, c) = h * std::sqrt(to_double(f.beta2[c]));
    }
  FuntfInvariants inv = funtf_invariants(f);
  if (!inv.all()) throw NumericalFailure("FUNTF invariants failed in exact arithmetic", 0.0);
  return f;
}

Frame HadamardFuntf::to_frame() const {
  return Frame::from_columns(matrix.transpose().cast<cplx>(), Field::Real);
}

FuntfInvariants funtf_invariants(const HadamardFuntf& f) {
  FuntfInvariants inv;
  const int cols = f.cols();
  IntMat hh = f.hadamard * f.hadamard.transpose();
  inv.hadamard_orthogonal = hh == IntMat::Identity(cols, cols) * static_cast<long long>(cols);
  // Entries are h_rc * sqrt(s_c), h = +-1, so squared entries are s_c exactly.
  inv.rows_unit = true;
  for (const auto* scale : {&f.alpha2, &f.beta2}) {
    Rational s(0);
    for (const auto& v : *scale) s = radd(s, v);
    if (s != Rational(1)) inv.rows_unit = false;
  }
  // Column inner product: (a_c a_c' + b_c b_c') (H^T H)_{cc'}; H^T H is diagonal.
  IntMat hth = f.hadamard.transpose() * f.hadamard;
  inv.columns_orthogonal = hth == IntMat::Identity(cols, cols) * static_cast<long long>(cols);
  inv.columns_norm_two = true;
  for (int c = 0; c < cols; ++c) {
    Rational sq = rmul(Rational(hth(c, c)), radd(f.alpha2[c], f.beta2[c]));
    if (sq != Rational(2)) inv.columns_norm_two = false;
  }
  return inv;
}

Rational aligned_pair_inner_product(const HadamardFuntf& f, int j) {
  const int half = 1 << (f.n - 1);
  if (j < 0 || j >= half) throw InvalidInput("aligned pair row out of range");
  Rational s(0);
  for (int c = 0; c < f.cols(); ++c) {
    long long sign = f.hadamard(j, c) * f.hadamard(j + half, c);
    s = radd(s, rmul(Rational(sign), f.beta2[c]));
  }
  return s;
}

double case_one_bound(int n) { return 2.0 / (std::ldexp(1.0, n - 1) + 1.0); }

double pair_bound(int n) {
  double h = std::ldexp(1.0, n - 1);
  return 1.0 - (h - 1.0) / (h + 1.0);
}

RieszAudit subset_riesz_audit(const Eigen::MatrixXd& rows, int n, const std::vector<int>& subset) {
  const int size = 1 << n;
  if (static_cast<int>(subset.size()) != size)
    throw InvalidInput("audit subset must have exactly 2^n = " + std::to_string(size) + " rows");
  const int first = 1 << n;
  int in_first = 0;
  Eigen::MatrixXd s(size, rows.cols());
  for (int k = 0; k < size; ++k) {
    int r = subset[k];
    if (r < 0 || r >= rows.rows()) throw InvalidInput("audit subset index out of range");
    if (r % (2 * first) < first) ++in_first;
    s.row(k) = rows.row(r);
  }
  const int pivot = (1 << (n - 1)) - 1;
  RieszAudit a;
  a.case_id = in_first > pivot ? 1 : (in_first < pivot ? 2 : 3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s * s.transpose(), Eigen::EigenvaluesOnly);
  a.lower_riesz = std::max(0.0, es.eigenvalues()(0));
  a.spanning = a.lower_riesz > 1e-10;
  if (!a.spanning) a.lower_riesz = 0.0;
  switch (a.case_id) {
    case 1:
      a.case_bound = case_one_bound(n);
      a.bound_holds = !a.spanning || a.lower_riesz <= a.case_bound + 1e-10;
      break;
    case 2:
      a.case_bound = 0.0;
      a.bound_holds = !a.spanning;
      break;
    default:
      a.case_bound = pair_bound(n);
      a.bound_holds = !a.spanning || a.lower_riesz <= a.case_bound + 1e-10;
  }
  return a;
}

RieszAudit subset_riesz_audit(const HadamardFuntf& f, const std::vector<int>& subset) {
  return subset_riesz_audit(f.matrix, f.n, subset);
}

namespace {

bool next_combination(std::vector<int>& c, int n) {
  const int k = static_cast<int>(c.size());
  int i = k - 1;
  while (i >= 0 && c[i] == n - k + i) --i;
  if (i < 0) return false;
  ++c[i];
  for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  return true;
}

}  // namespace

ExhaustiveAudit exhaustive_basis_audit(const HadamardFuntf& f, bool keep_rows) {
  if (f.n > 3) throw ResourceLimit("exhaustive audit is capped at n = 3");
  const int k = 1 << f.n;
  const int total = f.rows();
  std::vector<std::vector<int>> all;
  std::vector<int> c(k);
  for (int i = 0; i < k; ++i) c[i] = i;
  do all.push_back(c);
  while (next_combination(c, total));
  std::vector<RieszAudit> res(all.size());
  parallel_for(static_cast<long long>(all.size()), [&](long long i) { res[i] = subset_riesz_audit(f, all[i]); });
  ExhaustiveAudit out;
  out.n = f.n;
  out.bound = std::max(case_one_bound(f.n), pair_bound(f.n));
  out.subsets = static_cast<long long>(all.size());
  for (size_t i = 0; i < all.size(); ++i) {
    if (res[i].spanning) {
      ++out.spanning;
      if (res[i].lower_riesz > out.max_lower_riesz) {
        out.max_lower_riesz = res[i].lower_riesz;
        out.argmax = all[i];
      }
    }
    if (keep_rows) out.rows.push_back({all[i], res[i]});
  }
  return out;
}

Eigen::MatrixXd funtf_copies(const HadamardFuntf& f, int k) {
  if (k < 1) throw InvalidInput("copy count must be positive");
  Eigen::MatrixXd m(f.rows() * k, f.cols());
  for (int i = 0; i < k; ++i) m.middleRows(i * f.rows(), f.rows()) = f.matrix;
  return m;
}

std::string audit_csv(const ExhaustiveAudit& a) {
  std::ostringstream os;
  os << "subset,case,bound\n";
  char buf[40];
  for (const auto& r : a.rows) {
    for (size_t i = 0; i < r.subset.size(); ++i) os << (i ? " " : "") << r.subset[i];
    std::snprintf(buf, sizeof buf, "%.17g", r.audit.lower_riesz);
    os << ',' << r.audit.case_id << ',' << (r.audit.spanning ? buf : "nonspanning") << '\n';
  }
  return os.str();
}

}  // namespace frameforge
