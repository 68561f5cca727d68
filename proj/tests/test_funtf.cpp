#include "frameforge/errors.hpp"
#include "frameforge/funtf.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace frameforge;

namespace {

// Rows j < 2^n of the first block plus the chosen count of second-block rows.
std::vector<int> case_one_subset(int n, std::mt19937_64& rng) {
  const int size = 1 << n, pivot = (1 << (n - 1)) - 1;
  std::uniform_int_distribution<int> pick_count(pivot + 1, size);
  const int from_first = pick_count(rng);
  std::vector<int> a(size), b(size);
  std::iota(a.begin(), a.end(), 0);
  std::iota(b.begin(), b.end(), size);
  std::shuffle(a.begin(), a.end(), rng);
  std::shuffle(b.begin(), b.end(), rng);
  std::vector<int> out(a.begin(), a.begin() + from_first);
  out.insert(out.end(), b.begin(), b.begin() + (size - from_first));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_SUITE("funtf-counterexample") {
  TEST_CASE("Sylvester Hadamard matrices") {
    IntMat h1 = sylvester_hadamard(1);
    CHECK(h1(0, 0) == 1);
    CHECK(h1(0, 1) == 1);
    CHECK(h1(1, 0) == 1);
    CHECK(h1(1, 1) == -1);
    for (int n : {2, 5}) {
      IntMat h = sylvester_hadamard(n);
      const long long s = 1LL << n;
      IntMat g = h * h.transpose();
      CHECK(g == IntMat::Identity(s, s) * s);
      CHECK(h.cwiseAbs().maxCoeff() == 1);
      CHECK(h.cwiseAbs().minCoeff() == 1);
    }
    CHECK_THROWS_AS(sylvester_hadamard(0), InvalidInput);
  }

  TEST_CASE("construction at n = 2") {
    HadamardFuntf f = build_funtf(2);
    CHECK(f.rows() == 8);
    CHECK(f.cols() == 4);
    for (int r = 0; r < 8; ++r) CHECK(f.matrix.row(r).squaredNorm() == doctest::Approx(1.0).epsilon(1e-14));
    Eigen::MatrixXd g = f.matrix.transpose() * f.matrix;
    CHECK((g - 2.0 * Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
    auto [lo, hi] = oracle::bounds(f.to_frame());
    CHECK(lo == doctest::Approx(2.0));
    CHECK(hi == doctest::Approx(2.0));
    CHECK_THROWS_AS(build_funtf(1), InvalidInput);
  }

  TEST_CASE("invariants hold exactly up to n = 6") {
    for (int n = 2; n <= 6; ++n) {
      HadamardFuntf f = build_funtf(n);
      CHECK(funtf_invariants(f).all());
      // independent rational check: entries are +-1 times the column scale
      const int s = 1 << n;
      for (int c = 0; c < s; ++c) CHECK(Rational(s) * (f.alpha2[c] + f.beta2[c]) == Rational(2));
      Rational row1(0), row2(0);
      for (int c = 0; c < s; ++c) {
        row1 += f.alpha2[c];
        row2 += f.beta2[c];
      }
      CHECK(row1 == Rational(1));
      CHECK(row2 == Rational(1));
      for (int c = 0; c < (1 << (n - 1)) - 1; ++c) {
        CHECK(f.alpha2[c] == Rational(1, 1 << (n - 1)));
        CHECK(f.beta2[c] == Rational(0));
      }
    }
  }

  TEST_CASE("aligned pair inner product") {
    Rational ip = aligned_pair_inner_product(build_funtf(3));
    CHECK(abs(ip) == Rational(3, 5));
    for (int n = 2; n <= 6; ++n) {
      const long long h = 1LL << (n - 1);
      CHECK(abs(aligned_pair_inner_product(build_funtf(n))) == Rational(h - 1, h + 1));
    }
    CHECK(case_one_bound(3) == doctest::Approx(0.4));
    CHECK(pair_bound(3) == doctest::Approx(0.4));
  }

  TEST_CASE("case classification at n = 3") {
    HadamardFuntf f = build_funtf(3);
    std::vector<int> first(8), second(8);
    std::iota(first.begin(), first.end(), 0);
    std::iota(second.begin(), second.end(), 8);
    RieszAudit a = subset_riesz_audit(f, first);
    CHECK(a.case_id == 1);
    CHECK(a.bound_holds);
    CHECK(a.lower_riesz <= 0.4 + 1e-10);

    RieszAudit b = subset_riesz_audit(f, second);
    CHECK(b.case_id == 2);
    CHECK_FALSE(b.spanning);

    std::vector<int> two{0, 1, 8, 9, 10, 11, 12, 13};
    RieszAudit c = subset_riesz_audit(f, two);
    CHECK(c.case_id == 2);
    CHECK_FALSE(c.spanning);
    CHECK(c.bound_holds);

    std::vector<int> three{0, 1, 2, 8, 9, 10, 11, 12};
    RieszAudit d = subset_riesz_audit(f, three);
    CHECK(d.case_id == 3);
    CHECK(d.bound_holds);

    CHECK_THROWS_AS(subset_riesz_audit(f, {0, 1, 2}), InvalidInput);
  }

  TEST_CASE("exhaustive audits") {
    ExhaustiveAudit a2 = exhaustive_basis_audit(build_funtf(2));
    CHECK(a2.subsets == 70);
    CHECK(a2.max_lower_riesz <= 2.0 / 3.0 + 1e-10);
    ExhaustiveAudit a3 = exhaustive_basis_audit(build_funtf(3), true);
    CHECK(a3.subsets == 12870);
    CHECK(a3.max_lower_riesz <= 0.4 + 1e-10);
    CHECK(a3.max_lower_riesz > 0.0);
    CHECK(a3.max_lower_riesz <= a2.max_lower_riesz);
    for (const auto& row : a3.rows) CHECK(row.audit.bound_holds);
    // argmax reproduces from its own singular values
    Eigen::MatrixXd s(8, 8);
    HadamardFuntf f = build_funtf(3);
    for (int k = 0; k < 8; ++k) s.row(k) = f.matrix.row(a3.argmax[k]);
    auto ev = oracle::eigenvalues(Mat((s * s.transpose()).cast<cplx>()));
    CHECK(ev.front() == doctest::Approx(a3.max_lower_riesz).epsilon(1e-9));
    std::string csv = audit_csv(a3);
    CHECK(csv.rfind("subset,case,bound\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 12871);
    CHECK_THROWS_AS(exhaustive_basis_audit(build_funtf(4)), ResourceLimit);
  }

  TEST_CASE("random case-one subsets respect the bound") {
    std::mt19937_64 rng(99);
    for (int n = 2; n <= 6; ++n) {
      HadamardFuntf f = build_funtf(n);
      for (int trial = 0; trial < 200; ++trial) {
        RieszAudit a = subset_riesz_audit(f, case_one_subset(n, rng));
        CHECK(a.case_id == 1);
        CHECK(a.lower_riesz <= case_one_bound(n) + 1e-10);
      }
    }
  }

  TEST_CASE("copying the FUNTF leaves the per-basis audit unchanged") {
    std::mt19937_64 rng(3);
    HadamardFuntf f = build_funtf(3);
    Eigen::MatrixXd two = funtf_copies(f, 2);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<int> idx = case_one_subset(3, rng), shifted = idx;
      for (int& r : shifted) r += f.rows();
      RieszAudit a = subset_riesz_audit(f, idx), b = subset_riesz_audit(two, 3, shifted);
      CHECK(a.case_id == b.case_id);
      CHECK(a.lower_riesz == b.lower_riesz);
    }
  }
}
