#include "frameforge/errors.hpp"
#include "frameforge/frame.hpp"
#include "frameforge/frame_io.hpp"
#include "frameforge/linalg.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace frameforge;

namespace {

Frame real_frame(std::initializer_list<std::initializer_list<double>> cols, std::vector<double> w = {}) {
  const int d = static_cast<int>(cols.begin()->size());
  Mat m(d, static_cast<int>(cols.size()));
  int c = 0;
  for (const auto& col : cols) {
    int r = 0;
    for (double v : col) m(r++, c) = v;
    ++c;
  }
  return Frame::from_columns(m, std::move(w), Field::Real);
}

Frame equiangular() {
  const double s = std::sqrt(3.0) / 2.0;
  return real_frame({{1.0, 0.0}, {-0.5, s}, {-0.5, -s}});
}

Frame onb(int d) { return Frame::from_columns(Mat::Identity(d, d), Field::Real); }

}  // namespace

TEST_SUITE("frame-core") {
  TEST_CASE("frame operator of an orthonormal basis is the identity") {
    CHECK((frame_operator(onb(3)) - Mat::Identity(3, 3)).norm() < 1e-15);
  }

  TEST_CASE("three equiangular vectors give 3/2 times the identity") {
    Mat t = frame_operator(equiangular());
    // hand sum: 1 + 2 * 1/4 on the first axis, 2 * 3/4 on the second
    Mat expect = Mat::Zero(2, 2);
    expect(0, 0) = 1.0 + 0.25 + 0.25;
    expect(1, 1) = 0.75 + 0.75;
    CHECK((t - expect).norm() < 1e-14);
    CHECK((t - oracle::frame_operator(equiangular())).norm() < 1e-14);
  }

  TEST_CASE("weights enter linearly") {
    Frame f = real_frame({{1.0, 0.0}}, {4.0});
    Mat t = frame_operator(f);
    CHECK(t(0, 0).real() == doctest::Approx(4.0));
    CHECK(std::abs(t(1, 1)) < 1e-15);
    CHECK(std::abs(t(0, 1)) < 1e-15);
  }

  TEST_CASE("eigen bounds on small examples") {
    FrameBounds b = frame_bounds(onb(3));
    CHECK(b.lower == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(b.upper == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(b.method == BoundsMethod::Eigen);
    b = frame_bounds(equiangular());
    CHECK(b.lower == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(b.upper == doctest::Approx(1.5).epsilon(1e-14));
    b = frame_bounds(real_frame({{1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}));
    CHECK(b.lower == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(b.upper == doctest::Approx(2.0).epsilon(1e-14));
  }

  TEST_CASE("eigen bounds agree with the Jacobi oracle on random complex frames") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 20; ++trial) {
      int d = 2 + trial % 5, m = d + 3 + trial % 7;
      Mat v(d, m);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < m; ++j) v(i, j) = cplx(nd(rng), nd(rng));
      Frame f = Frame::from_columns(v, Field::Complex);
      auto [lo, hi] = oracle::bounds(f);
      FrameBounds b = frame_bounds(f);
      CHECK(b.lower == doctest::Approx(lo).epsilon(1e-10));
      CHECK(b.upper == doctest::Approx(hi).epsilon(1e-10));
    }
  }

  TEST_CASE("validation errors") {
    Frame empty;
    empty.vectors.resize(2, 0);
    CHECK_THROWS_AS(frame_operator(empty), InvalidInput);
    Frame bad = onb(2);
    bad.vectors(0, 0) = NAN;
    CHECK_THROWS_AS(frame_operator(bad), InvalidInput);
    Frame imag = onb(2);
    imag.vectors(0, 1) = cplx(0.0, 1.0);
    CHECK_THROWS_AS(validate(imag), InvalidInput);
    Frame neg = real_frame({{1.0, 0.0}, {0.0, 1.0}}, {1.0, -1.0});
    CHECK_THROWS_AS(validate(neg), InvalidInput);
    Frame short_w = real_frame({{1.0, 0.0}, {0.0, 1.0}}, {1.0});
    CHECK_THROWS_AS(validate(short_w), InvalidInput);
  }

  TEST_CASE("Parseval normalization") {
    Frame p = parseval_normalize(onb(3));
    CHECK((p.vectors - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);

    Frame d = real_frame({{2.0, 0.0}, {0.0, 3.0}});
    CHECK((parseval_normalize(d).vectors - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

    Frame e = parseval_normalize(equiangular());
    Mat expect = equiangular().vectors * std::sqrt(2.0 / 3.0);
    CHECK((e.vectors - expect).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(parseval_normalize(real_frame({{1.0, 0.0}})), NotAFrame);
  }

  TEST_CASE("Parseval normalization keeps weights and is idempotent") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
      Frame f = oracle::random_parseval(3, 7, rng, trial % 2 == 1);
      f.vectors *= 1.7;
      f.weights.assign(7, 0.0);
      for (int j = 0; j < 7; ++j) f.weights[j] = 0.5 + 0.1 * j;
      f.explicit_weights = true;
      Frame p = parseval_normalize(f);
      CHECK(p.weights == f.weights);
      auto [lo, hi] = oracle::bounds(p);
      CHECK(lo == doctest::Approx(1.0).epsilon(1e-8));
      CHECK(hi == doctest::Approx(1.0).epsilon(1e-8));
      Frame pp = parseval_normalize(p);
      CHECK((pp.vectors - p.vectors).cwiseAbs().maxCoeff() < 1e-8);
    }
  }

  TEST_CASE("transformed bounds") {
    FrameBounds b = transformed_bounds(onb(2), Mat::Identity(2, 2));
    CHECK(b.lower == doctest::Approx(1.0));
    CHECK(b.upper == doctest::Approx(1.0));

    Mat d = Mat::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 1.0;
    b = transformed_bounds(onb(2), d);
    CHECK(b.lower == doctest::Approx(1.0));
    CHECK(b.upper == doctest::Approx(4.0));
    auto actual = oracle::bounds(apply_operator(d, onb(2)));
    CHECK(actual.first == doctest::Approx(1.0));
    CHECK(actual.second == doctest::Approx(4.0));

    Frame p = parseval_normalize(equiangular());
    d(0, 0) = 3.0;
    d(1, 1) = 2.0;
    b = transformed_bounds(p, d);
    CHECK(b.lower == doctest::Approx(4.0));
    CHECK(b.upper == doctest::Approx(9.0));
    actual = oracle::bounds(apply_operator(d, p));
    CHECK(b.lower <= actual.first + 1e-10);
    CHECK(actual.second <= b.upper + 1e-10);

    Mat singular = Mat::Zero(2, 2);
    singular(0, 0) = 1.0;
    CHECK_THROWS_AS(transformed_bounds(onb(2), singular), InvalidInput);
  }

  TEST_CASE("Rayleigh probe stays inside the eigen interval") {
    FrameBounds b = rayleigh_probe(onb(3), 50, 3);
    CHECK(b.lower >= 1.0 - 1e-9);
    CHECK(b.upper <= 1.0 + 1e-9);
    b = rayleigh_probe(real_frame({{1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}), 10000, 4);
    CHECK(b.lower >= 1.0 - 1e-9);
    CHECK(b.upper <= 2.0 + 1e-9);
    CHECK(b.method == BoundsMethod::RayleighProbe);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    Mat v(4, 10);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 10; ++j) v(i, j) = nd(rng);
    Frame f = Frame::from_columns(v, Field::Real);
    auto [lo, hi] = oracle::bounds(f);
    b = rayleigh_probe(f, 2000, 8);
    CHECK(b.lower >= lo - 1e-9);
    CHECK(b.upper <= hi + 1e-9);
  }

  TEST_CASE("frame inequality holds on random unit vectors") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 5; ++trial) {
      const bool cx = trial % 2 == 0;
      Mat v(5, 9);
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 9; ++j) v(i, j) = cx ? cplx(nd(rng), nd(rng)) : cplx(nd(rng), 0.0);
      Frame f = Frame::from_columns(v, cx ? Field::Complex : Field::Real);
      FrameBounds b = frame_bounds(f);
      for (int k = 0; k < 1000; ++k) {
        Vec x = oracle::random_unit(5, rng, cx);
        double e = oracle::energy(f, x);
        CHECK(e >= b.lower - 1e-9);
        CHECK(e <= b.upper + 1e-9);
      }
    }
  }

  TEST_CASE("permutation invariance and duplication") {
    std::mt19937_64 rng(2);
    Frame f = oracle::random_parseval(3, 8, rng, true);
    std::vector<int> perm(8);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    CHECK((frame_operator(subframe(f, perm)) - frame_operator(f)).cwiseAbs().maxCoeff() < 1e-12);
    FrameBounds b = frame_bounds(f);
    FrameBounds b2 = frame_bounds(concat(f, f));
    CHECK(b2.lower == doctest::Approx(2.0 * b.lower).epsilon(1e-10));
    CHECK(b2.upper == doctest::Approx(2.0 * b.upper).epsilon(1e-10));
  }

  TEST_CASE("JSON round trip is exact") {
    std::mt19937_64 rng(77);
    Frame f = oracle::random_parseval(3, 6, rng, true);
    f.weights = {0.1, 0.2, 0.3, 1.0 / 3.0, 2.0, 0.0};
    f.explicit_weights = true;
    Frame g = frame_from_json(json::parse(frame_to_json_text(f)));
    CHECK(g.field == Field::Complex);
    CHECK(g.vectors == f.vectors);
    CHECK(g.weights == f.weights);
    Frame r = frame_from_json(json::parse(frame_to_json_text(onb(2))));
    CHECK(r.field == Field::Real);
    CHECK_THROWS_AS(frame_from_json(json::parse(R"({"dim":2,"vectors":[[1]]})")), InvalidInput);
    CHECK_THROWS_AS(frame_from_json(json::parse(R"({"dim":2})")), InvalidInput);
  }
}
