#include "frameforge/continuous.hpp"
#include "frameforge/errors.hpp"
#include "frameforge/frame.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace frameforge;

namespace {

const double kTau = 2.0 * std::acos(-1.0);

ContinuousFrameModel constant_model() {
  ContinuousFrameModel m;
  m.kind = "constant";
  m.field = Field::Real;
  m.dim = 1;
  m.boxes.push_back(Box{{{0.0, 1.0}}, 1.0});
  m.psi = [](const Point&) { return Vec(Vec::Ones(1)); };
  m.norm_bound = 1.0;
  m.lipschitz = 0.0;
  return m;
}

// sqrt(2) (cos 2 pi t, sin 2 pi t) on [0, 1]: Parseval with Lipschitz constant 2 pi sqrt(2).
ContinuousFrameModel circle_model() {
  ContinuousFrameModel m;
  m.kind = "circle";
  m.field = Field::Real;
  m.dim = 2;
  m.boxes.push_back(Box{{{0.0, 1.0}}, 1.0});
  m.psi = [](const Point& t) {
    Vec v(2);
    v << std::sqrt(2.0) * std::cos(kTau * t[0]), std::sqrt(2.0) * std::sin(kTau * t[0]);
    return v;
  };
  m.norm_bound = std::sqrt(2.0);
  m.lipschitz = kTau * std::sqrt(2.0);
  return m;
}

Mat op_of(const Frame& f) { return oracle::frame_operator(f); }

}  // namespace

TEST_SUITE("continuous-frames") {
  TEST_CASE("constant model integrates to one") {
    QuadratureResult q = quadrature_frame_operator(constant_model());
    CHECK(q.T(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("atomic model equals the discrete frame operator") {
    std::mt19937_64 rng(2);
    Frame f = oracle::random_parseval(3, 7, rng, true);
    f.weights = {0.5, 1.0, 2.0, 0.25, 1.5, 1.0, 3.0};
    f.explicit_weights = true;
    ContinuousFrameModel m = atomic_from_frame(f);
    CHECK((quadrature_frame_operator(m).T - op_of(f)).cwiseAbs().maxCoeff() < 1e-14);
    FrameBounds b = check_continuous_bounds(atomic_from_frame(Frame::from_columns(Mat::Identity(3, 3), Field::Real)));
    CHECK(b.lower == doctest::Approx(1.0));
    CHECK(b.upper == doctest::Approx(1.0));
  }

  TEST_CASE("circle model quadrature") {
    Mat t = quadrature_frame_operator(circle_model()).T;
    CHECK((t - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
  }

  TEST_CASE("Fourier series on the integer lattice is an orthonormal basis") {
    FrameBounds b = check_continuous_bounds(exponential_lattice({{-0.5, 0.5}}, 7, -60, 60));
    CHECK(b.lower == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.upper == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("exponentials approach Parseval as the window grows") {
    double prev = 0.0;
    for (double L : {8.0, 64.0, 512.0}) {
      FrameBounds b = check_continuous_bounds(exponential_on_set({{0.0, 0.5}}, 7, -L, L));
      CHECK(b.upper <= 1.0 + 1e-6);
      CHECK(b.lower > prev);
      prev = b.lower;
    }
    CHECK(prev > 0.99);
  }

  TEST_CASE("Gabor tightness matches the window energy") {
    const double amp = 2.0;
    // window energy by trapezoid on [-8, 8]
    double g2 = 0.0;
    const int n = 20000;
    const double h = 16.0 / n;
    for (int i = 0; i <= n; ++i) {
      double x = -8.0 + i * h;
      double g = amp * std::pow(2.0, 0.25) * std::exp(-kTau / 2.0 * x * x);
      g2 += (i == 0 || i == n ? 0.5 : 1.0) * g * g * h;
    }
    FrameBounds b = check_continuous_bounds(gabor_stft(amp, 4.5, 6));
    CHECK(std::abs(b.lower - g2) <= 0.01 * g2);
    CHECK(std::abs(b.upper - g2) <= 0.01 * g2);
    CHECK_THROWS_AS(gabor_stft(0.0, 4.5, 6), InvalidInput);
  }

  TEST_CASE("unbounded model is Parseval with growing norms") {
    for (int d : {1, 5, 40}) {
      ContinuousFrameModel m = unbounded_counterexample(d);
      Mat t = quadrature_frame_operator(m).T;
      CHECK((t - Mat::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(*m.norm_bound == doctest::Approx(std::sqrt(d)));
    }
  }

  TEST_CASE("net of a constant model is one cell") {
    NetResult r = epsilon_net_discretize(constant_model(), 0.1);
    REQUIRE(r.cells.size() == 1);
    CHECK(r.cells[0].range_radius == 0.0);
    CHECK(r.l1_defect == 0.0);
    CHECK_THROWS_AS(epsilon_net_discretize(constant_model(), 0.0), InvalidInput);
  }

  TEST_CASE("net of an atomic model is one cell per atom") {
    ContinuousFrameModel m = unbounded_counterexample(6);
    NetResult r = epsilon_net_discretize(m, 0.01);
    CHECK(r.cells.size() == 6);
    for (const auto& c : r.cells) {
      CHECK(c.atom);
      CHECK(c.range_radius == 0.0);
    }
  }

  TEST_CASE("net cell widths follow the Lipschitz budget") {
    ContinuousFrameModel m = circle_model();
    const double L = *m.lipschitz;
    for (BudgetRule rule : {BudgetRule::Uniform, BudgetRule::Dyadic}) {
      const double eps = 0.05;
      NetConfig cfg;
      cfg.budget = rule;
      NetResult r = epsilon_net_discretize(m, eps, cfg);
      double defect = 0.0, mass = 0.0;
      for (const auto& c : r.cells) {
        double w = c.hi[0] - c.lo[0];
        double budget = rule == BudgetRule::Dyadic ? eps * std::ldexp(1.0, -c.budget_index) : eps / 2.0;
        CHECK(w <= 2.0 * budget / L + 1e-15);
        // direct modulus check at the cell ends
        CHECK((m.psi({c.lo[0]}) - m.psi(c.t)).norm() <= c.range_radius + 1e-12);
        CHECK((m.psi({c.hi[0]}) - m.psi(c.t)).norm() <= c.range_radius + 1e-12);
        defect += c.mass * L * w / 2.0;
        mass += c.mass;
      }
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(defect < eps);
      CHECK(r.l1_defect == doctest::Approx(defect).epsilon(1e-10));
    }
  }

  TEST_CASE("net refinement cap") {
    NetConfig cfg;
    cfg.cell_cap = 16;
    CHECK_THROWS_AS(epsilon_net_discretize(circle_model(), 0.01, cfg), DiscretizationFailure);
  }

  TEST_CASE("probed modulus of continuity") {
    ContinuousFrameModel m = circle_model();
    m.lipschitz.reset();
    double est = probe_lipschitz(m);
    CHECK(est == doctest::Approx(kTau * std::sqrt(2.0)).epsilon(1e-3));
    NetResult r = epsilon_net_discretize(m, 0.05);
    CHECK_FALSE(r.rigorous);
  }

  TEST_CASE("weighted frame of a net stays near the operator") {
    ContinuousFrameModel m = circle_model();
    NetResult r = epsilon_net_discretize(m, 0.02);
    Frame f = discretize_to_weighted_frame(m, r.cells);
    auto [lo, hi] = oracle::bounds(f);
    CHECK(lo >= 1.0 - 0.02);
    CHECK(hi <= 1.0 + 0.02);
  }

  TEST_CASE("discretizing a constant model gives one point") {
    DiscretizeResult r = discretize_parseval(constant_model(), 0.01);
    REQUIRE(r.points.size() == 1);
    CHECK(r.multiplicities[0] == 1);
    CHECK(r.sample_bounds.lower == doctest::Approx(1.0));
    CHECK(r.sample_bounds.upper == doctest::Approx(1.0));
  }

  TEST_CASE("discretizing a discrete Parseval frame") {
    std::mt19937_64 rng(12);
    Frame f = oracle::random_parseval(3, 6, rng);
    DiscretizeResult r = discretize_parseval(atomic_from_frame(f), 0.01);
    CHECK(r.sample.all_checks_hold());
    Frame picked;
    picked.field = Field::Real;
    long long total = std::accumulate(r.multiplicities.begin(), r.multiplicities.end(), 0LL);
    picked.vectors.resize(3, total);
    int at = 0;
    for (size_t k = 0; k < r.points.size(); ++k)
      for (long long c = 0; c < r.multiplicities[k]; ++c) picked.vectors.col(at++) = f.vectors.col(std::llround(r.points[k][0]));
    auto [lo, hi] = oracle::bounds(picked);
    CHECK(lo > 0.0);
    CHECK(lo == doctest::Approx(r.sample_bounds.lower).epsilon(1e-9));
    CHECK(hi == doctest::Approx(r.sample_bounds.upper).epsilon(1e-9));
    CHECK(lo >= r.sample.forms.lower - 1e-6);
    CHECK(hi <= r.sample.forms.upper + 1e-6);
  }

  TEST_CASE("discretizing the circle") {
    DiscretizeResult r = discretize_general(circle_model(), 0.01);
    CHECK(r.C2 >= 2.0);
    CHECK(r.C2 <= 2.0 + 1.0 / 64.0 + 1e-12);
    CHECK(r.sample.all_checks_hold());
    CHECK(r.net.rigorous);
    CHECK(r.net.l1_defect < r.epsilon0);
    auto [lo, hi] = oracle::bounds(r.samples);
    CHECK(lo > 0.0);
    CHECK(lo == doctest::Approx(r.sample_bounds.lower).epsilon(1e-9));
    CHECK(hi == doctest::Approx(r.sample_bounds.upper).epsilon(1e-9));
  }

  TEST_CASE("discretize_parseval preconditions") {
    ContinuousFrameModel loose = circle_model();
    CHECK_THROWS_AS(discretize_parseval(loose, 0.01), InvalidInput);
    ContinuousFrameModel twice = constant_model();
    twice.boxes[0].density = 2.0;
    CHECK_THROWS_AS(discretize_parseval(twice, 0.01), InvalidInput);
  }

  TEST_CASE("general discretization of a diagonal atomic model") {
    Frame f = Frame::from_columns(Mat::Identity(2, 2), {4.0, 1.0}, Field::Real);
    ContinuousFrameModel m = atomic_from_frame(f);
    DiscretizeResult r = discretize_general(m, 0.01);
    auto [lo, hi] = oracle::bounds(r.samples);
    CHECK(lo > 0.0);
    CHECK(lo == doctest::Approx(r.sample_bounds.lower).epsilon(1e-9));
    CHECK(r.model_bounds.lower == doctest::Approx(1.0));
    CHECK(r.model_bounds.upper == doctest::Approx(4.0));
    for (const auto& p : r.points) CHECK((p[0] == 0.0 || p[0] == 1.0));
  }

  TEST_CASE("general discretization agrees with the Parseval path on a Parseval model") {
    DiscretizeResult g = discretize_general(constant_model(), 0.01);
    DiscretizeResult p = discretize_parseval(constant_model(), 0.01);
    CHECK(g.C2 == 1.0);
    CHECK(g.points == p.points);
    CHECK(g.multiplicities == p.multiplicities);
  }

  TEST_CASE("general discretization rejects a degenerate model") {
    Mat v = Mat::Zero(2, 1);
    v(0, 0) = 1.0;
    CHECK_THROWS_AS(discretize_general(atomic_from_frame(Frame::from_columns(v, Field::Real)), 0.01),
                    NotAContinuousFrame);
  }

  TEST_CASE("reverse direction measure") {
    Evaluator one = [](const Point&) { return Vec(Vec::Ones(1)); };
    ContinuousFrameModel m = reverse_direction_measure({{0.5}}, {3}, one, 1, Field::Real);
    REQUIRE(m.atoms.size() == 1);
    CHECK(m.atoms[0].mass == 3.0);

    ContinuousFrameModel onb = atomic_from_frame(Frame::from_columns(Mat::Identity(3, 3), Field::Real));
    ContinuousFrameModel back = reverse_direction_measure({{0.0}, {1.0}, {2.0}}, {1, 1, 1}, onb.psi, 3, Field::Real);
    for (const auto& a : back.atoms) CHECK(a.mass == 1.0);
    CHECK((quadrature_frame_operator(back).T - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);

    std::mt19937_64 rng(9);
    Frame f = oracle::random_parseval(3, 8, rng, true);
    ContinuousFrameModel atoms = atomic_from_frame(f);
    std::vector<Point> pts;
    std::vector<long long> mult;
    Frame sampled;
    sampled.field = Field::Complex;
    sampled.vectors.resize(3, 0);
    for (int j = 0; j < 8; ++j) {
      long long k = 1 + static_cast<long long>(rng() % 3);
      pts.push_back({static_cast<double>(j)});
      mult.push_back(k);
      for (long long c = 0; c < k; ++c) {
        sampled.vectors.conservativeResize(3, sampled.vectors.cols() + 1);
        sampled.vectors.col(sampled.vectors.cols() - 1) = f.vectors.col(j);
      }
    }
    ContinuousFrameModel r = reverse_direction_measure(pts, mult, atoms.psi, 3);
    CHECK((quadrature_frame_operator(r).T - op_of(sampled)).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(reverse_direction_measure({{0.0}}, {1}, onb.psi, 3, Field::Real), InvalidInput);
  }

  TEST_CASE("model JSON") {
    ContinuousFrameModel g = model_from_json(json::parse(
        R"({"evaluator":"gabor","domain":[{"box":[[-4.5,4.5],[-4.5,4.5]]}],"params":{"amplitude":1,"hermite_count":4}})"));
    CHECK(g.dim == 4);
    CHECK(g.domain_dim() == 2);
    ContinuousFrameModel u = model_from_json(json::parse(R"({"evaluator":"unbounded","params":{"d":5}})"));
    CHECK(u.atoms.size() == 5);
    ContinuousFrameModel a = model_from_json(json::parse(
        R"({"evaluator":"atomic","params":{"frame":{"dim":2,"field":"real","vectors":[[1,0],[0,1]]}}})"));
    CHECK(check_continuous_bounds(a).lower == doctest::Approx(1.0));
    ContinuousFrameModel e = model_from_json(json::parse(
        R"({"evaluator":"exponential","domain":[{"box":[[-8,8]]}],"params":{"J":[[0,0.5]],"modes":7}})"));
    CHECK(e.boxes[0].sides[0].second == 8.0);
    CHECK_THROWS_AS(model_from_json(json::parse(R"({"evaluator":"nope"})")), InvalidInput);
    CHECK_THROWS_AS(model_from_json(json::parse(R"({"params":{}})")), InvalidInput);
  }
}
