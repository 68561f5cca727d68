#include "frameforge/continuous.hpp"

#include "frameforge/errors.hpp"
#include "frameforge/linalg.hpp"
#include "frameforge/parallel.hpp"
#include "frameforge/rational.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace frameforge {

namespace {

constexpr double kPi = 3.14159265358979323846;

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

long long pow2_at_least(double v) {
  long long n = 1;
  while (static_cast<double>(n) < v) n *= 2;
  return n;
}

// Midpoint sum over a uniform grid with n[a] cells on axis a.
Mat midpoint_sum(const ContinuousFrameModel& model, const Box& box, const std::vector<long long>& n) {
  const int dd = static_cast<int>(box.sides.size());
  long long total = 1;
  for (long long v : n) total *= v;
  std::vector<double> h(dd);
  double cell = box.density;
  for (int a = 0; a < dd; ++a) {
    h[a] = (box.sides[a].second - box.sides[a].first) / static_cast<double>(n[a]);
    cell *= h[a];
  }
  const long long chunks = std::min<long long>(total, 64);
  std::vector<Mat> partial(chunks, Mat::Zero(model.dim, model.dim));
  parallel_for(chunks, [&](long long c) {
    long long lo = total * c / chunks, hi = total * (c + 1) / chunks;
    Mat acc = Mat::Zero(model.dim, model.dim);
    Point t(dd);
    for (long long i = lo; i < hi; ++i) {
      long long rest = i;
      for (int a = dd - 1; a >= 0; --a) {
        long long k = rest % n[a];
        rest /= n[a];
        t[a] = box.sides[a].first + (static_cast<double>(k) + 0.5) * h[a];
      }
      Vec v = model.psi(t);
      acc.selfadjointView<Eigen::Lower>().rankUpdate(v, 1.0);
    }
    partial[c] = acc;
  });
  Mat s = Mat::Zero(model.dim, model.dim);
  for (const auto& p : partial) s += p;
  return Mat(s.selfadjointView<Eigen::Lower>()) * cell;
}

void check_box(const Box& b) {
  if (b.sides.empty() || b.sides.size() > 2) throw InvalidInput("boxes must be 1- or 2-dimensional");
  for (const auto& s : b.sides)
    if (!(s.second > s.first) || !std::isfinite(s.first) || !std::isfinite(s.second))
      throw InvalidInput("box sides must be finite with lo < hi");
  if (!(b.density >= 0.0) || !std::isfinite(b.density)) throw InvalidInput("density must be finite and nonnegative");
}

Vec atom_value(const ContinuousFrameModel& model, const Atom& a) {
  Vec v = model.psi(a.t);
  if (v.size() != model.dim || !v.allFinite()) throw InvalidInput("evaluator returned a bad vector");
  return v;
}

}  // namespace

double Box::volume() const {
  double v = 1.0;
  for (const auto& s : sides) v *= s.second - s.first;
  return v;
}

int ContinuousFrameModel::domain_dim() const {
  if (!boxes.empty()) return static_cast<int>(boxes.front().sides.size());
  if (!atoms.empty()) return static_cast<int>(atoms.front().t.size());
  return 0;
}

double ContinuousFrameModel::total_mass() const {
  double m = 0.0;
  for (const auto& b : boxes) m += b.mass();
  for (const auto& a : atoms) m += a.mass;
  return m;
}

QuadratureResult quadrature_frame_operator(const ContinuousFrameModel& model, const QuadratureConfig& cfg) {
  if (cfg.resolution < 1) throw InvalidInput("resolution must be positive");
  if (model.dim < 1 || !model.psi) throw InvalidInput("model has no representation space");
  QuadratureResult out;
  out.T = Mat::Zero(model.dim, model.dim);
  for (const auto& a : model.atoms) {
    if (!(a.mass >= 0.0) || !std::isfinite(a.mass)) throw InvalidInput("atom masses must be finite and nonnegative");
    Vec v = atom_value(model, a);
    out.T += a.mass * v * v.adjoint();
  }
  for (size_t bi = 0; bi < model.boxes.size(); ++bi) {
    const Box& box = model.boxes[bi];
    check_box(box);
    const int dd = static_cast<int>(box.sides.size());
    long long per_axis = cfg.resolution;
    if (model.feature_scale > 0.0)
      for (int a = 0; a < dd; ++a)
        per_axis = std::max(per_axis, pow2_at_least((box.sides[a].second - box.sides[a].first) / model.feature_scale));
    auto cells = [&](long long p) {
      long long c = 1;
      for (int a = 0; a < dd; ++a) c *= p;
      return c;
    };
    Mat coarse = midpoint_sum(model, box, std::vector<long long>(dd, per_axis));
    Mat prev_rich;
    bool have_rich = false;
    double prev_delta = INFINITY;
    while (true) {
      if (cells(per_axis * 2) > cfg.cell_cap)
        throw QuadratureFailure("quadrature did not converge on box " + std::to_string(bi) + " within the cell cap",
                                prev_delta, max_abs(coarse - prev_rich));
      per_axis *= 2;
      Mat fine = midpoint_sum(model, box, std::vector<long long>(dd, per_axis));
      Mat rich = (4.0 * fine - coarse) / 3.0;
      double delta = have_rich ? max_abs(rich - prev_rich) : max_abs(fine - coarse);
      double scale = std::max(1.0, max_abs(rich));
      prev_delta = delta;
      prev_rich = rich;
      coarse = fine;
      if (have_rich && delta <= cfg.tolerance * scale) break;
      have_rich = true;
    }
    out.T += prev_rich;
    out.cells_per_axis.push_back(static_cast<int>(per_axis));
    out.last_delta = std::max(out.last_delta, prev_delta);
  }
  out.T = hermitian_part(out.T);
  return out;
}

FrameBounds check_continuous_bounds(const ContinuousFrameModel& model, const QuadratureConfig& cfg) {
  FrameBounds b = bounds_of_operator(quadrature_frame_operator(model, cfg).T, cfg.tolerance);
  b.method = BoundsMethod::Quadrature;
  return b;
}

double probe_lipschitz(const ContinuousFrameModel& model, int points_per_axis) {
  double best = 0.0;
  for (const auto& box : model.boxes) {
    const int dd = static_cast<int>(box.sides.size());
    const long long p = std::max(2, points_per_axis);
    long long total = 1;
    for (int a = 0; a < dd; ++a) total *= p;
    std::vector<double> h(dd);
    for (int a = 0; a < dd; ++a) h[a] = (box.sides[a].second - box.sides[a].first) / static_cast<double>(p - 1);
    for (long long i = 0; i < total; ++i) {
      Point t(dd);
      std::vector<long long> k(dd);
      long long rest = i;
      for (int a = dd - 1; a >= 0; --a) {
        k[a] = rest % p;
        rest /= p;
        t[a] = box.sides[a].first + static_cast<double>(k[a]) * h[a];
      }
      Vec v = model.psi(t);
      for (int a = 0; a < dd; ++a) {
        if (k[a] + 1 >= p) continue;
        Point u = t;
        u[a] += h[a];
        best = std::max(best, (model.psi(u) - v).norm() / h[a]);
      }
    }
  }
  return best;
}

NetResult epsilon_net_discretize(const ContinuousFrameModel& model, double epsilon, const NetConfig& cfg) {
  if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
  NetResult out;
  out.epsilon = epsilon;
  if (model.lipschitz) {
    out.lipschitz = *model.lipschitz;
  } else if (!model.boxes.empty()) {
    out.lipschitz = cfg.safety * probe_lipschitz(model, cfg.probe_points);
    out.rigorous = false;
  }
  double box_mass = 0.0;
  for (const auto& b : model.boxes) {
    check_box(b);
    box_mass += b.mass();
  }
  const double uniform = box_mass > 0.0 ? epsilon / (2.0 * box_mass) : epsilon;
  int j = 0;
  long long produced = 0;
  for (size_t bi = 0; bi < model.boxes.size(); ++bi) {
    const Box& box = model.boxes[bi];
    const int dd = static_cast<int>(box.sides.size());
    const long long slabs = pow2_at_least(box.mass());
    const double slab_w = (box.sides[0].second - box.sides[0].first) / static_cast<double>(slabs);
    std::vector<double> len(dd);
    len[0] = slab_w;
    for (int a = 1; a < dd; ++a) len[a] = box.sides[a].second - box.sides[a].first;
    for (long long sl = 0; sl < slabs; ++sl) {
      const int jj = cfg.budget == BudgetRule::Dyadic ? ++j : 0;
      const double budget = cfg.budget == BudgetRule::Dyadic ? epsilon * std::ldexp(1.0, -jj) : uniform;
      std::vector<long long> n(dd, 1);
      auto radius = [&]() {
        double s = 0.0;
        for (int a = 0; a < dd; ++a) s += std::pow(len[a] / static_cast<double>(n[a]), 2);
        return out.lipschitz * 0.5 * std::sqrt(s);
      };
      if (out.lipschitz > 0.0) {
        const double w = 2.0 * budget / (out.lipschitz * std::sqrt(static_cast<double>(dd)));
        for (int a = 0; a < dd; ++a) n[a] = pow2_at_least(len[a] / w);
        while (!(radius() < budget)) {
          for (auto& v : n) v *= 2;
          if (n[0] > (1LL << 40)) break;
        }
      }
      long long count = 1;
      for (long long v : n) count *= v;
      produced += count;
      if (!(radius() < budget) || produced > cfg.cell_cap)
        throw DiscretizationFailure("refinement cap exceeded on box " + std::to_string(bi) + ", slab " +
                                    std::to_string(sl));
      const double r = radius();
      double mass = box.density * slab_w;
      for (int a = 1; a < dd; ++a) mass *= len[a];
      mass /= static_cast<double>(count);
      for (long long i = 0; i < count; ++i) {
        DomainPartitionCell c;
        c.lo.resize(dd);
        c.hi.resize(dd);
        c.t.resize(dd);
        long long rest = i;
        for (int a = dd - 1; a >= 0; --a) {
          long long k = rest % n[a];
          rest /= n[a];
          double base = box.sides[a].first + (a == 0 ? static_cast<double>(sl) * slab_w : 0.0);
          double h = len[a] / static_cast<double>(n[a]);
          c.lo[a] = base + static_cast<double>(k) * h;
          c.hi[a] = c.lo[a] + h;
          c.t[a] = c.lo[a] + 0.5 * h;
        }
        c.mass = mass;
        c.range_radius = r;
        c.budget_index = jj;
        out.cells.push_back(std::move(c));
      }
    }
  }
  for (const auto& a : model.atoms) {
    DomainPartitionCell c;
    c.t = a.t;
    c.mass = a.mass;
    c.atom = true;
    out.cells.push_back(std::move(c));
  }
  for (const auto& c : out.cells) out.l1_defect += c.mass * c.range_radius;
  if (!(out.l1_defect < epsilon))
    throw DiscretizationFailure("L1 defect " + std::to_string(out.l1_defect) + " is not below epsilon");
  return out;
}

Frame discretize_to_weighted_frame(const ContinuousFrameModel& model, const std::vector<DomainPartitionCell>& cells) {
  Frame f;
  f.field = model.field;
  f.vectors.resize(model.dim, static_cast<Eigen::Index>(cells.size()));
  f.weights.resize(cells.size());
  f.explicit_weights = true;
  parallel_for(static_cast<long long>(cells.size()), [&](long long i) {
    f.vectors.col(i) = model.psi(cells[i].t);
    f.weights[i] = cells[i].mass;
  });
  return f;
}

DiscretizeResult discretize_parseval(const ContinuousFrameModel& model, double epsilon, const DiscretizeConfig& cfg) {
  if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
  const double tol = cfg.sample.tolerance;
  if (!model.norm_bound || *model.norm_bound > 1.0 + tol) throw InvalidInput("model needs a norm bound <= 1");
  DiscretizeResult r;
  r.model_bounds = check_continuous_bounds(model, cfg.quadrature);
  if (std::max(std::abs(r.model_bounds.lower - 1.0), std::abs(r.model_bounds.upper - 1.0)) > 1e-6)
    throw InvalidInput("model is not Parseval: quadrature bounds (" + std::to_string(r.model_bounds.lower) + ", " +
                       std::to_string(r.model_bounds.upper) + ")");
  r.epsilon0 = std::min(epsilon, 0.99 / 256.0);
  r.net = epsilon_net_discretize(model, r.epsilon0, cfg.net);
  Frame weighted = discretize_to_weighted_frame(model, r.net.cells);
  r.weighted_bounds = frame_bounds(weighted, tol);
  if (r.weighted_bounds.lower < 1.0 - r.epsilon0 - tol || r.weighted_bounds.upper > 1.0 + r.epsilon0 + tol)
    throw DiscretizationFailure("weighted frame bounds (" + std::to_string(r.weighted_bounds.lower) + ", " +
                                std::to_string(r.weighted_bounds.upper) + ") leave [1 - eps0, 1 + eps0]");

  Frame unit = Frame::from_columns(weighted.vectors, model.field);
  std::vector<double> a;
  for (double m : weighted.weights) a.push_back(std::sqrt(m));
  ScalableFrame s = make_scalable(unit, a, -1.0, 1e-12, cfg.denominator_cap, tol);
  const double dup = static_cast<double>(common_denominator(s.a2)) * model.total_mass();
  if (dup > static_cast<double>(cfg.duplication_cap))
    throw ResourceLimit("sampling would duplicate about " + std::to_string(static_cast<long long>(dup)) + " vectors");
  r.sample = sample_scalable(s, cfg.sample);
  for (size_t k = 0; k < r.sample.indices.size(); ++k) {
    r.points.push_back(r.net.cells[r.sample.indices[k]].t);
    r.multiplicities.push_back(r.sample.multiplicities[k]);
  }
  r.samples = r.sample.as_frame(unit);
  r.sample_bounds = frame_bounds(r.samples, tol);
  return r;
}

ContinuousFrameModel transformed_model(const ContinuousFrameModel& model, const Mat& S,
                                       std::optional<double> lipschitz_scale) {
  if (S.cols() != model.dim) throw InvalidInput("transform does not match the representation space");
  ContinuousFrameModel m = model;
  const double op = S.rows() ? std::sqrt(std::max(0.0, lambda_max(S.adjoint() * S))) : 0.0;
  Evaluator inner = model.psi;
  m.psi = [inner, S](const Point& t) { return Vec(S * inner(t)); };
  m.dim = static_cast<int>(S.rows());
  if (max_abs(S.imag()) > 0.0) m.field = Field::Complex;
  if (model.norm_bound) m.norm_bound = op * *model.norm_bound;
  if (model.lipschitz) m.lipschitz = lipschitz_scale.value_or(op) * *model.lipschitz;
  return m;
}

ContinuousFrameModel parseval_normalized(const ContinuousFrameModel& model, const QuadratureConfig& cfg) {
  QuadratureResult q = quadrature_frame_operator(model, cfg);
  FrameBounds b = bounds_of_operator(q.T, cfg.tolerance);
  if (b.lower <= cfg.tolerance) throw NotAContinuousFrame("quadrature lower bound is not positive");
  ContinuousFrameModel m = transformed_model(model, inverse_sqrt(q.T));
  m.norm_bound = estimate_norm_bound(m);
  return m;
}

double estimate_norm_bound(const ContinuousFrameModel& model, int points_per_axis) {
  double best = 0.0;
  for (const auto& a : model.atoms) best = std::max(best, model.psi(a.t).norm());
  if (model.boxes.empty()) return best;
  if (!model.lipschitz) return model.norm_bound.value_or(INFINITY);
  for (const auto& box : model.boxes) {
    const int dd = static_cast<int>(box.sides.size());
    const long long p = std::max(1, points_per_axis);
    long long total = 1;
    double diag = 0.0;
    for (int a = 0; a < dd; ++a) {
      total *= p;
      diag += std::pow((box.sides[a].second - box.sides[a].first) / static_cast<double>(p), 2);
    }
    const double slack = *model.lipschitz * 0.5 * std::sqrt(diag);
    for (long long i = 0; i < total; ++i) {
      Point t(dd);
      long long rest = i;
      for (int a = dd - 1; a >= 0; --a) {
        long long k = rest % p;
        rest /= p;
        double h = (box.sides[a].second - box.sides[a].first) / static_cast<double>(p);
        t[a] = box.sides[a].first + (static_cast<double>(k) + 0.5) * h;
      }
      best = std::max(best, model.psi(t).norm() + slack);
    }
  }
  if (model.norm_bound) best = std::min(best, *model.norm_bound);
  return best;
}

DiscretizeResult discretize_general(const ContinuousFrameModel& model, double epsilon, const DiscretizeConfig& cfg) {
  const double tol = cfg.sample.tolerance;
  QuadratureResult q = quadrature_frame_operator(model, cfg.quadrature);
  FrameBounds b = bounds_of_operator(q.T, tol);
  if (b.lower <= tol) throw NotAContinuousFrame("quadrature lower bound " + std::to_string(b.lower) + " is not positive");
  if (!model.norm_bound || !std::isfinite(*model.norm_bound)) throw InvalidInput("model needs a finite norm bound");
  Mat S = inverse_sqrt(q.T);
  const double C = std::sqrt(lambda_max(S.adjoint() * S)) * *model.norm_bound;
  const double C2 = std::max(1.0, std::ceil(C * C * 64.0) / 64.0);
  ContinuousFrameModel m0 = transformed_model(model, S / std::sqrt(C2));
  m0.norm_bound = std::min(1.0, C / std::sqrt(C2));
  for (auto& box : m0.boxes) box.density *= C2;
  for (auto& a : m0.atoms) a.mass *= C2;
  DiscretizeResult r = discretize_parseval(m0, epsilon, cfg);
  r.C2 = C2;
  r.model_bounds = b;
  r.model_bounds.method = BoundsMethod::Quadrature;
  Frame f;
  f.field = model.field;
  long long total = std::accumulate(r.multiplicities.begin(), r.multiplicities.end(), 0LL);
  f.vectors.resize(model.dim, total);
  Eigen::Index at = 0;
  for (size_t k = 0; k < r.points.size(); ++k) {
    Vec v = model.psi(r.points[k]);
    for (long long c = 0; c < r.multiplicities[k]; ++c) f.vectors.col(at++) = v;
  }
  r.samples = f;
  r.sample_bounds = frame_bounds(f, tol);
  if (!(r.sample_bounds.lower > tol)) throw DiscretizationFailure("sampled family is not a frame of the original");
  return r;
}

ContinuousFrameModel reverse_direction_measure(const std::vector<Point>& points,
                                               const std::vector<long long>& multiplicities, const Evaluator& psi,
                                               int dim, Field field) {
  if (points.size() != multiplicities.size()) throw InvalidInput("points and multiplicities differ in length");
  ContinuousFrameModel m;
  m.kind = "atomic";
  m.field = field;
  m.dim = dim;
  m.psi = psi;
  Mat t = Mat::Zero(dim, dim);
  double nb = 0.0;
  for (size_t k = 0; k < points.size(); ++k) {
    if (multiplicities[k] < 1) throw InvalidInput("multiplicities must be positive");
    Vec v = psi(points[k]);
    if (v.size() != dim) throw InvalidInput("evaluator dimension mismatch");
    t += static_cast<double>(multiplicities[k]) * v * v.adjoint();
    nb = std::max(nb, v.norm());
    m.atoms.push_back(Atom{points[k], static_cast<double>(multiplicities[k])});
  }
  if (!(bounds_of_operator(t).lower > kDefaultTolerance)) throw InvalidInput("sampled family is not a frame");
  m.norm_bound = nb;
  return m;
}

ContinuousFrameModel gabor_stft(double amplitude, double half_width, int hermite_count) {
  if (amplitude == 0.0 || !std::isfinite(amplitude)) throw InvalidInput("window must be non-zero");
  if (!(half_width > 0.0) || hermite_count < 1) throw InvalidInput("bad Gabor truncation");
  ContinuousFrameModel m;
  m.kind = "gabor";
  m.field = Field::Complex;
  m.dim = hermite_count;
  m.boxes.push_back(Box{{{-half_width, half_width}, {-half_width, half_width}}, 1.0});
  m.norm_bound = std::abs(amplitude);
  m.feature_scale = 0.25;
  m.psi = [amplitude, hermite_count](const Point& t) {
    const double x = t[0], w = t[1];
    const cplx z(x, -w);
    const cplx phase = std::exp(cplx(0.0, -kPi * x * w)) * std::exp(-kPi * (x * x + w * w) / 2.0) * amplitude;
    Vec v(hermite_count);
    cplx term = 1.0;
    for (int k = 0; k < hermite_count; ++k) {
      if (k > 0) term *= std::sqrt(kPi / k) * z;
      v(k) = std::conj(phase * term);
    }
    return v;
  };
  return m;
}

namespace {

struct ExpBasis {
  std::vector<std::pair<double, double>> J;
  std::vector<int> n;
  double P = 1.0;
  Mat V;  // G^{-1/2}
};

cplx interval_integral(const std::vector<std::pair<double, double>>& J, double omega) {
  cplx s = 0.0;
  for (const auto& [lo, hi] : J) {
    if (std::abs(omega) < 1e-300) {
      s += hi - lo;
    } else {
      const double a = 2.0 * kPi * omega;
      s += (std::exp(cplx(0.0, a * hi)) - std::exp(cplx(0.0, a * lo))) / cplx(0.0, a);
    }
  }
  return s;
}

ExpBasis exp_basis(const std::vector<std::pair<double, double>>& J, int modes, double period) {
  if (J.empty() || modes < 1) throw InvalidInput("need a nonempty set and at least one mode");
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& [a, b] : J) {
    if (!(b > a)) throw InvalidInput("intervals must have lo < hi");
    lo = std::min(lo, a);
    hi = std::max(hi, b);
  }
  ExpBasis e;
  e.J = J;
  e.P = period > 0.0 ? period : hi - lo;
  for (int k = 0; k < modes; ++k) e.n.push_back(k - modes / 2);
  Mat G(modes, modes);
  for (int a = 0; a < modes; ++a)
    for (int b = 0; b < modes; ++b) G(a, b) = interval_integral(J, (e.n[a] - e.n[b]) / e.P);
  e.V = inverse_sqrt(hermitian_part(G));
  return e;
}

Evaluator exp_evaluator(const ExpBasis& e) {
  return [e](const Point& t) {
    const int k = static_cast<int>(e.n.size());
    Vec raw(k);
    for (int a = 0; a < k; ++a) raw(a) = interval_integral(e.J, t[0] - e.n[a] / e.P);
    return Vec(e.V.transpose() * raw);
  };
}

}  // namespace

ContinuousFrameModel exponential_on_set(const std::vector<std::pair<double, double>>& J, int modes, double x_lo,
                                        double x_hi, double period) {
  ExpBasis e = exp_basis(J, modes, period);
  ContinuousFrameModel m;
  m.kind = "exponential";
  m.field = Field::Complex;
  m.dim = modes;
  m.psi = exp_evaluator(e);
  m.boxes.push_back(Box{{{x_lo, x_hi}}, 1.0});
  double measure = 0.0, tmax = 0.0;
  for (const auto& [a, b] : J) {
    measure += b - a;
    tmax = std::max({tmax, std::abs(a), std::abs(b)});
  }
  m.norm_bound = std::sqrt(measure);
  m.lipschitz = 2.0 * kPi * tmax * std::sqrt(measure);
  m.feature_scale = 1.0 / (8.0 * std::max(tmax, 1.0));
  return m;
}

ContinuousFrameModel exponential_lattice(const std::vector<std::pair<double, double>>& J, int modes, int lattice_lo,
                                         int lattice_hi, double period) {
  ExpBasis e = exp_basis(J, modes, period);
  ContinuousFrameModel m;
  m.kind = "exponential";
  m.field = Field::Complex;
  m.dim = modes;
  m.psi = exp_evaluator(e);
  for (int x = lattice_lo; x <= lattice_hi; ++x) m.atoms.push_back(Atom{{static_cast<double>(x)}, 1.0});
  double measure = 0.0;
  for (const auto& [a, b] : J) measure += b - a;
  m.norm_bound = std::sqrt(measure);
  return m;
}

ContinuousFrameModel atomic_from_frame(const Frame& f) {
  validate(f);
  ContinuousFrameModel m;
  m.kind = "atomic";
  m.field = f.field;
  m.dim = f.dim();
  Mat cols = f.vectors;
  m.psi = [cols](const Point& t) {
    long long j = std::llround(t.at(0));
    if (j < 0 || j >= cols.cols()) throw InvalidInput("atom index out of range");
    return Vec(cols.col(j));
  };
  double nb = 0.0;
  for (int j = 0; j < f.size(); ++j) {
    m.atoms.push_back(Atom{{static_cast<double>(j)}, f.weight(j)});
    nb = std::max(nb, f.vectors.col(j).norm());
  }
  m.norm_bound = nb;
  return m;
}

ContinuousFrameModel unbounded_counterexample(int d) {
  if (d < 1) throw InvalidInput("truncation must be positive");
  ContinuousFrameModel m;
  m.kind = "unbounded";
  m.field = Field::Real;
  m.dim = d;
  m.psi = [d](const Point& t) {
    long long n = std::llround(t.at(0));
    if (n < 1 || n > d) throw InvalidInput("atom index out of range");
    Vec v = Vec::Zero(d);
    v(n - 1) = std::sqrt(static_cast<double>(n));
    return v;
  };
  for (int n = 1; n <= d; ++n) m.atoms.push_back(Atom{{static_cast<double>(n)}, 1.0 / n});
  m.norm_bound = std::sqrt(static_cast<double>(d));
  return m;
}

namespace {

std::vector<std::pair<double, double>> intervals_from(const json& j) {
  std::vector<std::pair<double, double>> out;
  for (const auto& iv : j) out.emplace_back(iv.at(0).get<double>(), iv.at(1).get<double>());
  return out;
}

}  // namespace

ContinuousFrameModel model_from_json(const json& j) {
  try {
    const std::string kind = j.at("evaluator").get<std::string>();
    const json params = j.value("params", json::object());
    std::vector<Box> boxes;
    std::vector<Atom> atoms;
    bool has_domain = j.contains("domain");
    if (has_domain) {
      for (const auto& d : j.at("domain")) {
        if (d.contains("box")) {
          Box b;
          b.sides = intervals_from(d.at("box"));
          if (d.contains("density") && d.at("density").is_number()) b.density = d.at("density").get<double>();
          check_box(b);
          boxes.push_back(b);
        } else if (d.contains("atoms")) {
          for (const auto& a : d.at("atoms")) {
            Atom at;
            at.t = a.at("t").is_array() ? a.at("t").get<std::vector<double>>() : Point{a.at("t").get<double>()};
            at.mass = a.at("mass").get<double>();
            if (!(at.mass >= 0.0)) throw InvalidInput("atom masses must be nonnegative");
            atoms.push_back(at);
          }
        } else {
          throw InvalidInput("domain entries need \"box\" or \"atoms\"");
        }
      }
    }
    ContinuousFrameModel m;
    if (kind == "gabor") {
      double hw = params.value("half_width", boxes.empty() ? 4.5 : boxes.front().sides.at(0).second);
      m = gabor_stft(params.value("amplitude", 1.0), hw, params.value("hermite_count", 8));
    } else if (kind == "exponential") {
      auto J = intervals_from(params.at("J"));
      int modes = params.value("modes", 7);
      double period = params.value("period", 0.0);
      m = exponential_on_set(J, modes, -1.0, 1.0, period);
      if (!has_domain) throw InvalidInput("exponential models need a domain");
    } else if (kind == "atomic") {
      m = atomic_from_frame(frame_from_json(params.at("frame")));
    } else if (kind == "unbounded") {
      m = unbounded_counterexample(params.at("d").get<int>());
    } else {
      throw InvalidInput("unknown evaluator \"" + kind + "\"");
    }
    if (has_domain) {
      m.boxes = boxes;
      m.atoms = atoms;
    }
    if (params.contains("lipschitz")) m.lipschitz = params.at("lipschitz").get<double>();
    if (params.contains("norm_bound")) m.norm_bound = params.at("norm_bound").get<double>();
    return m;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed model: ") + e.what());
  }
}

ContinuousFrameModel load_model(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed model: ") + e.what());
  }
  return model_from_json(j);
}

json discretize_to_json(const DiscretizeResult& r) {
  json j;
  j["epsilon0"] = r.epsilon0;
  j["net"] = {{"cells", r.net.cells.size()}, {"lipschitz", r.net.lipschitz}, {"rigorous", r.net.rigorous},
              {"l1_defect", r.net.l1_defect}, {"epsilon", r.net.epsilon}};
  j["model_bounds"] = bounds_json(r.model_bounds);
  j["weighted_bounds"] = bounds_json(r.weighted_bounds);
  j["C2"] = r.C2;
  j["points"] = r.points;
  j["multiplicities"] = r.multiplicities;
  j["sample_bounds"] = bounds_json(r.sample_bounds);
  j["sampler"] = sample_to_json(r.sample);
  return j;
}

}  // namespace frameforge
