#include "frameforge/frame.hpp"

#include "frameforge/errors.hpp"

#include <cmath>
#include <random>

namespace frameforge {

Frame Frame::from_columns(const Mat& cols, Field field) {
  Frame f;
  f.field = field;
  f.vectors = cols;
  return f;
}

Frame Frame::from_columns(const Mat& cols, std::vector<double> weights, Field field) {
  Frame f = from_columns(cols, field);
  f.weights = std::move(weights);
  f.explicit_weights = true;
  return f;
}

std::string to_string(BoundsMethod m) {
  switch (m) {
    case BoundsMethod::Eigen: return "eigen";
    case BoundsMethod::RayleighProbe: return "rayleigh-probe";
    case BoundsMethod::Quadrature: return "quadrature";
  }
  return "eigen";
}

void validate(const Frame& f) {
  if (f.dim() <= 0) throw InvalidInput("frame dimension must be positive");
  if (f.size() == 0) throw InvalidInput("frame is empty");
  if (!f.weights.empty() && static_cast<int>(f.weights.size()) != f.size())
    throw InvalidInput("weights length does not match vector count");
  for (double w : f.weights)
    if (!std::isfinite(w) || w < 0.0) throw InvalidInput("weights must be finite and nonnegative");
  if (!f.vectors.allFinite()) throw InvalidInput("non-finite coordinate in frame");
  if (f.field == Field::Real && f.vectors.imag().cwiseAbs().maxCoeff() != 0.0)
    throw InvalidInput("real frame has imaginary coordinates");
}

Mat frame_operator(const Frame& f) {
  validate(f);
  if (f.weights.empty()) return f.vectors * f.vectors.adjoint();
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(f.weights.data(), f.size());
  Mat t = f.vectors * w.cast<cplx>().asDiagonal() * f.vectors.adjoint();
  return hermitian_part(t);
}

FrameBounds bounds_of_operator(const Mat& t, double tolerance) {
  Eigen::VectorXd ev = hermitian_eigenvalues(t);
  FrameBounds b;
  b.lower = std::max(0.0, ev.minCoeff());
  b.upper = std::max(0.0, ev.maxCoeff());
  b.tolerance = tolerance;
  return b;
}

FrameBounds frame_bounds(const Frame& f, double tolerance) {
  return bounds_of_operator(frame_operator(f), tolerance);
}

Frame apply_operator(const Mat& op, const Frame& f) {
  Frame out = f;
  out.vectors = op * f.vectors;
  if (f.field == Field::Real) out.vectors = out.vectors.real().cast<cplx>();
  return out;
}

Frame parseval_normalize(const Frame& f, double tolerance) {
  Mat t = frame_operator(f);
  FrameBounds b = bounds_of_operator(t, tolerance);
  if (b.lower <= tolerance * std::max(1.0, b.upper))
    throw NotAFrame("lower frame bound " + std::to_string(b.lower) + " is not positive");
  return apply_operator(inverse_sqrt(t), f);
}

FrameBounds transformed_bounds(const Frame& f, const Mat& op, double tolerance) {
  if (op.rows() != f.dim() || op.cols() != f.dim())
    throw InvalidInput("operator shape does not match frame dimension");
  Eigen::JacobiSVD<Mat> svd(op);
  const auto& s = svd.singularValues();
  double smax = s[0];
  double smin = s[s.size() - 1];
  if (smin <= tolerance * std::max(1.0, smax)) throw InvalidInput("operator is not invertible");
  FrameBounds pb = frame_bounds(f, tolerance);
  if (std::abs(pb.lower - 1.0) > tolerance || std::abs(pb.upper - 1.0) > tolerance)
    throw InvalidInput("frame is not Parseval within tolerance");
  FrameBounds b;
  b.lower = smin * smin;
  b.upper = smax * smax;
  b.tolerance = tolerance;
  return b;
}

FrameBounds rayleigh_probe(const Frame& f, int trials, std::uint64_t seed) {
  validate(f);
  if (trials < 1) throw InvalidInput("trials must be at least 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  FrameBounds b;
  b.lower = INFINITY;
  b.upper = 0.0;
  b.method = BoundsMethod::RayleighProbe;
  const int d = f.dim();
  for (int t = 0; t < trials; ++t) {
    Vec x(d);
    for (int i = 0; i < d; ++i)
      x[i] = f.field == Field::Real ? cplx(nd(rng), 0.0) : cplx(nd(rng), nd(rng));
    double n = x.norm();
    if (n == 0.0) continue;
    x /= n;
    double e = frame_energy(f, x);
    b.lower = std::min(b.lower, e);
    b.upper = std::max(b.upper, e);
  }
  if (!std::isfinite(b.lower)) b.lower = 0.0;
  return b;
}

Frame subframe(const Frame& f, const std::vector<int>& idx) {
  Frame out;
  out.field = f.field;
  out.explicit_weights = f.explicit_weights;
  out.vectors.resize(f.dim(), static_cast<Eigen::Index>(idx.size()));
  if (!f.weights.empty()) out.weights.resize(idx.size());
  for (size_t k = 0; k < idx.size(); ++k) {
    int j = idx[k];
    if (j < 0 || j >= f.size()) throw InvalidInput("subframe index out of range");
    out.vectors.col(static_cast<Eigen::Index>(k)) = f.vectors.col(j);
    if (!f.weights.empty()) out.weights[k] = f.weights[j];
  }
  return out;
}

Frame scaled(const Frame& f, double amplitude) {
  Frame out = f;
  out.vectors *= amplitude;
  return out;
}

Frame concat(const Frame& a, const Frame& b) {
  if (a.dim() != b.dim()) throw InvalidInput("concat: dimension mismatch");
  Frame out;
  out.field = (a.field == Field::Real && b.field == Field::Real) ? Field::Real : Field::Complex;
  out.vectors.resize(a.dim(), a.size() + b.size());
  out.vectors << a.vectors, b.vectors;
  if (!a.weights.empty() || !b.weights.empty()) {
    out.explicit_weights = true;
    for (int j = 0; j < a.size(); ++j) out.weights.push_back(a.weight(j));
    for (int j = 0; j < b.size(); ++j) out.weights.push_back(b.weight(j));
  }
  return out;
}

double frame_energy(const Frame& f, const Vec& x) {
  Eigen::VectorXd c = (f.vectors.adjoint() * x).cwiseAbs2();
  double s = 0.0;
  for (int j = 0; j < f.size(); ++j) s += f.weight(j) * c[j];
  return s;
}

double weighted_trace(const Frame& f, const std::vector<int>& idx) {
  double s = 0.0;
  for (int j : idx) s += f.weight(j) * f.vectors.col(j).squaredNorm();
  return s;
}

double max_weighted_sq_norm(const Frame& f) {
  double m = 0.0;
  for (int j = 0; j < f.size(); ++j) m = std::max(m, f.weight(j) * f.vectors.col(j).squaredNorm());
  return m;
}

FrameBounds compressed_bounds(const Mat& t, const Mat& q) {
  FrameBounds b;
  if (q.cols() == 0) return b;
  Eigen::VectorXd ev = hermitian_eigenvalues(q.adjoint() * t * q);
  b.lower = ev.minCoeff();
  b.upper = ev.maxCoeff();
  return b;
}

bool is_tight(const Frame& f, double tolerance, double* bound) {
  FrameBounds b = frame_bounds(f, tolerance);
  if (bound) *bound = 0.5 * (b.lower + b.upper);
  return b.upper - b.lower <= tolerance * std::max(1.0, b.upper);
}

}  // namespace frameforge
