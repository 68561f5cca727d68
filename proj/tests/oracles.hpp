#pragma once

// Independent reference computations for the test suites. Nothing here calls
// the library's eigensolver.

#include "frameforge/frame.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle {

using frameforge::cplx;
using frameforge::Frame;
using frameforge::Mat;
using frameforge::Vec;

// Cyclic Jacobi on the 2n x 2n real embedding [Re -Im; Im Re]; every
// eigenvalue of the Hermitian matrix appears twice there.
inline std::vector<double> eigenvalues(const Mat& h) {
  const int n = static_cast<int>(h.rows());
  const int m = 2 * n;
  std::vector<double> a(static_cast<size_t>(m) * m);
  auto at = [&](int i, int j) -> double& { return a[static_cast<size_t>(i) * m + j]; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx z = 0.5 * (h(i, j) + std::conj(h(j, i)));
      at(i, j) = z.real();
      at(i + n, j + n) = z.real();
      at(i, j + n) = -z.imag();
      at(i + n, j) = z.imag();
    }
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) off += at(i, j) * at(i, j);
    if (off < 1e-30) break;
    for (int p = 0; p < m; ++p)
      for (int q = p + 1; q < m; ++q) {
        if (std::abs(at(p, q)) < 1e-300) continue;
        double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < m; ++k) {
          double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < m; ++k) {
          double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(m);
  for (int i = 0; i < m; ++i) ev[i] = at(i, i);
  std::sort(ev.begin(), ev.end());
  std::vector<double> out;
  for (int i = 0; i < m; i += 2) out.push_back(0.5 * (ev[i] + ev[i + 1]));
  return out;
}

// Entry-by-entry sum of w_j x_j x_j^*.
inline Mat frame_operator(const Frame& f) {
  const int d = f.dim();
  Mat t = Mat::Zero(d, d);
  for (int j = 0; j < f.size(); ++j) {
    double w = f.weights.empty() ? 1.0 : f.weights[j];
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) t(r, c) += w * f.vectors(r, j) * std::conj(f.vectors(c, j));
  }
  return t;
}

inline std::pair<double, double> bounds(const Frame& f) {
  auto ev = oracle::eigenvalues(oracle::frame_operator(f));
  return {ev.front(), ev.back()};
}

inline double lmax_subset(const Frame& f, const std::vector<int>& idx) {
  if (idx.empty()) return 0.0;
  Frame g;
  g.field = f.field;
  g.vectors.resize(f.dim(), static_cast<Eigen::Index>(idx.size()));
  for (size_t k = 0; k < idx.size(); ++k) {
    g.vectors.col(static_cast<Eigen::Index>(k)) = f.vectors.col(idx[k]);
    if (!f.weights.empty()) g.weights.push_back(f.weights[idx[k]]);
  }
  return oracle::bounds(g).second;
}

// Minimum over all 2-splits of the larger part's top eigenvalue.
inline double min_split(const Frame& f) {
  const int m = f.size();
  double best = INFINITY;
  for (long long mask = 0; mask < (1LL << m); ++mask) {
    std::vector<int> l, r;
    for (int j = 0; j < m; ++j) ((mask >> j) & 1 ? r : l).push_back(j);
    best = std::min(best, std::max(lmax_subset(f, l), lmax_subset(f, r)));
  }
  return best;
}

// Parseval frame from the rows of a random orthonormal column block.
inline Frame random_parseval(int dim, int m, std::mt19937_64& rng, bool complex_field = false) {
  std::normal_distribution<double> nd;
  Mat g(m, dim);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < dim; ++k) g(i, k) = complex_field ? cplx(nd(rng), nd(rng)) : cplx(nd(rng), 0.0);
  // Gram-Schmidt on the columns
  for (int k = 0; k < dim; ++k) {
    for (int p = 0; p < k; ++p) {
      cplx ip = g.col(p).dot(g.col(k));
      g.col(k) -= ip * g.col(p);
    }
    g.col(k) /= g.col(k).norm();
  }
  Frame f;
  f.field = complex_field ? frameforge::Field::Complex : frameforge::Field::Real;
  f.vectors = g.adjoint();
  return f;
}

inline Vec random_unit(int d, std::mt19937_64& rng, bool complex_field = false) {
  std::normal_distribution<double> nd;
  Vec x(d);
  for (int i = 0; i < d; ++i) x(i) = complex_field ? cplx(nd(rng), nd(rng)) : cplx(nd(rng), 0.0);
  return x / x.norm();
}

inline double energy(const Frame& f, const Vec& x) {
  double s = 0.0;
  for (int j = 0; j < f.size(); ++j) {
    double w = f.weights.empty() ? 1.0 : f.weights[j];
    cplx ip = 0.0;
    for (int r = 0; r < f.dim(); ++r) ip += x(r) * std::conj(f.vectors(r, j));
    s += w * std::norm(ip);
  }
  return s;
}

// Unit vectors along a random orthonormal basis, each direction split into
// one copy (d = 1), two copies (d = 3/5, 4/5) or four copies (d = 1/2), so
// sum d_i^2 x_i x_i^* = I with rational d_i.
inline Frame pythagorean_scalable(int dim, std::mt19937_64& rng, std::vector<double>& d) {
  Frame q = random_parseval(dim, dim, rng);
  std::vector<Vec> cols;
  d.clear();
  for (int k = 0; k < dim; ++k) {
    Vec x = q.vectors.col(k) / q.vectors.col(k).norm();
    switch (rng() % 3) {
      case 0:
        cols.push_back(x);
        d.push_back(1.0);
        break;
      case 1:
        cols.insert(cols.end(), {x, x});
        d.insert(d.end(), {0.6, 0.8});
        break;
      default:
        cols.insert(cols.end(), {x, x, x, x});
        d.insert(d.end(), {0.5, 0.5, 0.5, 0.5});
    }
  }
  Frame f;
  f.field = frameforge::Field::Real;
  f.vectors.resize(dim, static_cast<Eigen::Index>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j) f.vectors.col(static_cast<Eigen::Index>(j)) = cols[j];
  return f;
}

}  // namespace oracle
