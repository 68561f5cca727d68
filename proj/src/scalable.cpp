#include "frameforge/scalable.hpp"

#include "frameforge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace frameforge {

namespace {

constexpr long long kHuge = 1LL << 60;

double holds_tol(double tol, double bound) { return tol * std::max(1.0, std::abs(bound)); }

InequalityCheck upper_check(std::string name, int block, int m, int n, double value, double bound, double tol) {
  InequalityCheck c{std::move(name), block, m, n, value, bound, bound - value, false};
  c.holds = c.slack >= -holds_tol(tol, bound);
  return c;
}

InequalityCheck lower_check(std::string name, int block, int m, int n, double value, double bound, double tol) {
  InequalityCheck c{std::move(name), block, m, n, value, bound, value - bound, false};
  c.holds = c.slack >= -holds_tol(tol, bound);
  return c;
}

Mat hcat(const std::vector<Mat>& blocks, int rows) {
  int cols = 0;
  for (const auto& b : blocks) cols += static_cast<int>(b.cols());
  Mat out(rows, cols);
  int at = 0;
  for (const auto& b : blocks) {
    out.middleCols(at, b.cols()) = b;
    at += static_cast<int>(b.cols());
  }
  return out;
}

// Weighted operator of x_j, j in (lo, hi] (1-based), optionally restricted.
Mat range_operator(const ScalableFrame& s, int lo, int hi) {
  const int d = s.base.dim();
  Mat t = Mat::Zero(d, d);
  for (int j = std::max(lo, 0) + 1; j <= hi; ++j) {
    double w = to_double(s.a2[j - 1]);
    if (w == 0.0) continue;
    t.selfadjointView<Eigen::Lower>().rankUpdate(s.base.vectors.col(j - 1), w);
  }
  return Mat(t.selfadjointView<Eigen::Lower>());
}

double compressed_max(const Mat& t, const Mat& q) {
  if (q.cols() == 0) return 0.0;
  return lambda_max(q.adjoint() * t * q);
}

Mat orthonormal_within(const Mat& cols, const Mat& against) {
  Mat p = cols;
  if (against.cols() > 0) p -= against * (against.adjoint() * cols);
  Mat h = orthonormal_span(p, 1e-9);
  if (against.cols() > 0 && h.cols() > 0) {
    h -= against * (against.adjoint() * h);
    h = orthonormal_span(h, 1e-9);
  }
  return h;
}

}  // namespace

ScalableFrame make_scalable(const Frame& base, const std::vector<double>& a, double epsilon, double round_tol,
                            long long denominator_cap, double tolerance) {
  validate(base);
  if (static_cast<int>(a.size()) != base.size()) throw InvalidInput("scalar count does not match vector count");
  ScalableFrame s;
  s.base = base;
  for (int j = 0; j < base.size(); ++j) {
    if (!std::isfinite(a[j]) || a[j] < 0.0) throw InvalidInput("scalars must be finite and nonnegative");
    if (base.vectors.col(j).norm() > 1.0 + tolerance) throw InvalidInput("vectors must lie in the unit ball");
    double sq = a[j] * a[j];
    Rational r = best_rational(sq, round_tol, denominator_cap);
    if (std::abs(to_double(r) - sq) > round_tol)
      throw ResourceLimit("a_" + std::to_string(j) + "^2 has no rational within tolerance under denominator cap " +
                          std::to_string(denominator_cap));
    s.a2.push_back(r);
  }
  FrameBounds b = frame_bounds(scaled_frame(s), tolerance);
  double meas = std::max({1.0 - b.lower, b.upper - 1.0, 0.0});
  if (epsilon < 0.0) {
    // rounded up past eigensolver noise so the bound certifies
    s.epsilon = meas > 0.0 ? meas + 1e-12 : 0.0;
  } else {
    if (meas > epsilon + tolerance)
      throw InvalidInput("scaled frame bounds (" + std::to_string(b.lower) + ", " + std::to_string(b.upper) +
                         ") are outside (1 - eps, 1 + eps)");
    s.epsilon = epsilon;
  }
  return s;
}

Frame scaled_frame(const ScalableFrame& s) {
  std::vector<double> w;
  for (int j = 0; j < s.base.size(); ++j) w.push_back(s.base.weight(j) * to_double(s.a2[j]));
  return Frame::from_columns(s.base.vectors, w, s.base.field);
}

double epsilon_prime(double eps) { return 6.0 * eps + 4.0 * std::sqrt(eps) * std::sqrt(1.0 + 2.0 * eps); }

double epsilon_one(double eps) { return 3.0 * eps + 2.0 * std::sqrt(2.0 * eps) * std::sqrt(1.0 + eps); }

double epsilon_two(double ep, double B) {
  double ratio = (1.0 + ep) / (1.0 - ep);
  return ratio - 1.0 + ep + 2.0 * std::sqrt(B * ratio * ep);
}

FinalForms final_forms(double eps, double A, double B) {
  FinalForms f;
  f.eps_prime = epsilon_prime(eps);
  f.eps2 = epsilon_two(f.eps_prime, B);
  const double e2 = f.eps2;
  f.lower_first = A - A * f.eps_prime - e2 * e2 - e2 - 4.0 * B * (1.0 + e2) * e2;
  f.lower_second = A - (A + 2.0) * e2 - 4.0 * B * (1.0 + e2) * std::sqrt(e2);
  f.lower = std::min(f.lower_first, f.lower_second);
  f.upper = 2.0 * B * (1.0 + e2);
  return f;
}

int BlockDecomposition::K(int n) const {
  if (n <= -1) return -1;
  if (n == 0) return 0;
  if (n <= L()) return cuts[n - 1];
  return vector_count;
}

double BlockDecomposition::eps_n(int n) const {
  if (n < 1) return leakages.empty() ? 0.0 : leakages.front();
  if (n <= L()) return leakages[n - 1];
  return leakages.back() * std::ldexp(1.0, -(n - L()));
}

Mat BlockDecomposition::range(int lo, int hi) const {
  std::vector<Mat> parts;
  for (int j = std::max(lo, 1); j <= std::min(hi, L()); ++j) parts.push_back(subspaces[j - 1]);
  return hcat(parts, dim);
}

Mat BlockDecomposition::upto(int n) const { return range(1, n); }

int BlockDecomposition::dim_upto(int n) const { return static_cast<int>(upto(n).cols()); }

BlockDecomposition build_block_decomposition(const ScalableFrame& s, int truncation, double B, double /*tolerance*/) {
  validate(s.base);
  if (truncation < 2) throw InvalidInput("truncation must be at least 2");
  const int m = s.base.size();
  const int d = s.base.dim();
  BlockDecomposition bd;
  bd.vector_count = m;
  bd.dim = d;
  bd.epsilon = s.epsilon;
  bd.epsilon_prime = epsilon_prime(s.epsilon);
  bd.B = B;
  const double ep = bd.epsilon_prime;
  const double vier_den = B * (1.0 + ep) / ((1.0 - ep) * (1.0 - ep));
  if (!(ep < 1.0)) throw DecompositionFailure("epsilon' >= 1; (Vier) cannot be met");

  bd.subspaces.push_back(Mat(d, 0));
  bd.cuts.push_back(std::min(1, m));
  bd.leakages.push_back(s.epsilon / 2.0);
  bd.tail_leakage.push_back(0.0);

  for (int k = 1;; ++k) {
    const int lo = bd.K(k - 1), hi = bd.K(k);
    if (lo >= m) break;
    Mat q = bd.upto(k);
    Mat cols(d, hi - std::max(lo, 0));
    for (int i = std::max(lo, 0) + 1, c = 0; i <= hi; ++i, ++c) cols.col(c) = s.base.vectors.col(i - 1);
    Mat h = orthonormal_within(cols, q);
    bd.subspaces.push_back(h);
    Mat qn = bd.upto(k + 1);
    const double dimn = std::max<double>(1.0, static_cast<double>(qn.cols()));
    double next = std::min(bd.leakages.back() / 2.0, 0.5 * ep * std::pow(8.0, -(k + 1)) / (vier_den * dimn));
    if (!std::isfinite(next) || next < 0.0)
      throw DecompositionFailure("cannot choose eps_" + std::to_string(k + 1) + " satisfying (Vier)");
    int cut = m;
    double leak = 0.0;
    if (hi < m && k + 1 < truncation) {
      Mat y = qn.adjoint() * s.base.vectors;
      for (int j = 0; j < m; ++j) y.col(j) *= std::sqrt(to_double(s.a2[j]));
      auto leak_at = [&](int K) {
        if (qn.cols() == 0 || K >= m) return 0.0;
        Mat tail = y.rightCols(m - K);
        return lambda_max(tail * tail.adjoint());
      };
      int a = hi + 1, b = m;
      while (a < b) {
        int mid = a + (b - a) / 2;
        if (leak_at(mid) <= next + 1e-14) b = mid;
        else a = mid + 1;
      }
      cut = a;
      leak = leak_at(cut);
    }
    bd.cuts.push_back(cut);
    bd.leakages.push_back(next);
    bd.tail_leakage.push_back(leak);
  }
  return bd;
}

std::vector<InequalityCheck> verify_claim_one(const ScalableFrame& s, const BlockDecomposition& bd, double tolerance) {
  std::vector<InequalityCheck> out;
  const double eps = s.epsilon;
  const double ep = bd.epsilon_prime;
  const double vier_den = bd.B * (1.0 + ep) / ((1.0 - ep) * (1.0 - ep));
  // prefix[n] is the operator of x_j, j <= K_n
  std::vector<Mat> prefix{Mat::Zero(bd.dim, bd.dim)};
  for (int n = 1; n <= bd.L(); ++n) prefix.push_back(prefix.back() + range_operator(s, bd.K(n - 1), bd.K(n)));
  auto between = [&](int a, int b) { return Mat(prefix[b] - prefix[std::max(a, 0)]); };
  for (int n = 1; n <= bd.L(); ++n) {
    Mat q = bd.upto(n);
    double resid = 0.0;
    for (int j = 1; j <= bd.K(n - 1); ++j) {
      Vec x = s.base.vectors.col(j - 1);
      Vec r = q.cols() ? Vec(x - q * (q.adjoint() * x)) : x;
      resid = std::max(resid, r.norm());
    }
    out.push_back(upper_check("Een", 0, n, n, resid, 1e-8, 0.0));

    double v = bd.eps_n(n) * vier_den * q.cols();
    double vb = ep * std::pow(8.0, -n);
    InequalityCheck vier{"Vier", 0, n, n, v, vb, vb - v, v < vb || (v == 0.0 && vb == 0.0)};
    out.push_back(vier);

    for (int m = 1; m <= n; ++m) {
      Mat w = bd.range(m, n);
      if (w.cols() == 0) {
        out.push_back(lower_check("Twee-lower", 0, m, n, 1.0 - 2.0 * eps, 1.0 - 2.0 * eps, tolerance));
        out.push_back(upper_check("Twee-upper", 0, m, n, 1.0 + eps, 1.0 + eps, tolerance));
        out.push_back(upper_check("Drie", 0, m, n, 0.0, bd.eps_n(n), tolerance));
        continue;
      }
      Mat inside = between(m - 2, n);
      FrameBounds in = compressed_bounds(inside, w);
      out.push_back(lower_check("Twee-lower", 0, m, n, in.lower, 1.0 - 2.0 * eps, tolerance));
      out.push_back(upper_check("Twee-upper", 0, m, n, in.upper, 1.0 + eps, tolerance));
      double drie = compressed_max(Mat(prefix.back() - inside), w);
      out.push_back(upper_check("Drie", 0, m, n, drie, bd.eps_n(n), tolerance));
    }
  }
  return out;
}

long long choose_duplication(const std::vector<Rational>& a2, double eps) {
  const double ep = epsilon_prime(eps);
  if (!(ep < 1.0)) throw SamplingFailure("epsilon' >= 1; no duplication factor satisfies (Sewehalf)", 0, "Sewehalf");
  long long l = common_denominator(a2);
  long long t = static_cast<long long>(std::ceil(1.0 / (static_cast<double>(l) * (1.0 - ep))));
  t = std::max(1LL, t);
  while (static_cast<double>(l) * static_cast<double>(t) * (1.0 - ep) < 1.0) ++t;
  return checked_mul(l, t);
}

DuplicationMap build_duplication(const ScalableFrame& s, int first, int last, long long D) {
  DuplicationMap dm;
  dm.D = D;
  for (int j = std::max(first, 0) + 1; j <= last; ++j) {
    Rational c = rmul(Rational(D), s.a2[j - 1]);
    if (c.denominator() != 1) throw InvalidInput("D * a_j^2 is not an integer");
    for (long long k = 0; k < c.numerator(); ++k) dm.b.push_back(j - 1);
  }
  return dm;
}

PatchResult orthogonal_patch(const Frame& f, const Mat& h0, const Mat& h1, double eps, long long duplication,
                             double tolerance) {
  validate(f);
  if (eps < 0.0) throw InvalidInput("epsilon must be nonnegative");
  if (duplication < 1) throw InvalidInput("duplication factor must be positive");
  const int d = f.dim();
  Mat w(d, h0.cols() + h1.cols());
  w << h0, h1;
  Mat t = frame_operator(f);
  Mat tw = w.adjoint() * t * w;
  PatchResult pr;
  pr.eps1 = epsilon_one(eps);
  if (lambda_max(tw) > (1.0 + eps) * (1.0 + tolerance) + tolerance)
    throw InvalidInput("frame is not (1 + eps)-Bessel on H_0 + H_1");
  if (h1.cols() > 0 && lambda_min(h1.adjoint() * t * h1) < (1.0 - eps) - tolerance)
    throw InvalidInput("H_1 projections do not have lower bound 1 - eps");
  Mat deficit = (1.0 + eps) * Mat::Identity(w.cols(), w.cols()) - tw;
  EigenPairs e = hermitian_eigen(deficit);
  if (e.values.size() && e.values.minCoeff() < -tolerance * (1.0 + eps))
    throw InvalidInput("(1 + eps) Id - T is not positive semidefinite");
  std::vector<Vec> g;
  for (int k = 0; k < e.values.size(); ++k) {
    double lam = e.values[k];
    if (lam <= 1e-12 * (1.0 + eps)) continue;
    Vec v = w * e.vectors.col(k);
    Vec p0 = h0.cols() ? Vec(h0 * (h0.adjoint() * v)) : Vec::Zero(d);
    if (p0.norm() <= 1e-14) continue;
    long long copies = static_cast<long long>(std::ceil(lam * static_cast<double>(duplication) - 1e-12));
    copies = std::max(1LL, copies);
    double amp = std::sqrt(lam / static_cast<double>(copies));
    for (long long c = 0; c < copies; ++c) g.push_back(amp * p0);
  }
  pr.patch.field = Field::Complex;
  pr.patch.vectors.resize(d, static_cast<Eigen::Index>(g.size()));
  for (size_t k = 0; k < g.size(); ++k) pr.patch.vectors.col(static_cast<Eigen::Index>(k)) = g[k];
  Mat tu = tw;
  if (!g.empty()) tu += w.adjoint() * (pr.patch.vectors * pr.patch.vectors.adjoint()) * w;
  pr.union_bounds = bounds_of_operator(tu, tolerance);
  pr.within = pr.union_bounds.lower >= 1.0 - pr.eps1 - tolerance && pr.union_bounds.upper <= 1.0 + pr.eps1 + tolerance;
  return pr;
}

int find_low_energy_window(const std::vector<Mat>& subspaces, const Vec& x, double eps, bool pair) {
  const int n = static_cast<int>(subspaces.size());
  if (!(eps > 0.0)) throw InvalidInput("epsilon must be positive");
  const double need = (pair ? 2.0 : 1.0) / (eps * eps);
  if (n < need * (1.0 - 1e-12) || (pair && n % 2 != 0))
    throw InvalidInput("not enough subspaces for the window lemma");
  const double nx = x.norm();
  auto energy = [&](int i) {
    const Mat& q = subspaces[i];
    return q.cols() ? (q.adjoint() * x).norm() : 0.0;
  };
  for (int i = 0; i < (pair ? n - 1 : n); ++i) {
    double e = pair ? std::hypot(energy(i), energy(i + 1)) : energy(i);
    if (e <= eps * nx * (1.0 + 1e-12) + 1e-15) return i + 1;
  }
  throw NumericalFailure("no low-energy window found; subspaces are not orthogonal", nx);
}

double Envelope::upper(double p1, double p0) const {
  return K * p1 * p1 + c * p0 * p0 + 2.0 * std::sqrt(K) * std::sqrt(c) * p1 * p0;
}

double Envelope::lower(double p1, double p0) const {
  return k * p1 * p1 - 2.0 * std::sqrt(K) * std::sqrt(c) * p1 * p0;
}

Envelope cross_term_envelope(double K, double k, double c) {
  if (K < 0.0 || k < 0.0 || c < 0.0) throw InvalidInput("envelope constants must be nonnegative");
  return Envelope{K, k, c};
}

Envelope envelope_from_frame(const Frame& f, const Mat& h0, const Mat& h1) {
  Mat t = frame_operator(f);
  Envelope e;
  if (h1.cols()) {
    FrameBounds b = compressed_bounds(t, h1);
    e.K = std::max(0.0, b.upper);
    e.k = std::max(0.0, b.lower);
  }
  if (h0.cols()) e.c = std::max(0.0, compressed_bounds(t, h0).upper);
  return e;
}

Sequences choose_sequences(double eps, int blocks) {
  Sequences s;
  auto smallest_odd_above = [](double v) -> long long {
    if (!(v < 4e18)) return kHuge;
    long long x = static_cast<long long>(std::floor(v)) + 1;
    if (x % 2 == 0) ++x;
    return std::min(x, kHuge);
  };
  s.M.push_back(1);
  for (int n = 1; n <= blocks; ++n) {
    double delta = eps * std::ldexp(1.0, -n);
    s.delta.push_back(delta);
    long long base = n == 1 ? s.M[0] : s.N[n - 2] + 1;
    long long mn1 = base >= kHuge ? kHuge : smallest_odd_above(static_cast<double>(base) + 2.0);
    s.M.push_back(mn1);
    double need = delta > 0.0 ? 2.0 / (delta * delta) : INFINITY;
    long long nn = mn1 >= kHuge ? kHuge : smallest_odd_above(static_cast<double>(mn1) + 4.0 + need);
    s.N.push_back(nn);
    s.q.push_back(n == 1 ? 0 : std::min(kHuge, s.N[n - 2] + 2));
    s.p_interval.emplace_back(mn1, nn >= kHuge ? kHuge : nn - 2);
  }
  return s;
}

Frame SampledFrame::as_frame(const Frame& base) const {
  long long total = std::accumulate(multiplicities.begin(), multiplicities.end(), 0LL);
  Frame f;
  f.field = base.field;
  f.vectors.resize(base.dim(), total);
  Eigen::Index at = 0;
  for (size_t k = 0; k < indices.size(); ++k)
    for (long long c = 0; c < multiplicities[k]; ++c) f.vectors.col(at++) = base.vectors.col(indices[k]);
  return f;
}

bool SampledFrame::all_checks_hold() const {
  return std::all_of(checks.begin(), checks.end(), [](const InequalityCheck& c) { return c.holds; });
}

namespace {

std::vector<InequalityCheck> claim_two(const BlockDecomposition& bd, const Frame& fvec, const DuplicationMap& dm,
                                       const IndexSet& part, int r, long long Mr, long long Nr, double ep,
                                       const SampleConfig& cfg) {
  std::vector<InequalityCheck> out;
  const int L = bd.L();
  const double small = ep * std::ldexp(1.0, -r);
  const double bcap = cfg.B * (1.0 + ep) / (1.0 - ep);
  const int d = bd.dim;
  IndexSet in;
  for (int n : part)
    if (n < static_cast<int>(dm.b.size())) in.push_back(n);
  auto op_of = [&](const IndexSet& idx) {
    Mat t = Mat::Zero(d, d);
    for (int n : idx) t.selfadjointView<Eigen::Lower>().rankUpdate(fvec.vectors.col(n));
    return Mat(t.selfadjointView<Eigen::Lower>());
  };
  Mat t_all = op_of(in);
  auto clamp = [&](long long v) { return static_cast<int>(std::min<long long>(v, L + 1)); };
  for (long long k = std::max<long long>(Mr - 2, 1); k <= std::min<long long>(Nr, L); ++k) {
    IndexSet tail;
    for (int n : in)
      if (dm.b[n] + 1 > bd.K(static_cast<int>(k))) tail.push_back(n);
    double v = compressed_max(op_of(tail), bd.upto(static_cast<int>(k)));
    out.push_back(upper_check("SewePlus", r, static_cast<int>(k), static_cast<int>(k), v, small, cfg.tolerance));
  }
  double agt = Mr - 2 >= 1 ? compressed_max(t_all, bd.upto(clamp(Mr - 2))) : 0.0;
  out.push_back(upper_check("Agt", r, 0, 0, agt, small, cfg.tolerance));
  Mat v1 = bd.range(clamp(Mr), clamp(Nr));
  FrameBounds nege = v1.cols() ? compressed_bounds(t_all, v1) : FrameBounds{cfg.A, cfg.A, cfg.tolerance, BoundsMethod::Eigen};
  out.push_back(lower_check("Nege-lower", r, 0, 0, nege.lower, cfg.A, cfg.tolerance));
  out.push_back(upper_check("Nege-upper", r, 0, 0, nege.upper, bcap, cfg.tolerance));
  out.push_back(upper_check("Tien", r, 0, 0, compressed_max(t_all, bd.range(clamp(Mr - 1), clamp(Nr))), bcap,
                            cfg.tolerance));
  out.push_back(upper_check("TienPlus", r, 0, 0, compressed_max(t_all, bd.upto(clamp(Nr + 1))), bcap, cfg.tolerance));
  return out;
}

}  // namespace

SampledFrame sample_scalable(const ScalableFrame& s, const SampleConfig& cfg) {
  validate(s.base);
  if (!(s.epsilon < 1.0 / 256.0)) throw InvalidInput("sampling requires epsilon < 1/256");
  SampledFrame out;
  out.epsilon = s.epsilon;
  out.decomposition = build_block_decomposition(s, cfg.truncation, cfg.B, cfg.tolerance);
  const BlockDecomposition& bd = out.decomposition;
  out.checks = verify_claim_one(s, bd, cfg.tolerance);
  for (const auto& c : out.checks)
    if (!c.holds)
      throw DecompositionFailure("(" + c.name + ") fails for m=" + std::to_string(c.m) + ", n=" + std::to_string(c.n));
  out.sequences = choose_sequences(s.epsilon, 3);
  const double ep = epsilon_prime(s.epsilon);
  const int L = bd.L();
  const int d = bd.dim;
  std::vector<long long> mult(s.base.size(), 0);

  for (int r = 1; r <= static_cast<int>(out.sequences.N.size()); ++r) {
    const long long Mr = out.sequences.M[r - 1], Nr = out.sequences.N[r - 1];
    if (Mr - 2 >= L) break;
    const int first = bd.K(static_cast<int>(Mr - 2));
    const int last = bd.K(static_cast<int>(std::min<long long>(Nr, L + 1)));
    if (std::max(first, 0) >= last) continue;
    auto clamp = [&](long long v) { return static_cast<int>(std::min<long long>(v, L + 1)); };

    BlockReport rep;
    rep.r = r;
    rep.first = std::max(first, 0);
    rep.last = last;
    std::vector<Rational> block_a2(s.a2.begin() + rep.first, s.a2.begin() + last);
    rep.D = choose_duplication(block_a2, s.epsilon);
    DuplicationMap dm = build_duplication(s, first, last, rep.D);
    rep.duplicated = static_cast<int>(dm.b.size());
    const int ni = rep.duplicated;

    Frame fvec;
    fvec.field = Field::Complex;
    fvec.vectors.resize(d, ni);
    for (int n = 0; n < ni; ++n) fvec.vectors.col(n) = s.base.vectors.col(dm.b[n]);

    Mat wq = bd.upto(clamp(Nr + 1));
    Mat v1 = bd.range(clamp(Mr), clamp(Nr));
    Mat h0 = orthonormal_within(wq, v1);
    Frame fw = fvec;
    fw.weights.assign(ni, 1.0 / static_cast<double>(rep.D));
    fw.explicit_weights = true;
    PatchResult patch;
    try {
      patch = orthogonal_patch(fw, h0, v1, 2.0 * s.epsilon, rep.D, cfg.tolerance);
    } catch (const InvalidInput& e) {
      throw SamplingFailure(std::string("orthogonal patch: ") + e.what(), r, "Patch");
    }
    rep.patch_vectors = patch.patch.size();
    rep.patch_eps1 = patch.eps1;
    out.checks.push_back(lower_check("Patch-lower", r, 0, 0, patch.union_bounds.lower, 1.0 - patch.eps1, cfg.tolerance));
    out.checks.push_back(upper_check("Patch-upper", r, 0, 0, patch.union_bounds.upper, 1.0 + patch.eps1, cfg.tolerance));
    if (!patch.within) throw SamplingFailure("orthogonal patch misses its bounds", r, "Patch");

    Frame g = concat(fvec, scaled(patch.patch, std::sqrt(static_cast<double>(rep.D))));
    Frame gw = g;
    if (wq.cols() < d) {
      gw.vectors = wq.adjoint() * g.vectors;
      gw.field = Field::Complex;
    }
    PartitionResult pr;
    try {
      pr = partition_general_frame(gw, cfg.partition);
    } catch (const PartitionFailure& e) {
      throw SamplingFailure(std::string("partition: ") + e.what(), r, "Partition");
    } catch (const InvalidInput& e) {
      throw SamplingFailure(std::string("partition: ") + e.what(), r, "Partition");
    }
    rep.parts = static_cast<int>(pr.parts.size());

    std::vector<Frame> levels;
    for (long long k = std::max<long long>(Mr - 2, 1); k <= std::min<long long>(Nr, L); ++k) {
      Mat qk = bd.upto(static_cast<int>(k));
      if (qk.cols() == 0) continue;
      Frame fk;
      fk.field = Field::Complex;
      fk.vectors = Mat::Zero(qk.cols(), g.size());
      bool any = false;
      for (int n = 0; n < ni; ++n)
        if (dm.b[n] + 1 > bd.K(static_cast<int>(k))) {
          fk.vectors.col(n) = qk.adjoint() * fvec.vectors.col(n);
          any = true;
        }
      if (any) levels.push_back(fk);
    }
    int first_choice = 0;
    if (!levels.empty()) first_choice = multi_level_select(levels, pr.parts).part;

    std::vector<int> order{first_choice};
    for (int m = 0; m < rep.parts; ++m)
      if (m != first_choice) order.push_back(m);
    bool found = false;
    std::string worst;
    for (int m : order) {
      auto c2 = claim_two(bd, fvec, dm, pr.parts[m], r, Mr, Nr, ep, cfg);
      auto bad = std::find_if(c2.begin(), c2.end(), [](const InequalityCheck& c) { return !c.holds; });
      if (bad != c2.end()) {
        if (worst.empty()) worst = bad->name;
        continue;
      }
      rep.selected_part = m;
      rep.selection = m == first_choice ? "multi-level" : "scan";
      out.checks.insert(out.checks.end(), c2.begin(), c2.end());
      for (int n : pr.parts[m])
        if (n < ni) ++mult[dm.b[n]];
      found = true;
      break;
    }
    if (!found) throw SamplingFailure("no part satisfies the block inequalities", r, worst);
    out.blocks.push_back(rep);
  }

  Mat t = Mat::Zero(d, d);
  for (int j = 0; j < s.base.size(); ++j) {
    if (mult[j] == 0) continue;
    out.indices.push_back(j);
    out.multiplicities.push_back(mult[j]);
    t.selfadjointView<Eigen::Lower>().rankUpdate(s.base.vectors.col(j), static_cast<double>(mult[j]));
  }
  out.bounds = bounds_of_operator(Mat(t.selfadjointView<Eigen::Lower>()), cfg.tolerance);
  out.forms = final_forms(s.epsilon, cfg.A, cfg.B);
  out.lower_certified = out.bounds.lower >= out.forms.lower - cfg.tolerance;
  out.upper_certified = out.bounds.upper <= out.forms.upper * (1.0 + cfg.tolerance);
  out.checks.push_back(lower_check("Final-lower", 0, 0, 0, out.bounds.lower, out.forms.lower, cfg.tolerance));
  out.checks.push_back(upper_check("Final-upper", 0, 0, 0, out.bounds.upper, out.forms.upper, cfg.tolerance));
  return out;
}

QuantizeResult quantize_scaling(const Frame& base, const std::vector<double>& d, const QuantizeConfig& cfg) {
  validate(base);
  if (static_cast<int>(d.size()) != base.size()) throw InvalidInput("scaling count does not match vector count");
  if (cfg.N < 1) throw InvalidInput("N must be positive");
  QuantizeResult q;
  q.N = cfg.N;
  std::vector<Rational> dr;
  for (double v : d) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidInput("scalings must be finite and nonnegative");
    dr.push_back(best_rational(v, cfg.rounding_tolerance, cfg.denominator_cap));
  }
  q.M = common_denominator(dr);
  long long total = 0;
  for (const auto& r : dr) {
    long long t = checked_mul(checked_mul(cfg.N, q.M / r.denominator()), r.numerator());
    long long n = checked_mul(t, t);
    q.copies.push_back(n);
    total += n;
    if (total > cfg.copy_cap)
      throw ResourceLimit("quantization needs more than " + std::to_string(cfg.copy_cap) + " copies");
  }
  const int dim = base.dim();
  Frame y;
  y.field = base.field;
  y.vectors.resize(dim, total);
  std::vector<int> owner;
  for (int i = 0; i < base.size(); ++i) {
    Vec x = std::sqrt(base.weight(i)) * base.vectors.col(i) / static_cast<double>(cfg.N);
    for (long long k = 0; k < q.copies[i]; ++k) {
      y.vectors.col(static_cast<Eigen::Index>(owner.size())) = x;
      owner.push_back(i);
    }
  }
  FrameBounds yb = frame_bounds(y, cfg.partition.tolerance);
  IndexSet chosen;
  if (yb.upper <= 1.0 + cfg.partition.tolerance) {
    chosen.resize(owner.size());
    std::iota(chosen.begin(), chosen.end(), 0);
  } else {
    chosen = subset_tight_frame(y, cfg.N, cfg.partition).indices;
  }
  q.m.assign(base.size(), 0);
  for (int j : chosen) ++q.m[owner[j]];
  Frame cx;
  cx.field = base.field;
  cx.vectors.resize(dim, base.size());
  for (int i = 0; i < base.size(); ++i) {
    q.c.push_back(std::sqrt(static_cast<double>(q.m[i])) / cfg.N);
    cx.vectors.col(i) = q.c[i] * std::sqrt(base.weight(i)) * base.vectors.col(i);
  }
  q.bounds = frame_bounds(cx, cfg.partition.tolerance);
  q.subset_bounds = frame_bounds(subframe(y, chosen), cfg.partition.tolerance);
  return q;
}

json sample_to_json(const SampledFrame& s) {
  json j;
  j["indices"] = s.indices;
  j["multiplicities"] = s.multiplicities;
  j["bounds"] = bounds_json(s.bounds);
  j["epsilon"] = s.epsilon;
  j["final_forms"] = {{"eps_prime", s.forms.eps_prime}, {"eps2", s.forms.eps2},
                      {"lower_first", s.forms.lower_first}, {"lower_second", s.forms.lower_second},
                      {"lower", s.forms.lower}, {"upper", s.forms.upper}};
  j["lower_certified"] = s.lower_certified;
  j["upper_certified"] = s.upper_certified;
  json dec;
  dec["cuts"] = s.decomposition.cuts;
  dec["leakages"] = s.decomposition.leakages;
  std::vector<int> dims;
  for (const auto& h : s.decomposition.subspaces) dims.push_back(static_cast<int>(h.cols()));
  dec["subspace_dims"] = dims;
  j["decomposition"] = dec;
  json blocks = json::array();
  for (const auto& b : s.blocks)
    blocks.push_back({{"r", b.r}, {"first", b.first}, {"last", b.last}, {"D", b.D}, {"duplicated", b.duplicated},
                      {"patch_vectors", b.patch_vectors}, {"parts", b.parts}, {"selected_part", b.selected_part},
                      {"selection", b.selection}});
  j["blocks"] = blocks;
  json checks = json::array();
  for (const auto& c : s.checks)
    checks.push_back({{"name", c.name}, {"block", c.block}, {"m", c.m}, {"n", c.n}, {"value", c.value},
                      {"bound", c.bound}, {"slack", c.slack}, {"holds", c.holds}});
  j["checks"] = checks;
  return j;
}

}  // namespace frameforge
