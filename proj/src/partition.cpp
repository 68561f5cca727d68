#include "frameforge/partition.hpp"

#include "frameforge/errors.hpp"
#include "frameforge/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace frameforge {

namespace {

// Columns sqrt(w_j) x_j; weights folded into the vectors.
Mat effective(const Frame& f) {
  if (f.weights.empty()) return f.vectors;
  Mat u = f.vectors;
  for (int j = 0; j < f.size(); ++j) u.col(j) *= std::sqrt(f.weights[j]);
  return u;
}

template <class M>
double top_eig(const M& a) {
  if (a.rows() == 0) return 0.0;
  if (a.rows() == 1) return std::real(a(0, 0));
  Eigen::SelfAdjointEigenSolver<M> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(a.rows() - 1);
}

// Operator of a chosen column set, real or complex storage.
struct Ops {
  bool real;
  Eigen::MatrixXd ur;
  Mat uc;

  explicit Ops(const Mat& u, bool is_real) : real(is_real) {
    if (real) ur = u.real();
    else uc = u;
  }
  int dim() const { return real ? static_cast<int>(ur.rows()) : static_cast<int>(uc.rows()); }
  int size() const { return real ? static_cast<int>(ur.cols()) : static_cast<int>(uc.cols()); }
};

double lmax_of(const Ops& o, const std::vector<char>& side, char which) {
  if (o.real) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(o.dim(), o.dim());
    for (int j = 0; j < o.size(); ++j)
      if (side[j] == which) s.selfadjointView<Eigen::Lower>().rankUpdate(o.ur.col(j));
    return top_eig(s);
  }
  Mat s = Mat::Zero(o.dim(), o.dim());
  for (int j = 0; j < o.size(); ++j)
    if (side[j] == which) s.selfadjointView<Eigen::Lower>().rankUpdate(o.uc.col(j));
  return top_eig(s);
}

bool is_real(const Frame& f) { return f.field == Field::Real; }

// Running operators for the local search.
struct Running {
  bool real;
  Eigen::MatrixXd r[2];
  Mat c[2];
  double lam[2] = {0.0, 0.0};

  Running(int d, bool is_real) : real(is_real) {
    for (int s = 0; s < 2; ++s) {
      if (real) r[s] = Eigen::MatrixXd::Zero(d, d);
      else c[s] = Mat::Zero(d, d);
    }
  }
};

double lam_after(const Running& run, const Ops& o, int s, int add, int remove) {
  if (run.real) {
    Eigen::MatrixXd m = run.r[s];
    if (add >= 0) m.noalias() += o.ur.col(add) * o.ur.col(add).transpose();
    if (remove >= 0) m.noalias() -= o.ur.col(remove) * o.ur.col(remove).transpose();
    return top_eig(m);
  }
  Mat m = run.c[s];
  if (add >= 0) m.noalias() += o.uc.col(add) * o.uc.col(add).adjoint();
  if (remove >= 0) m.noalias() -= o.uc.col(remove) * o.uc.col(remove).adjoint();
  return top_eig(m);
}

void apply_change(Running& run, const Ops& o, int s, int add, int remove) {
  if (run.real) {
    if (add >= 0) run.r[s].noalias() += o.ur.col(add) * o.ur.col(add).transpose();
    if (remove >= 0) run.r[s].noalias() -= o.ur.col(remove) * o.ur.col(remove).transpose();
  } else {
    if (add >= 0) run.c[s].noalias() += o.uc.col(add) * o.uc.col(add).adjoint();
    if (remove >= 0) run.c[s].noalias() -= o.uc.col(remove) * o.uc.col(remove).adjoint();
  }
}

TwoSplit split_from_sides(const std::vector<char>& side, double achieved) {
  TwoSplit t;
  for (int j = 0; j < static_cast<int>(side.size()); ++j) (side[j] == 0 ? t.left : t.right).push_back(j);
  t.achieved = achieved;
  return t;
}

double within(double bound, double tol) { return bound + tol * std::max(1.0, std::abs(bound)); }

void check_part_indices(const std::vector<IndexSet>& parts, int n) {
  for (const auto& p : parts)
    for (int j : p)
      if (j < 0 || j >= n) throw InvalidInput("part index out of range");
}

}  // namespace

double mss_bound(double delta, int r) {
  double v = 1.0 / std::sqrt(static_cast<double>(r)) + std::sqrt(delta);
  return v * v;
}

TwoSplit exact_two_partition(const Frame& f, int limit) {
  validate(f);
  const int m = f.size();
  if (m > limit) throw UseHeuristic("exact search limited to " + std::to_string(limit) + " vectors, got " + std::to_string(m));
  if (m > 62) throw ResourceLimit("exact search cannot enumerate more than 62 vectors");
  Ops o(effective(f), is_real(f));
  if (m == 1) {
    std::vector<char> side{0};
    return split_from_sides(side, lmax_of(o, side, 0));
  }
  const long long masks = 1LL << (m - 1);
  const long long chunks = std::min<long long>(masks, 64);
  std::vector<double> best_val(chunks, std::numeric_limits<double>::infinity());
  std::vector<long long> best_mask(chunks, 0);
  parallel_for(chunks, [&](long long c) {
    long long lo = masks * c / chunks, hi = masks * (c + 1) / chunks;
    std::vector<char> side(m, 0);
    for (long long mask = lo; mask < hi; ++mask) {
      for (int j = 1; j < m; ++j) side[j] = static_cast<char>((mask >> (j - 1)) & 1);
      double v = std::max(lmax_of(o, side, 0), lmax_of(o, side, 1));
      if (v < best_val[c]) {
        best_val[c] = v;
        best_mask[c] = mask;
      }
    }
  });
  long long bm = best_mask[0];
  double bv = best_val[0];
  for (long long c = 1; c < chunks; ++c)
    if (best_val[c] < bv) {
      bv = best_val[c];
      bm = best_mask[c];
    }
  std::vector<char> side(m, 0);
  for (int j = 1; j < m; ++j) side[j] = static_cast<char>((bm >> (j - 1)) & 1);
  return split_from_sides(side, bv);
}

HeuristicOutcome heuristic_two_partition(const Frame& f, double target, std::uint64_t seed, double tolerance) {
  validate(f);
  if (!(target > 0.0)) throw InvalidInput("heuristic target must be positive");
  const int m = f.size();
  Ops o(effective(f), is_real(f));
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> sq(m);
  for (int j = 0; j < m; ++j) sq[j] = f.weight(j) * f.vectors.col(j).squaredNorm();
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return sq[a] > sq[b]; });

  Running run(f.dim(), o.real);
  std::vector<char> side(m, 0);
  for (int j : order) {
    double vl = lam_after(run, o, 0, j, -1);
    double vr = lam_after(run, o, 1, j, -1);
    double opt_l = std::max(vl, run.lam[1]);
    double opt_r = std::max(run.lam[0], vr);
    int s = (opt_l <= opt_r) ? 0 : 1;
    side[j] = static_cast<char>(s);
    apply_change(run, o, s, j, -1);
    run.lam[s] = s == 0 ? vl : vr;
  }

  auto current = [&] { return std::max(run.lam[0], run.lam[1]); };
  const double eps = 1e-14;
  for (int pass = 0; pass < 50 && current() > target; ++pass) {
    bool improved = false;
    for (int j = 0; j < m; ++j) {
      int s = side[j], t = 1 - s;
      double ns = lam_after(run, o, s, -1, j);
      double nt = lam_after(run, o, t, j, -1);
      if (std::max(ns, nt) < current() - eps) {
        apply_change(run, o, s, -1, j);
        apply_change(run, o, t, j, -1);
        run.lam[s] = ns;
        run.lam[t] = nt;
        side[j] = static_cast<char>(t);
        improved = true;
      }
    }
    if (!improved) break;
  }

  if (current() > target) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, m - 1);
    long long attempts = std::min<long long>(8LL * m, 40000);
    for (long long a = 0; a < attempts && current() > target; ++a) {
      int i = pick(rng), j = pick(rng);
      if (side[i] == side[j]) continue;
      int si = side[i], sj = side[j];
      Running trial = run;
      apply_change(trial, o, si, j, i);
      apply_change(trial, o, sj, i, j);
      double a0 = lam_after(trial, o, 0, -1, -1), a1 = lam_after(trial, o, 1, -1, -1);
      if (std::max(a0, a1) < current() - eps) {
        run = trial;
        run.lam[0] = a0;
        run.lam[1] = a1;
        std::swap(side[i], side[j]);
      }
    }
  }

  // Recompute from scratch so the reported value carries no update drift.
  double achieved = std::max(lmax_of(o, side, 0), lmax_of(o, side, 1));
  HeuristicOutcome out;
  out.split = split_from_sides(side, achieved);
  out.best_achieved = achieved;
  out.certified = achieved <= within(target, tolerance);
  return out;
}

double next_B(double b) { return 0.5 * b - std::sqrt(2.0) * std::sqrt(b) - 1.0; }

std::vector<double> b_sequence(double b0) {
  std::vector<double> seq{b0};
  while (seq.back() >= 200.0) seq.push_back(next_B(seq.back()));
  return seq;
}

double split_target(double b) { return 0.5 + std::sqrt(2.0) / std::sqrt(b) + 1.0 / b; }
double split_lower(double b) { return 0.5 - std::sqrt(2.0) / std::sqrt(b) - 1.0 / b; }

double ratio_series() {
  return (10.0 / std::sqrt(79.0)) / (1.0 - std::sqrt(79.0 / 200.0));
}

double ratio_bound() { return std::exp(ratio_series()); }
double b_star() { return 200.0 * ratio_bound(); }

namespace {

struct Reducer {
  const Frame& f;
  const PartitionConfig& cfg;
  Mat u;
  std::vector<double> bseq;
  PartitionResult result;
  std::uint64_t node = 0;

  Reducer(const Frame& f, const PartitionConfig& cfg) : f(f), cfg(cfg), u(effective(f)) {}

  Mat op(const IndexSet& idx) const {
    Mat s = Mat::Zero(u.rows(), u.rows());
    for (int j : idx) s.selfadjointView<Eigen::Lower>().rankUpdate(u.col(j));
    return Mat(s.selfadjointView<Eigen::Lower>());
  }

  [[noreturn]] void fail(const std::string& why, double best) {
    throw PartitionFailure(why, result.certificate, best);
  }

  void leaf(const IndexSet& idx) {
    FrameBounds b = bounds_of_operator(op(idx), cfg.tolerance);
    if (b.lower < 1.0 - cfg.tolerance) fail("leaf lower bound below 1", b.lower);
    if (b.upper > within(b_star(), cfg.tolerance)) fail("leaf upper bound above B*", b.upper);
    if (bseq.front() >= 79.0 && b.upper > within(ratio_bound(), cfg.tolerance) * b.lower)
      fail("leaf bound ratio above the series bound", b.upper / b.lower);
    result.parts.push_back(idx);
    result.bounds.push_back(b);
  }

  void visit(const IndexSet& idx, int m) {
    const double bm = bseq[m];
    const int n = static_cast<int>(bseq.size()) - 1;
    if (m == n) {
      leaf(idx);
      return;
    }
    Mat s = op(idx);
    double lmin = lambda_min(s);
    PartitionStep step;
    step.level = m;
    step.B_m = bm;
    step.size = static_cast<int>(idx.size());
    step.target_bessel = split_target(bm);
    step.e3_bound = 1.0 / split_lower(bm);
    step.e1_value = lmin > 0 ? 1.0 / lmin : INFINITY;
    if (lmin < bm * (1.0 - cfg.tolerance)) {
      step.method = "none";
      result.certificate.push_back(step);
      fail("(E:1) violated at level " + std::to_string(m), lmin);
    }
    Frame y;
    y.field = f.field;
    y.vectors = inverse_sqrt(s) * u(Eigen::all, idx);
    if (f.field == Field::Real) y.vectors = y.vectors.real().cast<cplx>();

    TwoSplit split;
    if (static_cast<int>(idx.size()) <= cfg.exhaustive_limit) {
      split = exact_two_partition(y, cfg.exhaustive_limit);
      step.method = "exact";
    } else {
      HeuristicOutcome h = heuristic_two_partition(y, step.target_bessel, cfg.seed + 0x9E3779B97F4A7C15ULL * (++node),
                                                   cfg.tolerance);
      split = h.split;
      step.method = "heuristic";
    }
    Mat tl = frame_operator(subframe(y, split.left));
    Mat tr = split.right.empty() ? Mat::Zero(f.dim(), f.dim()) : frame_operator(subframe(y, split.right));
    Eigen::VectorXd el = hermitian_eigenvalues(tl), er = hermitian_eigenvalues(tr);
    step.achieved_left = el.maxCoeff();
    step.achieved_right = er.maxCoeff();
    step.e3_left = el.minCoeff() > 0 ? 1.0 / el.minCoeff() : INFINITY;
    step.e3_right = er.minCoeff() > 0 ? 1.0 / er.minCoeff() : INFINITY;
    const double tgt = within(step.target_bessel, cfg.tolerance);
    const double e3 = within(step.e3_bound, cfg.tolerance);
    step.certified = step.achieved_left <= tgt && step.achieved_right <= tgt && step.e3_left <= e3 &&
                     step.e3_right <= e3;
    result.certificate.push_back(step);
    if (!step.certified)
      fail("two-partition not certified at level " + std::to_string(m) + " (target " +
               std::to_string(step.target_bessel) + ")",
           std::max(step.achieved_left, step.achieved_right));
    IndexSet l, r;
    for (int j : split.left) l.push_back(idx[j]);
    for (int j : split.right) r.push_back(idx[j]);
    visit(l, m + 1);
    visit(r, m + 1);
  }
};

void check_unit_ball(const Mat& u, double scale, double tol) {
  for (int j = 0; j < u.cols(); ++j)
    if (u.col(j).norm() > scale * (1.0 + tol))
      throw InvalidInput("vector " + std::to_string(j) + " lies outside the ball of radius " + std::to_string(scale));
}

}  // namespace

PartitionResult reduce_tight_frame(const Frame& f, const PartitionConfig& cfg) {
  validate(f);
  Reducer red(f, cfg);
  check_unit_ball(red.u, 1.0, cfg.tolerance);
  FrameBounds b = frame_bounds(f, cfg.tolerance);
  if (b.upper - b.lower > cfg.tolerance * std::max(1.0, b.upper))
    throw InvalidInput("frame is not tight within tolerance (bounds " + std::to_string(b.lower) + ", " +
                       std::to_string(b.upper) + ")");
  const double b0 = 0.5 * (b.lower + b.upper);
  if (b0 <= 1.0) throw InvalidInput("tight frame bound must exceed 1");
  red.bseq = b_sequence(b0);
  IndexSet all(f.size());
  std::iota(all.begin(), all.end(), 0);
  red.visit(all, 0);
  return red.result;
}

PartitionResult partition_general_frame(const Frame& f, const PartitionConfig& cfg) {
  validate(f);
  Mat u = effective(f);
  check_unit_ball(u, 1.0, cfg.tolerance);
  Mat t = frame_operator(f);
  FrameBounds b = bounds_of_operator(t, cfg.tolerance);
  if (b.lower < 1.0 - cfg.tolerance) throw InvalidInput("lower frame bound " + std::to_string(b.lower) + " is below 1");
  PartitionResult r;
  if (b.upper <= 1.0 + cfg.tolerance) {
    IndexSet all(f.size());
    std::iota(all.begin(), all.end(), 0);
    r.parts.push_back(all);
    r.bounds.push_back(b);
    return r;
  }
  if (b.upper - b.lower <= 1e-12 * std::max(1.0, b.upper)) {
    r = reduce_tight_frame(f, cfg);
  } else {
    Frame g = apply_operator(std::sqrt(b.lower) * inverse_sqrt(t), f);
    r = reduce_tight_frame(g, cfg);
  }
  const double cap = within(b_star() * b.upper / b.lower, cfg.tolerance);
  for (size_t k = 0; k < r.parts.size(); ++k) {
    r.bounds[k] = frame_bounds(subframe(f, r.parts[k]), cfg.tolerance);
    if (r.bounds[k].lower < 1.0 - cfg.tolerance)
      throw PartitionFailure("mapped part lower bound below 1", r.certificate, r.bounds[k].lower);
    if (r.bounds[k].upper > cap)
      throw PartitionFailure("mapped part upper bound above B* B0/A0", r.certificate, r.bounds[k].upper);
  }
  return r;
}

namespace {

// Halves a part while its upper bound exceeds `cap` and both halves stay frames.
void refine_part(const Frame& y, const IndexSet& idx, double cap, const PartitionConfig& cfg, std::uint64_t& node,
                 std::vector<IndexSet>& out) {
  Mat s = frame_operator(subframe(y, idx));
  FrameBounds b = bounds_of_operator(s, cfg.tolerance);
  if (b.upper <= cap * (1.0 + cfg.tolerance) || idx.size() < 2 || b.lower <= 0.0) {
    out.push_back(idx);
    return;
  }
  Frame z = apply_operator(inverse_sqrt(s), subframe(y, idx));
  double tau = mss_bound(max_weighted_sq_norm(z));
  double target = std::min(tau, 1.0 - 1e-6);
  TwoSplit split;
  const int exact_cap = std::min(cfg.exhaustive_limit, 12);
  if (static_cast<int>(idx.size()) <= exact_cap) {
    split = exact_two_partition(z, exact_cap);
    if (split.achieved > target) split.right.clear();
  } else {
    HeuristicOutcome h = heuristic_two_partition(z, target, cfg.seed + 0xD1B54A32D192ED03ULL * (++node), cfg.tolerance);
    if (h.certified) split = h.split;
  }
  if (split.right.empty() || split.left.empty()) {
    out.push_back(idx);
    return;
  }
  IndexSet l, r;
  for (int j : split.left) l.push_back(idx[j]);
  for (int j : split.right) r.push_back(idx[j]);
  refine_part(y, l, cap, cfg, node, out);
  refine_part(y, r, cap, cfg, node, out);
}

}  // namespace

SubsetResult subset_tight_frame(const Frame& f, int N, const PartitionConfig& cfg) {
  validate(f);
  if (N < 1) throw InvalidInput("N must be a positive integer");
  Mat u = effective(f);
  check_unit_ball(u, 1.0 / N, cfg.tolerance);
  FrameBounds b = frame_bounds(f, cfg.tolerance);
  if (b.upper <= 1.0 + cfg.tolerance) throw InvalidInput("frame bound must exceed 1");
  Frame y = scaled(f, static_cast<double>(N));
  PartitionResult pr = partition_general_frame(y, cfg);

  std::vector<IndexSet> parts;
  std::uint64_t node = 0;
  for (const auto& p : pr.parts) refine_part(y, p, static_cast<double>(N), cfg, node, parts);

  SubsetResult res;
  res.parts_available = static_cast<int>(parts.size());
  IndexSet chosen;
  for (const auto& p : parts) {
    chosen.insert(chosen.end(), p.begin(), p.end());
    ++res.parts_combined;
    if (lambda_max(frame_operator(subframe(f, chosen))) >= 1.0 - cfg.tolerance) break;
  }
  std::sort(chosen.begin(), chosen.end());
  res.indices = chosen;
  res.bounds = frame_bounds(subframe(f, chosen), cfg.tolerance);
  const double cap = 1.0 + 1.0 / N + cfg.tolerance;
  if (res.bounds.upper > cap || res.bounds.lower <= 0.0)
    throw PartitionFailure("combined subset bounds (" + std::to_string(res.bounds.lower) + ", " +
                               std::to_string(res.bounds.upper) + ") miss the 1 + 1/N envelope",
                           pr.certificate, res.bounds.upper);
  return res;
}

IndexSet select_low_trace_parts(const Frame& f, const std::vector<IndexSet>& parts, int K, double* bound) {
  validate(f);
  const int m = static_cast<int>(parts.size());
  if (K < 1 || K >= m) throw InvalidInput("K must satisfy 1 <= K < number of parts");
  check_part_indices(parts, f.size());
  std::vector<double> tr(m);
  for (int p = 0; p < m; ++p) tr[p] = weighted_trace(f, parts[p]);
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return tr[a] < tr[b]; });
  IndexSet out(order.begin(), order.begin() + K);
  std::sort(out.begin(), out.end());
  if (bound) *bound = frame_bounds(f).upper * f.dim() / static_cast<double>(m + 1 - K);
  return out;
}

MultiLevelResult multi_level_select(const std::vector<Frame>& frames, const std::vector<IndexSet>& parts) {
  if (frames.empty()) throw InvalidInput("multi_level_select needs at least one frame");
  const int m = static_cast<int>(parts.size());
  if (m == 0) throw InvalidInput("no parts given");
  const int P = static_cast<int>(frames.size());
  MultiLevelResult res;
  std::vector<std::vector<double>> traces(P, std::vector<double>(m));
  for (int p = 0; p < P; ++p) {
    validate(frames[p]);
    check_part_indices(parts, frames[p].size());
    double c = frames[p].size() ? frame_bounds(frames[p]).upper : 0.0;
    res.bounds.push_back(std::pow(4.0, p + 1) * c * frames[p].dim() / m);
    for (int k = 0; k < m; ++k) traces[p][k] = weighted_trace(frames[p], parts[k]);
  }
  res.degenerate = m <= (1LL << std::min(P + 1, 62));
  std::vector<int> cand(m);
  std::iota(cand.begin(), cand.end(), 0);
  if (!res.degenerate) {
    for (int p = 0; p < P; ++p) {
      int s = static_cast<int>(cand.size());
      int mp = s - (s % 2);
      if (mp < 2) break;
      std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) { return traces[p][a] < traces[p][b]; });
      cand.resize(mp / 2);
      std::sort(cand.begin(), cand.end());
    }
  }
  res.part = cand.front();
  for (int p = 0; p < P; ++p) {
    const IndexSet& idx = parts[res.part];
    res.achieved.push_back(idx.empty() ? 0.0 : frame_bounds(subframe(frames[p], idx)).upper);
  }
  return res;
}

DualityReport complement_duality_check(const Frame& parseval, const IndexSet& subset, double delta, double tolerance) {
  validate(parseval);
  FrameBounds all = frame_bounds(parseval, tolerance);
  if (std::abs(all.lower - 1.0) > tolerance || std::abs(all.upper - 1.0) > tolerance)
    throw InvalidInput("input frame is not Parseval within tolerance");
  std::vector<char> in(parseval.size(), 0);
  for (int j : subset) {
    if (j < 0 || j >= parseval.size()) throw InvalidInput("subset index out of range");
    if (in[j]) throw InvalidInput("subset index repeated");
    in[j] = 1;
  }
  IndexSet comp;
  for (int j = 0; j < parseval.size(); ++j)
    if (!in[j]) comp.push_back(j);
  auto bounds = [&](const IndexSet& idx) {
    if (idx.empty()) return FrameBounds{0.0, 0.0, tolerance, BoundsMethod::Eigen};
    return frame_bounds(subframe(parseval, idx), tolerance);
  };
  DualityReport r;
  r.subset_bounds = bounds(subset);
  r.complement_bounds = bounds(comp);
  auto framed = [&](const FrameBounds& b) {
    return b.lower >= delta - tolerance && b.upper <= 1.0 - delta + tolerance;
  };
  r.subset_frame = framed(r.subset_bounds);
  r.complement_frame = framed(r.complement_bounds);
  r.both_bessel = r.subset_bounds.upper <= 1.0 - delta + tolerance &&
                  r.complement_bounds.upper <= 1.0 - delta + tolerance;
  return r;
}

FiniteSectionResult finite_section_partition(const std::vector<Frame>& sections, double K, const PartitionConfig& cfg) {
  if (sections.empty()) throw InvalidInput("no sections given");
  if (!(K > 1.0)) throw InvalidInput("tight bound K must exceed 1");
  FiniteSectionResult out;
  const int cap = static_cast<int>(std::floor(K));
  for (size_t s = 0; s < sections.size(); ++s) {
    const Frame& sec = sections[s];
    validate(sec);
    if (s > 0) {
      const Frame& prev = sections[s - 1];
      if (prev.size() > sec.size() || prev.dim() != sec.dim() ||
          (sec.vectors.leftCols(prev.size()) - prev.vectors).norm() > 0.0)
        throw InvalidInput("sections must be nested prefixes of one sequence");
    }
    Mat u = effective(sec);
    check_unit_ball(u, 1.0, cfg.tolerance);
    Mat q = orthonormal_span(u, 1e-10);
    Mat local = q.adjoint() * u;
    Mat s_op = local * local.adjoint();
    EigenPairs e = hermitian_eigen(s_op);
    if (e.values.maxCoeff() > K * (1.0 + cfg.tolerance))
      throw InvalidInput("section exceeds the tight bound K; no completion exists");
    std::vector<Vec> extra;
    for (int k = 0; k < e.values.size(); ++k) {
      double lam = K - e.values[k];
      if (lam <= 1e-12 * K) continue;
      int copies = static_cast<int>(std::ceil(lam));
      for (int c = 0; c < copies; ++c) extra.push_back(std::sqrt(lam / copies) * e.vectors.col(k));
    }
    Mat all(local.rows(), local.cols() + static_cast<Eigen::Index>(extra.size()));
    all.leftCols(local.cols()) = local;
    for (size_t k = 0; k < extra.size(); ++k) all.col(local.cols() + static_cast<Eigen::Index>(k)) = extra[k];
    Frame comp = Frame::from_columns(all, sec.field == Field::Real && q.imag().norm() == 0.0 ? Field::Real : Field::Complex);
    if (comp.field == Field::Real) comp.vectors = comp.vectors.real().cast<cplx>();
    PartitionResult pr = reduce_tight_frame(comp, cfg);
    SectionReport rep;
    rep.size = sec.size();
    rep.completion = static_cast<int>(extra.size());
    rep.part_count = static_cast<int>(pr.parts.size());
    rep.part_cap = cap;
    if (rep.part_count > cap) throw PartitionFailure("part count exceeds floor(K/A)", pr.certificate, rep.part_count);
    rep.assignment.assign(sec.size(), -1);
    for (size_t p = 0; p < pr.parts.size(); ++p)
      for (int j : pr.parts[p])
        if (j < sec.size()) rep.assignment[j] = static_cast<int>(p);
    if (s > 0) {
      const auto& prev = out.sections.back().assignment;
      rep.stable = std::equal(prev.begin(), prev.end(), rep.assignment.begin());
    }
    out.sections.push_back(rep);
  }
  int from = static_cast<int>(out.sections.size()) - 1;
  while (from > 0 && out.sections[from].stable) --from;
  out.stabilized_at = from;
  return out;
}

json partition_to_json(const PartitionResult& r) {
  json j;
  j["parts"] = r.parts;
  json b = json::array();
  for (const auto& fb : r.bounds) b.push_back({fb.lower, fb.upper});
  j["bounds"] = b;
  json c = json::array();
  for (const auto& s : r.certificate)
    c.push_back({{"level", s.level},
                 {"B_m", s.B_m},
                 {"target", s.target_bessel},
                 {"achieved_left", s.achieved_left},
                 {"achieved_right", s.achieved_right},
                 {"method", s.method},
                 {"certified", s.certified}});
  j["certificate"] = c;
  return j;
}

}  // namespace frameforge
