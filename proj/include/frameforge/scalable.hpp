#pragma once

#include "frameforge/frame.hpp"
#include "frameforge/frame_io.hpp"
#include "frameforge/partition.hpp"
#include "frameforge/rational.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace frameforge {

struct ScalableFrame {
  Frame base;                // unit-ball vectors x_i
  std::vector<Rational> a2;  // squared scalars a_i^2
  double epsilon = 0.0;
};

// Rationalises a_i^2 (smallest denominator within round_tol, up to cap) and
// checks the scaled frame against (1 - eps, 1 + eps). A negative epsilon
// means "use the measured deviation".
ScalableFrame make_scalable(const Frame& base, const std::vector<double>& a, double epsilon = -1.0,
                            double round_tol = 1e-12, long long denominator_cap = 10000,
                            double tolerance = kDefaultTolerance);

Frame scaled_frame(const ScalableFrame& s);

double epsilon_prime(double eps);  // 6e + 4 sqrt(e) sqrt(1 + 2e)
double epsilon_one(double eps);    // 3e + 2 sqrt(2e) sqrt(1 + e)
double epsilon_two(double eps_prime, double B);

struct FinalForms {
  double eps_prime = 0.0;
  double eps2 = 0.0;
  double lower_first = 0.0;   // A - A e' - e2^2 - e2 - 4B(1 + e2) e2
  double lower_second = 0.0;  // A - (A + 2) e2 - 4B(1 + e2) sqrt(e2)
  double lower = 0.0;         // the smaller of the two
  double upper = 0.0;         // 2B(1 + e2)
};

FinalForms final_forms(double eps, double A, double B);

struct BlockDecomposition {
  int vector_count = 0;
  int dim = 0;
  double epsilon = 0.0;
  double epsilon_prime = 0.0;
  double B = 0.0;
  std::vector<Mat> subspaces;  // H_1..H_L, orthonormal columns
  std::vector<int> cuts;       // K_1..K_L
  std::vector<double> leakages;        // eps_1..eps_L
  std::vector<double> tail_leakage;    // achieved tail leakage at each cut

  int L() const { return static_cast<int>(subspaces.size()); }
  // K_n for n >= -1 (K_n = vector count past the recorded cuts).
  int K(int n) const;
  double eps_n(int n) const;
  Mat upto(int n) const;                // basis of the sum of H_j, j <= n
  Mat range(int lo, int hi) const;      // basis of the sum of H_j, lo <= j <= hi
  int dim_upto(int n) const;
};

BlockDecomposition build_block_decomposition(const ScalableFrame& s, int truncation = 8,
                                             double B = b_star(), double tolerance = kDefaultTolerance);

struct InequalityCheck {
  std::string name;
  int block = 0;  // sampling block r, or 0 for the decomposition
  int m = 0;
  int n = 0;
  double value = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  bool holds = false;
};

std::vector<InequalityCheck> verify_claim_one(const ScalableFrame& s, const BlockDecomposition& bd,
                                              double tolerance = kDefaultTolerance);

struct DuplicationMap {
  long long D = 1;
  std::vector<int> b;  // duplicated index -> original index (0-based)
};

long long choose_duplication(const std::vector<Rational>& a2, double eps);
DuplicationMap build_duplication(const ScalableFrame& s, int first, int last, long long D);

struct PatchResult {
  Frame patch;  // g_i, supported on H_0
  FrameBounds union_bounds;
  double eps1 = 0.0;
  bool within = false;
};

// h0, h1: orthonormal bases of the two orthogonal summands.
PatchResult orthogonal_patch(const Frame& f, const Mat& h0, const Mat& h1, double eps, long long duplication = 1,
                             double tolerance = kDefaultTolerance);

// 1-based index n with ||P_{H_n} x|| <= eps ||x|| (pair: ||P_{H_n + H_{n+1}} x||).
int find_low_energy_window(const std::vector<Mat>& subspaces, const Vec& x, double eps, bool pair = false);

struct Envelope {
  double K = 0.0, k = 0.0, c = 0.0;
  double upper(double p1, double p0) const;
  double lower(double p1, double p0) const;
};

Envelope cross_term_envelope(double K, double k, double c);
Envelope envelope_from_frame(const Frame& f, const Mat& h0, const Mat& h1);

struct Sequences {
  std::vector<long long> M;  // M_1, M_2, ...
  std::vector<long long> N;  // N_1, N_2, ...
  std::vector<double> delta;
  std::vector<long long> q;
  std::vector<std::pair<long long, long long>> p_interval;
};

Sequences choose_sequences(double eps, int blocks);

struct BlockReport {
  int r = 0;
  int first = 0, last = 0;  // vector range (first, last], 1-based
  long long D = 0;
  int duplicated = 0;
  int patch_vectors = 0;
  double patch_eps1 = 0.0;
  int parts = 0;
  int selected_part = 0;
  std::string selection;  // "multi-level" or "scan"
};

struct SampleConfig {
  int truncation = 8;
  double tolerance = kDefaultTolerance;
  PartitionConfig partition;
  double A = 1.0;
  double B = b_star();
};

struct SampledFrame {
  std::vector<int> indices;
  std::vector<long long> multiplicities;
  FrameBounds bounds;
  double epsilon = 0.0;
  FinalForms forms;
  bool lower_certified = false;
  bool upper_certified = false;
  BlockDecomposition decomposition;
  Sequences sequences;
  std::vector<BlockReport> blocks;
  std::vector<InequalityCheck> checks;

  Frame as_frame(const Frame& base) const;
  bool all_checks_hold() const;
};

SampledFrame sample_scalable(const ScalableFrame& s, const SampleConfig& cfg = {});

struct QuantizeConfig {
  int N = 1;
  long long denominator_cap = 10000;
  double rounding_tolerance = 1e-3;
  long long copy_cap = 200000;
  PartitionConfig partition;
};

struct QuantizeResult {
  int N = 1;
  long long M = 1;                 // common denominator of the rationalised d_i
  std::vector<long long> copies;   // n_i
  std::vector<long long> m;        // selected copies; c_i = sqrt(m_i)/N
  std::vector<double> c;
  FrameBounds bounds;              // of (c_i x_i)
  FrameBounds subset_bounds;       // of the selected sub-multiset (y_j)
};

QuantizeResult quantize_scaling(const Frame& base, const std::vector<double>& d, const QuantizeConfig& cfg);

json sample_to_json(const SampledFrame& s);

}  // namespace frameforge
