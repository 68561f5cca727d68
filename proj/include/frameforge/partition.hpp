#pragma once

#include "frameforge/frame.hpp"
#include "frameforge/frame_io.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace frameforge {

using IndexSet = std::vector<int>;

struct PartitionConfig {
  double tolerance = kDefaultTolerance;
  int exhaustive_limit = 20;
  std::uint64_t seed = 1;
};

struct TwoSplit {
  IndexSet left;
  IndexSet right;
  double achieved = 0.0;  // max of the two parts' Bessel bounds
};

// (1/sqrt(r) + sqrt(delta))^2
double mss_bound(double delta, int r = 2);

// Global minimiser of max(lambda_max(left), lambda_max(right)); index 0 is
// always on the left and ties go to the lexicographically smallest mask.
TwoSplit exact_two_partition(const Frame& f, int limit = 20);

struct HeuristicOutcome {
  bool certified = false;
  TwoSplit split;
  double best_achieved = 0.0;
};

HeuristicOutcome heuristic_two_partition(const Frame& f, double target, std::uint64_t seed = 1,
                                         double tolerance = kDefaultTolerance);

struct PartitionStep {
  int level = 0;
  double B_m = 0.0;
  double target_bessel = 0.0;
  double achieved_left = 0.0;
  double achieved_right = 0.0;
  std::string method;
  bool certified = false;
  // (E:1) side: 1/lambda_min(S) against 1/B_m; (E:3) per child.
  double e1_value = 0.0;
  double e3_left = 0.0;
  double e3_right = 0.0;
  double e3_bound = 0.0;
  int size = 0;
};

struct PartitionResult {
  std::vector<IndexSet> parts;
  std::vector<FrameBounds> bounds;
  std::vector<PartitionStep> certificate;
};

struct PartitionFailure : std::runtime_error {
  PartitionFailure(const std::string& what, std::vector<PartitionStep> trail, double best)
      : std::runtime_error(what), trail(std::move(trail)), best_achieved(best) {}
  std::vector<PartitionStep> trail;
  double best_achieved;
};

double next_B(double b);
// B_0, B_1, ..., B_n with 79 <= B_n < 200 (just {B_0} when B_0 < 200).
std::vector<double> b_sequence(double b0);
double split_target(double b);
double split_lower(double b);
// Sum over m >= 0 of 10 (79/200)^{m/2} / sqrt(79).
double ratio_series();
double ratio_bound();   // exp(ratio_series())
double b_star();        // 200 * ratio_bound()

PartitionResult reduce_tight_frame(const Frame& f, const PartitionConfig& cfg = {});
PartitionResult partition_general_frame(const Frame& f, const PartitionConfig& cfg = {});

struct SubsetResult {
  IndexSet indices;
  FrameBounds bounds;
  int parts_combined = 0;
  int parts_available = 0;
};

SubsetResult subset_tight_frame(const Frame& f, int N, const PartitionConfig& cfg = {});

// Part indices (ascending) of the K parts with smallest weighted trace.
IndexSet select_low_trace_parts(const Frame& f, const std::vector<IndexSet>& parts, int K,
                                double* bound = nullptr);

struct MultiLevelResult {
  int part = 0;
  bool degenerate = false;
  std::vector<double> bounds;    // 4^p C_p N_p / M
  std::vector<double> achieved;  // eigen Bessel bound of the chosen part per frame
};

MultiLevelResult multi_level_select(const std::vector<Frame>& frames, const std::vector<IndexSet>& parts);

struct DualityReport {
  bool subset_frame = false;      // statement (1)
  bool complement_frame = false;  // statement (2)
  bool both_bessel = false;       // statement (3)
  FrameBounds subset_bounds;
  FrameBounds complement_bounds;
  bool agree() const { return subset_frame == complement_frame && complement_frame == both_bessel; }
};

DualityReport complement_duality_check(const Frame& parseval, const IndexSet& subset, double delta,
                                       double tolerance = kDefaultTolerance);

struct SectionReport {
  int size = 0;             // original vectors in the section
  int completion = 0;       // added unit-ball vectors
  int part_count = 0;
  int part_cap = 0;
  std::vector<int> assignment;  // part of each original vector
  bool stable = false;          // prefix assignment equals previous section's
};

struct FiniteSectionResult {
  std::vector<SectionReport> sections;
  int stabilized_at = -1;  // first section from which every later one is stable
};

FiniteSectionResult finite_section_partition(const std::vector<Frame>& sections, double K,
                                             const PartitionConfig& cfg = {});

json partition_to_json(const PartitionResult& r);

}  // namespace frameforge
