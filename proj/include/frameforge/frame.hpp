#pragma once

#include "frameforge/linalg.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace frameforge {

enum class Field { Real, Complex };

constexpr double kDefaultTolerance = 1e-8;

// Finite indexed family; column j of `vectors` is x_j. Weights are measure
// masses, so an amplitude c enters as weight c^2.
struct Frame {
  Field field = Field::Real;
  Mat vectors;
  std::vector<double> weights;
  bool explicit_weights = false;

  int dim() const { return static_cast<int>(vectors.rows()); }
  int size() const { return static_cast<int>(vectors.cols()); }
  double weight(int j) const { return weights.empty() ? 1.0 : weights[j]; }

  static Frame from_columns(const Mat& cols, Field field = Field::Complex);
  static Frame from_columns(const Mat& cols, std::vector<double> weights,
                            Field field = Field::Complex);
};

enum class BoundsMethod { Eigen, RayleighProbe, Quadrature };

struct FrameBounds {
  double lower = 0.0;
  double upper = 0.0;
  double tolerance = kDefaultTolerance;
  BoundsMethod method = BoundsMethod::Eigen;
};

std::string to_string(BoundsMethod m);

// Throws InvalidInput on shape, weight or finiteness problems.
void validate(const Frame& f);

Mat frame_operator(const Frame& f);
FrameBounds frame_bounds(const Frame& f, double tolerance = kDefaultTolerance);
FrameBounds bounds_of_operator(const Mat& t, double tolerance = kDefaultTolerance);

Frame parseval_normalize(const Frame& f, double tolerance = kDefaultTolerance);

// Claimed bounds (||T^-1||^-2, ||T||^2) for (T x_j) when (x_j) is Parseval.
FrameBounds transformed_bounds(const Frame& f, const Mat& op,
                               double tolerance = kDefaultTolerance);

FrameBounds rayleigh_probe(const Frame& f, int trials, std::uint64_t seed = 1);

Frame subframe(const Frame& f, const std::vector<int>& idx);
Frame apply_operator(const Mat& op, const Frame& f);
Frame scaled(const Frame& f, double amplitude);
Frame concat(const Frame& a, const Frame& b);

// Sum of weighted |<x, x_j>|^2.
double frame_energy(const Frame& f, const Vec& x);
double weighted_trace(const Frame& f, const std::vector<int>& idx);
double max_weighted_sq_norm(const Frame& f);

// Subspace-compressed eigen bounds: eigenvalues of Q* T Q for orthonormal Q.
FrameBounds compressed_bounds(const Mat& t, const Mat& q);

bool is_tight(const Frame& f, double tolerance, double* bound = nullptr);

}  // namespace frameforge
