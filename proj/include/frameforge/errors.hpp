#pragma once

#include <stdexcept>
#include <string>

namespace frameforge {

struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotAFrame : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotAContinuousFrame : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Eigensolver trouble; carries the residual that tripped the check.
struct NumericalFailure : std::runtime_error {
  NumericalFailure(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

struct ResourceLimit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UseHeuristic : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureFailure : std::runtime_error {
  QuadratureFailure(const std::string& what, double coarse_delta, double fine_delta)
      : std::runtime_error(what), coarse_delta(coarse_delta), fine_delta(fine_delta) {}
  double coarse_delta;
  double fine_delta;
};

struct DiscretizationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DecompositionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SamplingFailure : std::runtime_error {
  SamplingFailure(const std::string& what, int block, std::string inequality)
      : std::runtime_error(what), block(block), inequality(std::move(inequality)) {}
  int block;
  std::string inequality;
};

}  // namespace frameforge
