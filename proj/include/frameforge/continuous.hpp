#pragma once

#include "frameforge/frame.hpp"
#include "frameforge/frame_io.hpp"
#include "frameforge/scalable.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace frameforge {

using Point = std::vector<double>;
using Evaluator = std::function<Vec(const Point&)>;

struct Box {
  std::vector<std::pair<double, double>> sides;  // one [lo, hi] per axis
  double density = 1.0;

  double volume() const;
  double mass() const { return density * volume(); }
};

struct Atom {
  Point t;
  double mass = 0.0;
};

struct ContinuousFrameModel {
  std::string kind;
  Field field = Field::Complex;
  int dim = 0;  // representation space
  std::vector<Box> boxes;
  std::vector<Atom> atoms;
  Evaluator psi;
  std::optional<double> norm_bound;
  std::optional<double> lipschitz;  // declared modulus of continuity on boxes
  double feature_scale = 0.0;       // largest safe quadrature cell width, 0 if unknown

  int domain_dim() const;
  double total_mass() const;
};

struct QuadratureConfig {
  int resolution = 64;  // initial cells per axis
  double tolerance = 1e-8;
  long long cell_cap = 1LL << 20;  // per box
};

struct QuadratureResult {
  Mat T;
  std::vector<int> cells_per_axis;  // final grid for each box
  double last_delta = 0.0;
};

QuadratureResult quadrature_frame_operator(const ContinuousFrameModel& model, const QuadratureConfig& cfg = {});
FrameBounds check_continuous_bounds(const ContinuousFrameModel& model, const QuadratureConfig& cfg = {});

struct DomainPartitionCell {
  Point lo, hi;  // empty for atoms
  Point t;
  double mass = 0.0;
  double range_radius = 0.0;
  int budget_index = 0;  // j of the budget eps 2^-j, 0 for atoms or uniform budgets
  bool atom = false;
};

enum class BudgetRule { Dyadic, Uniform };

struct NetConfig {
  BudgetRule budget = BudgetRule::Uniform;
  long long cell_cap = 1LL << 22;
  int probe_points = 256;  // per axis, when the modulus is probed
  double safety = 4.0;
};

struct NetResult {
  std::vector<DomainPartitionCell> cells;
  double epsilon = 0.0;
  double lipschitz = 0.0;
  bool rigorous = true;  // false when the modulus was probed
  double l1_defect = 0.0;
};

double probe_lipschitz(const ContinuousFrameModel& model, int points_per_axis = 256);
NetResult epsilon_net_discretize(const ContinuousFrameModel& model, double epsilon, const NetConfig& cfg = {});
Frame discretize_to_weighted_frame(const ContinuousFrameModel& model, const std::vector<DomainPartitionCell>& cells);

struct DiscretizeConfig {
  NetConfig net;
  QuadratureConfig quadrature;
  SampleConfig sample;
  long long denominator_cap = 1LL << 20;
  long long duplication_cap = 4000000;
};

struct DiscretizeResult {
  NetResult net;
  FrameBounds weighted_bounds;
  double epsilon0 = 0.0;
  SampledFrame sample;
  std::vector<Point> points;              // sample points, one per returned index
  std::vector<long long> multiplicities;
  Frame samples;                          // Psi(t_i) with multiplicity, original model
  FrameBounds sample_bounds;
  FrameBounds model_bounds;               // quadrature bounds of the input model
  double C2 = 1.0;                        // rescale used by the general pipeline
};

DiscretizeResult discretize_parseval(const ContinuousFrameModel& model, double epsilon,
                                     const DiscretizeConfig& cfg = {});
DiscretizeResult discretize_general(const ContinuousFrameModel& model, double epsilon,
                                    const DiscretizeConfig& cfg = {});

// Model with evaluator S Psi for a fixed matrix S.
ContinuousFrameModel transformed_model(const ContinuousFrameModel& model, const Mat& S,
                                       std::optional<double> lipschitz_scale = std::nullopt);
// Grid maximum of ||Psi|| plus the Lipschitz slack; falls back to the stored bound.
double estimate_norm_bound(const ContinuousFrameModel& model, int points_per_axis = 4096);
// S = T^{-1/2} from quadrature; the result is Parseval to quadrature accuracy.
ContinuousFrameModel parseval_normalized(const ContinuousFrameModel& model, const QuadratureConfig& cfg = {});

ContinuousFrameModel reverse_direction_measure(const std::vector<Point>& points,
                                               const std::vector<long long>& multiplicities, const Evaluator& psi,
                                               int dim, Field field = Field::Complex);

ContinuousFrameModel gabor_stft(double amplitude, double half_width, int hermite_count);
ContinuousFrameModel exponential_on_set(const std::vector<std::pair<double, double>>& J, int modes, double x_lo,
                                        double x_hi, double period = 0.0);
// Integer-lattice atoms of unit mass (Fourier series coefficients).
ContinuousFrameModel exponential_lattice(const std::vector<std::pair<double, double>>& J, int modes, int lattice_lo,
                                         int lattice_hi, double period = 0.0);
ContinuousFrameModel atomic_from_frame(const Frame& f);
ContinuousFrameModel unbounded_counterexample(int d);

ContinuousFrameModel model_from_json(const json& j);
ContinuousFrameModel load_model(const std::string& path);
json discretize_to_json(const DiscretizeResult& r);

}  // namespace frameforge
