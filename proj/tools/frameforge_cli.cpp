#include "frameforge/continuous.hpp"
#include "frameforge/errors.hpp"
#include "frameforge/frame.hpp"
#include "frameforge/frame_io.hpp"
#include "frameforge/funtf.hpp"
#include "frameforge/partition.hpp"
#include "frameforge/scalable.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>

using namespace frameforge;

namespace {

struct RunConfig {
  std::string input;
  std::string output;
  double epsilon = -1.0;
  double tolerance = kDefaultTolerance;
  int exhaustive_limit = 20;
  std::uint64_t seed = 1;
  int resolution = 64;
  int n = 1;
  bool exhaustive = false;
  std::vector<int> sizes{8, 12, 16};
  int seeds = 3;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void emit(const RunConfig& cfg, const json& j) {
  std::string text = j.dump(2) + "\n";
  if (cfg.output.empty()) std::cout << text;
  else save_text(cfg.output, text);
}

PartitionConfig partition_config(const RunConfig& cfg) {
  PartitionConfig p;
  p.tolerance = cfg.tolerance;
  p.exhaustive_limit = cfg.exhaustive_limit;
  p.seed = cfg.seed;
  return p;
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
}

std::vector<double> numbers(const json& j, const char* key) {
  if (!j.contains(key)) throw InvalidInput(std::string("input needs a \"") + key + "\" array");
  try {
    return j.at(key).get<std::vector<double>>();
  } catch (const json::exception&) {
    throw InvalidInput(std::string("\"") + key + "\" must be an array of numbers");
  }
}

int cmd_bounds(const RunConfig& cfg) {
  Frame f = load_frame(cfg.input);
  FrameBounds b = frame_bounds(f, cfg.tolerance);
  std::cout << "A=" << num(b.lower) << " B=" << num(b.upper) << "\n";
  if (!cfg.output.empty()) save_text(cfg.output, bounds_json(b).dump(2) + "\n");
  return 0;
}

int cmd_partition(const RunConfig& cfg) {
  Frame f = load_frame(cfg.input);
  PartitionConfig p = partition_config(cfg);
  PartitionResult r = is_tight(f, cfg.tolerance) ? reduce_tight_frame(f, p) : partition_general_frame(f, p);
  emit(cfg, partition_to_json(r));
  return 0;
}

int cmd_subset(const RunConfig& cfg) {
  Frame f = load_frame(cfg.input);
  SubsetResult s = subset_tight_frame(f, cfg.n, partition_config(cfg));
  emit(cfg, json{{"indices", s.indices}, {"bounds", bounds_json(s.bounds)}, {"parts_combined", s.parts_combined},
                 {"parts_available", s.parts_available}});
  return 0;
}

int cmd_quantize(const RunConfig& cfg) {
  json j = read_json(cfg.input);
  Frame f = frame_from_json(j);
  QuantizeConfig q;
  q.N = cfg.n;
  q.partition = partition_config(cfg);
  QuantizeResult r = quantize_scaling(f, numbers(j, "scalings"), q);
  emit(cfg, json{{"N", r.N}, {"M", r.M}, {"copies", r.copies}, {"m", r.m}, {"c", r.c},
                 {"bounds", bounds_json(r.bounds)}, {"subset_bounds", bounds_json(r.subset_bounds)}});
  return 0;
}

int cmd_sample(const RunConfig& cfg) {
  json j = read_json(cfg.input);
  Frame f = frame_from_json(j);
  ScalableFrame s = make_scalable(f, numbers(j, "scalars"), cfg.epsilon, 1e-12, 10000, cfg.tolerance);
  SampleConfig sc;
  sc.tolerance = cfg.tolerance;
  sc.partition = partition_config(cfg);
  SampledFrame out = sample_scalable(s, sc);
  emit(cfg, sample_to_json(out));
  return out.all_checks_hold() ? 0 : 2;
}

int cmd_discretize(const RunConfig& cfg) {
  ContinuousFrameModel m = load_model(cfg.input);
  DiscretizeConfig dc;
  dc.quadrature.resolution = cfg.resolution;
  dc.sample.tolerance = cfg.tolerance;
  dc.sample.partition = partition_config(cfg);
  DiscretizeResult r = discretize_general(m, cfg.epsilon > 0.0 ? cfg.epsilon : 0.01, dc);
  emit(cfg, discretize_to_json(r));
  return 0;
}

int cmd_counterexample(const RunConfig& cfg) {
  HadamardFuntf f = build_funtf(cfg.n);
  FuntfInvariants inv = funtf_invariants(f);
  Rational ip = aligned_pair_inner_product(f);
  json j{{"n", cfg.n},
         {"vectors", f.rows()},
         {"dim", f.cols()},
         {"invariants_exact", inv.all()},
         {"aligned_pair_inner_product", std::to_string(ip.numerator()) + "/" + std::to_string(ip.denominator())},
         {"case_one_bound", case_one_bound(cfg.n)},
         {"pair_bound", pair_bound(cfg.n)}};
  if (cfg.exhaustive) {
    ExhaustiveAudit a = exhaustive_basis_audit(f);
    j["exhaustive"] = {{"subsets", a.subsets}, {"spanning", a.spanning}, {"max_lower_riesz", a.max_lower_riesz},
                       {"argmax", a.argmax}, {"bound", a.bound}};
    std::cerr << "max basis Riesz bound " << num(a.max_lower_riesz) << " (bound " << num(a.bound) << ")\n";
  }
  emit(cfg, j);
  return inv.all() ? 0 : 2;
}

Frame random_parseval(int dim, int m, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd g(m, dim);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < dim; ++k) g(i, k) = nd(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m, dim);
  return Frame::from_columns(Mat(q.transpose().cast<cplx>()), Field::Real);
}

int cmd_bench(const RunConfig& cfg) {
  std::cout << "size  dim  seed  exact_ms  exact_value  heuristic_ms  heuristic_value\n";
  for (int m : cfg.sizes) {
    for (int s = 0; s < cfg.seeds; ++s) {
      std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(s));
      const int dim = std::min(4, std::max(2, m / 4));
      Frame f = random_parseval(dim, m, rng);
      auto t0 = std::chrono::steady_clock::now();
      double ev = -1.0;
      if (m <= cfg.exhaustive_limit) ev = exact_two_partition(f, cfg.exhaustive_limit).achieved;
      auto t1 = std::chrono::steady_clock::now();
      HeuristicOutcome h = heuristic_two_partition(f, 0.5, cfg.seed + s, cfg.tolerance);
      auto t2 = std::chrono::steady_clock::now();
      auto ms = [](auto a, auto b) { return std::chrono::duration<double, std::milli>(b - a).count(); };
      std::printf("%4d  %3d  %4d  %8.2f  %11s  %12.2f  %15s\n", m, dim, s, ms(t0, t1), ev < 0 ? "-" : num(ev).c_str(),
                  ms(t1, t2), num(h.best_achieved).c_str());
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frameforge: frame bounds, partitions, sampling and discretization"};
  app.require_subcommand(1);
  RunConfig cfg;
  auto common = [&](CLI::App* sub, bool needs_input) {
    auto* in = sub->add_option("--input,-i", cfg.input, "input JSON file");
    if (needs_input) in->required();
    sub->add_option("--output,-o", cfg.output, "write JSON here instead of stdout");
    sub->add_option("--epsilon", cfg.epsilon, "epsilon (sample: default measured; discretize: default 0.01)");
    sub->add_option("--tolerance", cfg.tolerance, "relative tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--exhaustive-limit", cfg.exhaustive_limit, "largest size searched exhaustively");
    sub->add_option("--seed", cfg.seed, "heuristic seed");
    sub->add_option("--resolution", cfg.resolution, "initial quadrature cells per axis")->check(CLI::PositiveNumber);
    sub->add_option("--n", cfg.n, "N for subset/quantize, n for counterexample");
  };
  std::vector<std::pair<CLI::App*, int (*)(const RunConfig&)>> cmds;
  auto add = [&](const char* name, const char* help, int (*fn)(const RunConfig&), bool needs_input) {
    CLI::App* sub = app.add_subcommand(name, help);
    common(sub, needs_input);
    cmds.emplace_back(sub, fn);
    return sub;
  };
  add("bounds", "print eigen frame bounds", cmd_bounds, true);
  add("partition", "partition into frames with bounded ratios", cmd_partition, true);
  add("subset", "subset with upper bound <= 1 + 1/N", cmd_subset, true);
  add("quantize", "quantize a scaling to sqrt(m)/N", cmd_quantize, true);
  add("sample", "sample a scalable frame", cmd_sample, true);
  add("discretize", "discretize a continuous frame model", cmd_discretize, true);
  auto* ce = add("counterexample", "FUNTF Riesz basis audit", cmd_counterexample, false);
  ce->add_flag("--exhaustive", cfg.exhaustive, "audit every basis subset (n <= 3)");
  auto* bench = add("bench", "time the two-way partition solvers", cmd_bench, false);
  bench->add_option("--sizes", cfg.sizes, "frame sizes")->delimiter(',');
  bench->add_option("--seeds", cfg.seeds, "seeds per size");

  CLI11_PARSE(app, argc, argv);
  try {
    for (auto& [sub, fn] : cmds)
      if (sub->parsed()) return fn(cfg);
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const NotAFrame& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const NotAContinuousFrame& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const PartitionFailure& e) {
    std::cerr << "certificate failure: " << e.what() << " (best achieved " << num(e.best_achieved) << ")\n";
    return 2;
  } catch (const SamplingFailure& e) {
    std::cerr << "certificate failure: block " << e.block << ", (" << e.inequality << "): " << e.what() << "\n";
    return 2;
  } catch (const DecompositionFailure& e) {
    std::cerr << "certificate failure: " << e.what() << "\n";
    return 2;
  } catch (const DiscretizationFailure& e) {
    std::cerr << "certificate failure: " << e.what() << "\n";
    return 2;
  } catch (const QuadratureFailure& e) {
    std::cerr << "certificate failure: " << e.what() << " (last deltas " << num(e.coarse_delta) << ", "
              << num(e.fine_delta) << ")\n";
    return 2;
  } catch (const UseHeuristic& e) {
    std::cerr << "certificate failure: " << e.what() << "\n";
    return 2;
  } catch (const ResourceLimit& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 1;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
