#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cascade/compound.hpp"
#include "cascade/diffusion.hpp"
#include "cascade/graph.hpp"
#include "cascade/stats.hpp"

namespace cascade {

enum class FitModel {
  cgm,
  alpha,
  alpha_k,
  multi_exact,  // graph-level multi-source simulation at every (alpha, lambda)
  compound,     // alpha^k property table per alpha, then the compound sampler per lambda
};

std::string_view to_string(FitModel m);
std::optional<FitModel> parse_fit_model(std::string_view name);
bool takes_lambda(FitModel m);

struct GridSpec {
  std::pair<double, double> alpha_range{0.0, 1.0};
  std::optional<std::pair<double, double>> lambda_range;  // required for two-parameter models
  double step = 1e-4;
  std::uint64_t runs_per_point = 1'000'000;
  // Coarse pass at step * 10^levels, each level refining around the
  // incumbent. Zero is a flat sweep of the whole grid at `step`.
  unsigned refinement_levels = 3;

  void validate(FitModel model) const;
};

struct FitContext {
  const Graph* graph = nullptr;
  FitModel model = FitModel::alpha_k;
  std::uint64_t max_rounds = 10'000;
  std::optional<std::uint64_t> size_cap;  // unset: kDefaultAlphaSizeCap for model alpha, none otherwise
  std::uint64_t round_cap = kDefaultRoundCap;
  unsigned workers = 1;
};

struct Evaluation {
  double alpha = 0.0;
  std::optional<double> lambda;
  double ks = 1.0;
  std::uint64_t runs = 0;
  std::uint64_t diverged = 0;  // runs that hit the round cap; point is skipped when nonzero
};

struct FitResult {
  double best_alpha = 0.0;
  std::optional<double> best_lambda;
  double best_ks = 1.0;
  std::vector<Evaluation> evaluations;  // in evaluation order
  std::vector<double> level_best_ks;    // incumbent K-S after each level, coarsest first
};

/// Simulated size distribution of one parameter point. Runs use seeds derived
/// from (seed, alpha index, lambda index) so a point's value does not depend
/// on which level of the search reached it.
struct PointSimulation {
  SizeHistogram histogram;
  std::uint64_t runs = 0;
  std::uint64_t diverged = 0;
};

struct GridPoint {
  double alpha = 0.0;
  std::optional<double> lambda;
  std::uint64_t alpha_index = 0;
  std::uint64_t lambda_index = 0;
};

// Returns ks/runs/diverged for a point; alpha and lambda are filled in by the search.
using PointScorer = std::function<Evaluation(const GridPoint&)>;

/// The search driver behind grid_search, independent of how points are
/// scored. Grid indices count `step`s from the low end of each range; the
/// coarse pass visits every 10^levels-th index, each finer level the 21
/// indices per axis centred on the incumbent.
FitResult search_grid(const GridSpec& spec, bool two_parameter, const PointScorer& score);

/// Grid search minimizing K-S against `target`. Ties go to the smaller alpha,
/// then the smaller lambda. Throws DomainError when every point diverged.
FitResult grid_search(const FitContext& ctx, const SizeHistogram& target, const GridSpec& spec, std::uint64_t seed);

struct ValidationReport {
  double alpha = 0.0;
  std::optional<double> lambda;
  double train_ks = 0.0;
  double test_ks = 0.0;
  double difference = 0.0;  // |test_ks - train_ks|
};

/// Re-simulates at the fitted parameters and compares against held-out data.
ValidationReport validate(const FitContext& ctx, const FitResult& train_fit, const SizeHistogram& test_target,
                          std::uint64_t runs, std::uint64_t seed);

/// One-shot simulation at explicit parameters, with the same semantics a grid
/// point uses.
PointSimulation simulate_point(const FitContext& ctx, double alpha, std::optional<double> lambda, std::uint64_t runs,
                               std::uint64_t seed);

/// Fit report: "alpha<TAB>lambda<TAB>ks<TAB>runs<TAB>diverged" rows followed
/// by a "# best alpha=... lambda=... ks=..." summary.
std::string format_fit_report(const FitResult& result);
std::string format_fit_summary(const FitResult& result);

}  // namespace cascade
