#include "cascade/fit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <tuple>

#include "cascade/error.hpp"
#include "cascade/rng.hpp"

namespace cascade {

std::string_view to_string(FitModel m) {
  switch (m) {
    case FitModel::cgm: return "cgm";
    case FitModel::alpha: return "alpha";
    case FitModel::alpha_k: return "alpha-k";
    case FitModel::multi_exact: return "multi-exact";
    case FitModel::compound: return "compound";
  }
  return "?";
}

std::optional<FitModel> parse_fit_model(std::string_view name) {
  if (name == "cgm") return FitModel::cgm;
  if (name == "alpha") return FitModel::alpha;
  if (name == "alpha-k") return FitModel::alpha_k;
  if (name == "multi-exact") return FitModel::multi_exact;
  if (name == "compound") return FitModel::compound;
  return std::nullopt;
}

bool takes_lambda(FitModel m) { return m == FitModel::multi_exact || m == FitModel::compound; }

void GridSpec::validate(FitModel model) const {
  const auto [alo, ahi] = alpha_range;
  if (!(alo >= 0.0 && ahi <= 1.0 && alo <= ahi)) throw InvalidArgument("alpha range must satisfy 0 <= lo <= hi <= 1");
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidArgument("grid step must be positive");
  if (runs_per_point < 1) throw InvalidArgument("runs_per_point must be >= 1");
  if (takes_lambda(model)) {
    if (!lambda_range) throw InvalidArgument("model " + std::string(to_string(model)) + " needs a lambda range");
    const auto [llo, lhi] = *lambda_range;
    if (!(llo >= 0.0 && llo <= lhi) || !std::isfinite(lhi)) throw InvalidArgument("lambda range must satisfy 0 <= lo <= hi");
  }
  if (refinement_levels > 15) throw InvalidArgument("too many refinement levels");
}

namespace {

constexpr std::uint64_t kNoLambda = ~std::uint64_t{0};

Model simulation_model(FitModel m) {
  switch (m) {
    case FitModel::cgm: return Model::cgm;
    case FitModel::alpha: return Model::alpha;
    case FitModel::alpha_k: return Model::alpha_k;
    case FitModel::multi_exact: return Model::multi_exact;
    case FitModel::compound: return Model::alpha_k;
  }
  return Model::alpha_k;
}

ModelParams model_params(const FitContext& ctx, double alpha) {
  ModelParams p;
  p.alpha = alpha;
  p.max_rounds = ctx.max_rounds;
  p.size_cap = ctx.size_cap;
  if (!p.size_cap && ctx.model == FitModel::alpha) p.size_cap = kDefaultAlphaSizeCap;
  return p;
}

std::uint64_t grid_index_count(double lo, double hi, double step) {
  return static_cast<std::uint64_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

// Simulates one parameter point. The alpha^k table of the compound model
// comes from the batch a one-parameter alpha^k fit would run with
// `table_seed`, so lambda = 0 reproduces that fit exactly.
class PointSimulator {
 public:
  explicit PointSimulator(const FitContext& ctx) : ctx_(ctx) {
    if (!ctx_.graph) throw InvalidArgument("fit needs a graph");
  }

  PointSimulation run(double alpha, std::optional<double> lambda, std::uint64_t runs, std::uint64_t table_seed,
                      std::uint64_t point_seed) {
    PointSimulation out;
    out.runs = runs;
    const bool zero_lambda = !lambda || *lambda == 0.0;
    if (ctx_.model == FitModel::compound) {
      const PropertyTable& table = table_for(alpha, runs, table_seed);
      if (zero_lambda) {
        out.histogram = table.size_marginal();
        return out;
      }
      CompoundOptions options;
      options.lambda = *lambda;
      options.num_runs = runs;
      options.seed = point_seed;
      options.workers = ctx_.workers;
      options.round_cap = ctx_.round_cap;
      auto result = run_compound_batch(table, options);
      out.histogram = std::move(result.histogram);
      out.diverged = result.diverged;
      return out;
    }
    BatchOptions options;
    options.model = simulation_model(ctx_.model);
    options.params = model_params(ctx_, alpha);
    options.lambda = lambda.value_or(0.0);
    options.num_runs = runs;
    options.seed = zero_lambda ? table_seed : point_seed;
    options.workers = ctx_.workers;
    options.collect_properties = false;
    out.histogram = run_batch(*ctx_.graph, options).histogram;
    return out;
  }

 private:
  const PropertyTable& table_for(double alpha, std::uint64_t runs, std::uint64_t seed) {
    const auto key = std::make_tuple(alpha, runs, seed);
    if (cached_ && cached_key_ == key) return *cached_;
    BatchOptions options;
    options.model = Model::alpha_k;
    options.params = model_params(ctx_, alpha);
    options.num_runs = runs;
    options.seed = seed;
    options.workers = ctx_.workers;
    cached_ = std::make_unique<PropertyTable>(PropertyTable::from_counts(run_batch(*ctx_.graph, options).properties));
    cached_key_ = key;
    return *cached_;
  }

  const FitContext& ctx_;
  std::unique_ptr<PropertyTable> cached_;
  std::tuple<double, std::uint64_t, std::uint64_t> cached_key_;
};

bool better(const Evaluation& a, const Evaluation& b) {
  if (a.ks != b.ks) return a.ks < b.ks;
  if (a.alpha != b.alpha) return a.alpha < b.alpha;
  return a.lambda.value_or(0.0) < b.lambda.value_or(0.0);
}

}  // namespace

PointSimulation simulate_point(const FitContext& ctx, double alpha, std::optional<double> lambda, std::uint64_t runs,
                               std::uint64_t seed) {
  if (runs < 1) throw InvalidArgument("runs must be >= 1");
  PointSimulator sim(ctx);
  return sim.run(alpha, lambda, runs, mix_seed(seed, 0, kNoLambda), mix_seed(seed, 0, 0));
}

FitResult search_grid(const GridSpec& spec, bool two_parameter, const PointScorer& score) {
  const auto [alo, ahi] = spec.alpha_range;
  const std::uint64_t na = grid_index_count(alo, ahi, spec.step);
  std::uint64_t nl = 1;
  double llo = 0.0;
  if (two_parameter) {
    if (!spec.lambda_range) throw InvalidArgument("two-parameter search needs a lambda range");
    llo = spec.lambda_range->first;
    nl = grid_index_count(llo, spec.lambda_range->second, spec.step);
  }

  FitResult result;
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::size_t> seen;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> keys;  // grid index of each evaluation
  std::optional<std::size_t> best;

  auto evaluate = [&](std::uint64_t i, std::uint64_t j) {
    if (seen.contains({i, j})) return;
    GridPoint point;
    point.alpha = std::min(ahi, alo + static_cast<double>(i) * spec.step);
    if (two_parameter) point.lambda = std::min(spec.lambda_range->second, llo + static_cast<double>(j) * spec.step);
    point.alpha_index = i;
    point.lambda_index = j;
    Evaluation ev = score(point);
    ev.alpha = point.alpha;
    ev.lambda = point.lambda;
    seen[{i, j}] = result.evaluations.size();
    keys.emplace_back(i, j);
    result.evaluations.push_back(ev);
    if (ev.diverged == 0 && (!best || better(ev, result.evaluations[*best]))) best = result.evaluations.size() - 1;
  };

  auto axis = [](std::uint64_t count, std::uint64_t stride, std::optional<std::uint64_t> center) {
    std::vector<std::uint64_t> idx;
    if (!center) {
      for (std::uint64_t k = 0; k < count; k += stride) idx.push_back(k);
      if (idx.back() != count - 1) idx.push_back(count - 1);
      return idx;
    }
    const auto c = static_cast<std::int64_t>(*center);
    const auto s = static_cast<std::int64_t>(stride);
    for (std::int64_t m = -10; m <= 10; ++m) {
      const std::int64_t k = c + m * s;
      if (k >= 0 && k < static_cast<std::int64_t>(count)) idx.push_back(static_cast<std::uint64_t>(k));
    }
    return idx;
  };

  std::uint64_t stride = 1;
  for (unsigned l = 0; l < spec.refinement_levels; ++l) stride *= 10;

  // Alpha-major order so consecutive lambda points share a property table.
  for (int level = static_cast<int>(spec.refinement_levels);; --level) {
    std::optional<std::uint64_t> ci, cj;
    if (level != static_cast<int>(spec.refinement_levels) && best) {
      ci = keys[*best].first;
      cj = keys[*best].second;
    }
    const auto is = axis(na, stride, ci);
    const auto js = two_parameter ? axis(nl, stride, cj) : std::vector<std::uint64_t>{0};
    for (auto i : is)
      for (auto j : js) evaluate(i, j);
    result.level_best_ks.push_back(best ? result.evaluations[*best].ks : 1.0);
    if (level == 0) break;
    stride /= 10;
  }

  if (!best) throw DomainError("every grid point diverged");
  const auto& b = result.evaluations[*best];
  result.best_alpha = b.alpha;
  result.best_lambda = b.lambda;
  result.best_ks = b.ks;
  return result;
}

FitResult grid_search(const FitContext& ctx, const SizeHistogram& target, const GridSpec& spec, std::uint64_t seed) {
  spec.validate(ctx.model);
  if (target.empty()) throw DomainError("fit target histogram is empty");
  const Cdf target_cdf = to_cdf(target);
  PointSimulator sim(ctx);
  return search_grid(spec, takes_lambda(ctx.model), [&](const GridPoint& p) {
    const auto point = sim.run(p.alpha, p.lambda, spec.runs_per_point, mix_seed(seed, p.alpha_index, kNoLambda),
                               mix_seed(seed, p.alpha_index, p.lambda_index));
    Evaluation ev;
    ev.runs = point.runs;
    ev.diverged = point.diverged;
    if (point.diverged == 0 && !point.histogram.empty()) ev.ks = ks_statistic(to_cdf(point.histogram), target_cdf).statistic;
    return ev;
  });
}

ValidationReport validate(const FitContext& ctx, const FitResult& train_fit, const SizeHistogram& test_target,
                          std::uint64_t runs, std::uint64_t seed) {
  if (test_target.empty()) throw DomainError("validation target histogram is empty");
  const auto point = simulate_point(ctx, train_fit.best_alpha, train_fit.best_lambda, runs, seed);
  if (point.histogram.empty()) throw DomainError("every validation run diverged");
  ValidationReport report;
  report.alpha = train_fit.best_alpha;
  report.lambda = train_fit.best_lambda;
  report.train_ks = train_fit.best_ks;
  report.test_ks = ks_statistic(point.histogram, test_target).statistic;
  report.difference = std::fabs(report.test_ks - report.train_ks);
  return report;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string format_fit_summary(const FitResult& result) {
  return "best alpha=" + num(result.best_alpha) + " lambda=" + (result.best_lambda ? num(*result.best_lambda) : "-") +
         " ks=" + num(result.best_ks);
}

std::string format_fit_report(const FitResult& result) {
  std::string out = "# alpha\tlambda\tks\truns\tdiverged\n";
  for (const auto& ev : result.evaluations) {
    out += num(ev.alpha) + '\t' + (ev.lambda ? num(*ev.lambda) : "-") + '\t' + num(ev.ks) + '\t' +
           std::to_string(ev.runs) + '\t' + std::to_string(ev.diverged) + '\n';
  }
  out += "# " + format_fit_summary(result) + '\n';
  return out;
}

}  // namespace cascade
