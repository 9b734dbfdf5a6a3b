#include "cascade/diffusion.hpp"

#include <algorithm>
#include <unordered_map>

#include "cascade/error.hpp"
#include "cascade/parallel.hpp"
#include "cascade/poisson.hpp"

namespace cascade {

std::string_view to_string(Model m) {
  switch (m) {
    case Model::cgm: return "cgm";
    case Model::alpha: return "alpha";
    case Model::alpha_k: return "alpha-k";
    case Model::multi_exact: return "multi-exact";
  }
  return "?";
}

std::optional<Model> parse_model(std::string_view name) {
  if (name == "cgm") return Model::cgm;
  if (name == "alpha") return Model::alpha;
  if (name == "alpha-k") return Model::alpha_k;
  if (name == "multi-exact") return Model::multi_exact;
  return std::nullopt;
}

void ModelParams::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must be in [0, 1]");
  if (max_rounds < 1) throw InvalidArgument("max_rounds must be >= 1");
  if (size_cap && *size_cap < 1) throw InvalidArgument("size_cap must be >= 1");
}

Simulator::Simulator(const Graph& g) : graph_(&g), stamp_(g.num_nodes(), 0) {}

void Simulator::begin_run() {
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
}

double Simulator::spread_probability(const ModelParams& params, bool exponential, std::uint32_t depth) {
  if (!exponential) return params.alpha;
  if (powers_alpha_ != params.alpha) {
    powers_alpha_ = params.alpha;
    powers_.assign(1, 1.0);
  }
  while (powers_.size() <= depth) {
    const double next = powers_.back() * params.alpha;
    powers_.push_back(next);
    if (next == 0.0) break;
  }
  return depth < powers_.size() ? powers_[depth] : 0.0;
}

CascadeOutcome Simulator::cgm(const ModelParams& params, NodeId start, RngStream& rng) {
  assert(start < graph_->num_nodes());
  begin_run();
  inform(start);
  CascadeOutcome out{1, 1, 0, false};
  const std::uint64_t cap = params.size_cap.value_or(0);
  if (cap == 1) {
    out.truncated = true;
    return out;
  }
  cgm_frontier_.assign(1, start);
  for (std::uint64_t round = 1; !cgm_frontier_.empty(); ++round) {
    if (round > params.max_rounds) {
      out.truncated = has_uninformed_neighbor(cgm_frontier_, [](NodeId u) { return u; });
      break;
    }
    cgm_next_.clear();
    for (const NodeId u : cgm_frontier_) {
      for (const NodeId v : graph_->neighbors(u)) {
        if (is_informed(v) || !rng.bernoulli(params.alpha)) continue;
        inform(v);
        cgm_next_.push_back(v);
        if (++out.informed >= cap && cap != 0) {
          out.spreaders = out.informed;
          out.rounds = round;
          out.truncated = true;
          return out;
        }
      }
    }
    if (cgm_next_.empty()) break;
    out.rounds = round;
    std::swap(cgm_frontier_, cgm_next_);
  }
  out.spreaders = out.informed;
  return out;
}

template <typename Decide>
CascadeOutcome Simulator::alpha_family(const ModelParams& params, bool exponential, double lambda, NodeId start,
                                       RngStream* rng, Decide&& decide, std::vector<NodeId>* spreaders_out) {
  assert(start < graph_->num_nodes());
  begin_run();
  inform(start);
  if (spreaders_out) spreaders_out->push_back(start);
  CascadeOutcome out{1, 1, 0, false};
  const std::uint64_t cap = params.size_cap.value_or(0);
  if (cap == 1) {
    out.truncated = true;
    return out;
  }
  const std::uint64_t n = graph_->num_nodes();

  frontier_.assign(1, Frontier{start, 0});
  for (std::uint64_t round = 1; !frontier_.empty(); ++round) {
    if (round > params.max_rounds) {
      out.truncated = has_uninformed_neighbor(frontier_, [](const Frontier& f) { return f.node; });
      break;
    }
    next_.clear();
    bool any_new = false;
    for (const auto [u, depth] : frontier_) {
      for (const NodeId v : graph_->neighbors(u)) {
        if (!inform(v)) continue;
        ++out.informed;
        any_new = true;
        if (!decide(v, spread_probability(params, exponential, depth + 1))) continue;
        ++out.spreaders;
        if (spreaders_out) spreaders_out->push_back(v);
        next_.push_back(Frontier{v, depth + 1});
        if (cap != 0 && out.spreaders >= cap) {
          out.rounds = round;
          out.truncated = true;
          return out;
        }
      }
    }
    if (!any_new) break;
    out.rounds = round;
    if (lambda > 0.0) {
      const std::uint64_t injected = sample_poisson(lambda, *rng);
      for (std::uint64_t i = 0; i < injected; ++i) {
        const auto source = static_cast<NodeId>(rng->below(n));
        if (!inform(source)) continue;
        ++out.informed;
        ++out.spreaders;
        if (spreaders_out) spreaders_out->push_back(source);
        next_.push_back(Frontier{source, 0});
        if (cap != 0 && out.spreaders >= cap) {
          out.truncated = true;
          return out;
        }
      }
    }
    std::swap(frontier_, next_);
  }
  return out;
}

CascadeOutcome Simulator::alpha(const ModelParams& params, NodeId start, RngStream& rng) {
  return alpha_family(params, false, 0.0, start, &rng, [&rng](NodeId, double p) { return rng.bernoulli(p); }, nullptr);
}

CascadeOutcome Simulator::alpha_k(const ModelParams& params, NodeId start, RngStream& rng) {
  return alpha_family(params, true, 0.0, start, &rng, [&rng](NodeId, double p) { return rng.bernoulli(p); }, nullptr);
}

CascadeOutcome Simulator::multi_source(const ModelParams& params, double lambda, NodeId start, RngStream& rng) {
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
  return alpha_family(params, true, lambda, start, &rng, [&rng](NodeId, double p) { return rng.bernoulli(p); },
                      nullptr);
}

CascadeOutcome Simulator::run(Model model, const ModelParams& params, double lambda, NodeId start, RngStream& rng) {
  switch (model) {
    case Model::cgm: return cgm(params, start, rng);
    case Model::alpha: return alpha(params, start, rng);
    case Model::alpha_k: return alpha_k(params, start, rng);
    case Model::multi_exact: return multi_source(params, lambda, start, rng);
  }
  throw InvalidArgument("unknown model");
}

CascadeOutcome Simulator::coupled(const ModelParams& params, bool exponential, NodeId start,
                                  std::span<const double> uniforms, std::vector<NodeId>* spreaders_out) {
  if (uniforms.size() != graph_->num_nodes()) throw InvalidArgument("need one uniform per node");
  return alpha_family(params, exponential, 0.0, start, nullptr,
                      [uniforms](NodeId v, double p) { return uniforms[v] < p; }, spreaders_out);
}

CascadeOutcome simulate_cgm(const Graph& g, const ModelParams& params, NodeId start, RngStream& rng) {
  params.validate();
  return Simulator(g).cgm(params, start, rng);
}

CascadeOutcome simulate_alpha(const Graph& g, const ModelParams& params, NodeId start, RngStream& rng) {
  params.validate();
  return Simulator(g).alpha(params, start, rng);
}

CascadeOutcome simulate_alpha_k(const Graph& g, const ModelParams& params, NodeId start, RngStream& rng) {
  params.validate();
  return Simulator(g).alpha_k(params, start, rng);
}

CascadeOutcome simulate_multi_source_exact(const Graph& g, const ModelParams& params, double lambda, NodeId start,
                                           RngStream& rng) {
  params.validate();
  return Simulator(g).multi_source(params, lambda, start, rng);
}

namespace {

constexpr std::uint64_t kRunChunk = 4096;

struct WorkerTally {
  std::vector<std::uint64_t> sizes;  // sizes[s] = count
  std::unordered_map<std::uint64_t, std::unordered_map<std::uint64_t, std::uint64_t>> properties;
  std::uint64_t truncated = 0;
};

}  // namespace

BatchResult run_batch(const Graph& g, const BatchOptions& options) {
  options.params.validate();
  if (options.num_runs < 1) throw InvalidArgument("num_runs must be >= 1");
  if (g.num_nodes() == 0) throw InvalidArgument("cannot simulate on an empty graph");
  if (options.start && *options.start >= g.num_nodes()) throw InvalidArgument("start node out of range");
  if (!(options.lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");

  const unsigned workers = std::max(1u, options.workers);
  std::vector<WorkerTally> tallies(workers);
  std::vector<std::optional<Simulator>> sims(workers);

  for_each_chunk(options.num_runs, workers, kRunChunk, [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
    if (!sims[w]) sims[w].emplace(g);
    auto& sim = *sims[w];
    auto& tally = tallies[w];
    for (std::uint64_t i = begin; i < end; ++i) {
      RngStream rng(options.seed, i);
      const NodeId start = options.start ? *options.start : static_cast<NodeId>(rng.below(g.num_nodes()));
      const auto out = sim.run(options.model, options.params, options.lambda, start, rng);
      const auto size = out.size();
      if (size >= tally.sizes.size()) tally.sizes.resize(std::max<std::uint64_t>(size + 1, tally.sizes.size() * 2), 0);
      ++tally.sizes[size];
      if (options.collect_properties) ++tally.properties[size][out.rounds];
      if (out.truncated) ++tally.truncated;
    }
  });

  BatchResult result;
  result.runs = options.num_runs;
  for (const auto& tally : tallies) {
    for (std::uint64_t s = 1; s < tally.sizes.size(); ++s)
      if (tally.sizes[s] != 0) result.histogram.add(s, tally.sizes[s]);
    for (const auto& [size, by_rounds] : tally.properties)
      for (const auto& [rounds, count] : by_rounds) result.properties[{size, rounds}] += count;
    result.truncated += tally.truncated;
  }
  return result;
}

}  // namespace cascade
