#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "cascade/graph.hpp"
#include "cascade/rng.hpp"
#include "cascade/stats.hpp"

namespace cascade {

enum class Model {
  cgm,          // independent per-edge decisions; size = informed nodes
  alpha,        // one all-or-nothing decision per informed node
  alpha_k,      // as alpha, spreading probability alpha^k in round k
  multi_exact,  // alpha_k plus Poisson(lambda) injected sources per round, shared informed set
};

std::string_view to_string(Model m);
std::optional<Model> parse_model(std::string_view name);

struct ModelParams {
  double alpha = 0.0;
  std::uint64_t max_rounds = 10'000;
  std::optional<std::uint64_t> size_cap;

  // Throws InvalidArgument unless 0 <= alpha <= 1, max_rounds >= 1, size_cap >= 1.
  void validate() const;
};

/// Default size cap for model-alpha batches: the empirical tail beyond 1000
/// carries under 0.001 probability, so truncation leaves K-S unchanged.
inline constexpr std::uint64_t kDefaultAlphaSizeCap = 1000;

struct CascadeOutcome {
  std::uint64_t spreaders = 0;
  std::uint64_t informed = 0;
  std::uint64_t rounds = 0;
  bool truncated = false;

  std::uint64_t size() const noexcept { return spreaders; }
  friend bool operator==(const CascadeOutcome&, const CascadeOutcome&) = default;
};

/// Per-worker simulation state over one graph.
///
/// Visited marks are epoch stamps so a run costs nothing to reset. A
/// Simulator is cheap to reuse and must not be shared between threads.
class Simulator {
 public:
  explicit Simulator(const Graph& g);

  const Graph& graph() const noexcept { return *graph_; }

  CascadeOutcome cgm(const ModelParams& params, NodeId start, RngStream& rng);
  CascadeOutcome alpha(const ModelParams& params, NodeId start, RngStream& rng);
  CascadeOutcome alpha_k(const ModelParams& params, NodeId start, RngStream& rng);
  CascadeOutcome multi_source(const ModelParams& params, double lambda, NodeId start, RngStream& rng);

  CascadeOutcome run(Model model, const ModelParams& params, double lambda, NodeId start, RngStream& rng);

  /// Alpha-family run where node v spreads iff uniforms[v] < p, p being
  /// alpha (or alpha^k when `exponential`). Lets callers couple runs at
  /// different alphas on identical randomness. Spreaders are appended to
  /// `spreaders_out` when given.
  CascadeOutcome coupled(const ModelParams& params, bool exponential, NodeId start,
                         std::span<const double> uniforms, std::vector<NodeId>* spreaders_out = nullptr);

 private:
  struct Frontier {
    NodeId node;
    std::uint32_t depth;  // rounds since this node's own source
  };

  template <typename Decide>
  CascadeOutcome alpha_family(const ModelParams& params, bool exponential, double lambda, NodeId start,
                              RngStream* rng, Decide&& decide, std::vector<NodeId>* spreaders_out);

  void begin_run();
  bool is_informed(NodeId v) const noexcept { return stamp_[v] == epoch_; }
  bool inform(NodeId v) noexcept {
    if (stamp_[v] == epoch_) return false;
    stamp_[v] = epoch_;
    return true;
  }
  // Whether the round after the cap would have informed anyone.
  template <typename Range, typename NodeOf>
  bool has_uninformed_neighbor(const Range& frontier, NodeOf node_of) const {
    for (const auto& f : frontier)
      for (const NodeId v : graph_->neighbors(node_of(f)))
        if (!is_informed(v)) return true;
    return false;
  }
  double spread_probability(const ModelParams& params, bool exponential, std::uint32_t depth);

  const Graph* graph_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<Frontier> frontier_;
  std::vector<Frontier> next_;
  std::vector<NodeId> cgm_frontier_;
  std::vector<NodeId> cgm_next_;
  double powers_alpha_ = -1.0;
  std::vector<double> powers_;  // powers_[k] = alpha^k
};

// Convenience single runs; each allocates a fresh Simulator.
CascadeOutcome simulate_cgm(const Graph& g, const ModelParams& params, NodeId start, RngStream& rng);
CascadeOutcome simulate_alpha(const Graph& g, const ModelParams& params, NodeId start, RngStream& rng);
CascadeOutcome simulate_alpha_k(const Graph& g, const ModelParams& params, NodeId start, RngStream& rng);
CascadeOutcome simulate_multi_source_exact(const Graph& g, const ModelParams& params, double lambda, NodeId start,
                                           RngStream& rng);

/// Joint counts of (size, rounds) over simulated cascades; the raw material
/// of a PropertyTable.
using PropertyCounts = std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t>;

struct BatchOptions {
  Model model = Model::alpha_k;
  ModelParams params;
  double lambda = 0.0;
  std::uint64_t num_runs = 1;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::optional<NodeId> start;  // fixed start node instead of a uniform draw
  bool collect_properties = true;
};

struct BatchResult {
  SizeHistogram histogram;
  PropertyCounts properties;
  std::uint64_t runs = 0;
  std::uint64_t truncated = 0;
};

/// Run i draws everything, the start node included, from RngStream(seed, i),
/// so output is identical for any worker count.
BatchResult run_batch(const Graph& g, const BatchOptions& options);

}  // namespace cascade
