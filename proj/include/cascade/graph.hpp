#pragma once

#include <cassert>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace cascade {

using NodeId = std::uint32_t;

/// How diffusion traverses the stored edges relative to the input edges.
enum class DirectionMode : std::uint32_t {
  forward = 0,     // input edge (a, b) stored as a -> b
  reverse = 1,     // stored as b -> a
  undirected = 2,  // stored both ways
};

/// Immutable directed graph in offset-compressed form.
///
/// Neighbor lists are sorted and free of duplicates and self-loops. Safe to
/// share across threads once built.
class Graph {
 public:
  Graph() : offsets_{0} {}

  std::uint64_t num_nodes() const noexcept { return offsets_.size() - 1; }
  std::uint64_t num_edges() const noexcept { return neighbors_.size(); }
  DirectionMode direction_mode() const noexcept { return mode_; }

  std::span<const NodeId> neighbors(NodeId v) const noexcept {
    assert(v < num_nodes());
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }

  std::uint64_t degree(NodeId v) const noexcept {
    assert(v < num_nodes());
    return offsets_[v + 1] - offsets_[v];
  }

  std::span<const std::uint64_t> offsets() const noexcept { return offsets_; }
  std::span<const NodeId> neighbor_array() const noexcept { return neighbors_; }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  friend class GraphBuilder;
  friend Graph load_graph(const std::filesystem::path&);

  Graph(std::vector<std::uint64_t> offsets, std::vector<NodeId> neighbors, DirectionMode mode)
      : offsets_(std::move(offsets)), neighbors_(std::move(neighbors)), mode_(mode) {}

  std::vector<std::uint64_t> offsets_;
  std::vector<NodeId> neighbors_;
  DirectionMode mode_ = DirectionMode::forward;
};

/// Accumulates dense-id edges and produces a Graph. Self-loops are dropped
/// and duplicates collapse; the direction mode is applied at build time.
class GraphBuilder {
 public:
  explicit GraphBuilder(DirectionMode mode = DirectionMode::forward, std::uint64_t num_nodes = 0);

  // Makes sure nodes 0..n-1 exist even without incident edges.
  void ensure_nodes(std::uint64_t n);
  void add_edge(NodeId src, NodeId dst);
  void reserve(std::size_t edges) { edges_.reserve(edges); }

  Graph build() &&;

 private:
  DirectionMode mode_;
  std::uint64_t num_nodes_;
  std::vector<std::pair<NodeId, NodeId>> edges_;
};

/// Graph built from arbitrary (sparse) external ids. `external_ids[d]` is the
/// external id of dense node d; ids are assigned in ascending external order.
struct RemappedGraph {
  Graph graph;
  std::vector<std::uint64_t> external_ids;
};

RemappedGraph build_graph(std::span<const std::pair<std::uint64_t, std::uint64_t>> edges,
                          DirectionMode mode = DirectionMode::forward);

Graph generate_star(std::uint64_t leaves);
Graph generate_path(std::uint64_t n);

// Every ordered pair (u, v), u != v, included independently with probability p.
Graph generate_erdos_renyi(std::uint64_t n, double p, std::uint64_t seed);

/// Binary layout, little-endian:
///   "CSCG" | version u32 | num_nodes u64 | num_edges u64 | flags u32 |
///   direction u32 | offsets (num_nodes+1) x u64 | neighbors num_edges x (u32|u64)
/// flags bit 0 selects 64-bit neighbor ids.
inline constexpr std::uint32_t kGraphFormatVersion = 1;
inline constexpr std::uint32_t kGraphFlagWideIds = 1;

void save_graph(const Graph& g, const std::filesystem::path& path, bool wide_ids = false);
Graph load_graph(const std::filesystem::path& path);

/// Text edge list: one "src<TAB>dst" pair of decimal ids per line. Blank lines
/// and lines starting with '#' are ignored.
std::vector<std::pair<std::uint64_t, std::uint64_t>> read_edge_list(const std::filesystem::path& path);

}  // namespace cascade
