#include "cascade/graph.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "cascade/error.hpp"
#include "cascade/io.hpp"
#include "cascade/rng.hpp"

namespace cascade {

GraphBuilder::GraphBuilder(DirectionMode mode, std::uint64_t num_nodes)
    : mode_(mode), num_nodes_(num_nodes) {}

void GraphBuilder::ensure_nodes(std::uint64_t n) {
  if (n > std::numeric_limits<NodeId>::max()) throw InvalidArgument("graph too large for 32-bit node ids");
  num_nodes_ = std::max(num_nodes_, n);
}

void GraphBuilder::add_edge(NodeId src, NodeId dst) {
  ensure_nodes(static_cast<std::uint64_t>(std::max(src, dst)) + 1);
  if (src == dst) return;
  switch (mode_) {
    case DirectionMode::forward:
      edges_.emplace_back(src, dst);
      break;
    case DirectionMode::reverse:
      edges_.emplace_back(dst, src);
      break;
    case DirectionMode::undirected:
      edges_.emplace_back(src, dst);
      edges_.emplace_back(dst, src);
      break;
  }
}

Graph GraphBuilder::build() && {
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

  std::vector<std::uint64_t> offsets(num_nodes_ + 1, 0);
  for (const auto& [src, dst] : edges_) ++offsets[src + 1];
  for (std::uint64_t v = 0; v < num_nodes_; ++v) offsets[v + 1] += offsets[v];

  std::vector<NodeId> neighbors;
  neighbors.reserve(edges_.size());
  for (const auto& e : edges_) neighbors.push_back(e.second);
  edges_.clear();
  edges_.shrink_to_fit();
  return Graph(std::move(offsets), std::move(neighbors), mode_);
}

RemappedGraph build_graph(std::span<const std::pair<std::uint64_t, std::uint64_t>> edges, DirectionMode mode) {
  std::vector<std::uint64_t> ids;
  ids.reserve(edges.size() * 2);
  for (const auto& [a, b] : edges) {
    ids.push_back(a);
    ids.push_back(b);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  auto dense = [&ids](std::uint64_t external) {
    return static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), external) - ids.begin());
  };

  GraphBuilder builder(mode, ids.size());
  builder.reserve(mode == DirectionMode::undirected ? edges.size() * 2 : edges.size());
  for (const auto& [a, b] : edges) builder.add_edge(dense(a), dense(b));
  return {std::move(builder).build(), std::move(ids)};
}

Graph generate_star(std::uint64_t leaves) {
  GraphBuilder builder(DirectionMode::forward, leaves + 1);
  for (std::uint64_t leaf = 1; leaf <= leaves; ++leaf) builder.add_edge(0, static_cast<NodeId>(leaf));
  return std::move(builder).build();
}

Graph generate_path(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("path needs at least one node");
  GraphBuilder builder(DirectionMode::forward, n);
  for (std::uint64_t i = 0; i + 1 < n; ++i) builder.add_edge(static_cast<NodeId>(i), static_cast<NodeId>(i + 1));
  return std::move(builder).build();
}

Graph generate_erdos_renyi(std::uint64_t n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("edge probability must be in [0, 1]");
  GraphBuilder builder(DirectionMode::forward, n);
  if (n < 2 || p == 0.0) return std::move(builder).build();

  // Ordered pairs without self-loops, indexed 0 .. n(n-1)-1: slot s is
  // (s / (n-1), s % (n-1)) with the target shifted past the source. Skipping
  // ahead by geometric gaps visits each slot independently with probability p.
  RngStream rng(seed);
  const std::uint64_t slots = n * (n - 1);
  if (p == 1.0) {
    for (std::uint64_t s = 0; s < slots; ++s) {
      const auto u = static_cast<NodeId>(s / (n - 1));
      auto v = static_cast<NodeId>(s % (n - 1));
      if (v >= u) ++v;
      builder.add_edge(u, v);
    }
    return std::move(builder).build();
  }
  builder.reserve(static_cast<std::size_t>(static_cast<double>(slots) * p * 1.1) + 16);
  const double log_q = std::log1p(-p);
  std::uint64_t s = 0;
  for (;;) {
    const double u = 1.0 - rng.uniform();  // (0, 1]
    const double gap = std::floor(std::log(u) / log_q);
    if (gap >= static_cast<double>(slots - s)) break;
    s += static_cast<std::uint64_t>(gap);
    const auto src = static_cast<NodeId>(s / (n - 1));
    auto dst = static_cast<NodeId>(s % (n - 1));
    if (dst >= src) ++dst;
    builder.add_edge(src, dst);
    if (++s >= slots) break;
  }
  return std::move(builder).build();
}

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes;
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  template <typename T>
  T get(const char* what) {
    if (data_.size() - pos_ < sizeof(T)) throw FormatError(std::string("truncated graph file reading ") + what, pos_);
    std::uint64_t value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      value |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(value);
  }

  void expect_bytes(std::string_view bytes, const char* what) {
    if (data_.compare(pos_, bytes.size(), bytes) != 0) throw FormatError(std::string("bad ") + what, pos_);
    pos_ += bytes.size();
  }

  std::uint64_t pos() const { return pos_; }
  std::uint64_t remaining() const { return data_.size() - pos_; }

 private:
  std::string data_;
  std::uint64_t pos_ = 0;
};

}  // namespace

void save_graph(const Graph& g, const std::filesystem::path& path, bool wide_ids) {
  io::AtomicFile file(path, /*binary=*/true);
  auto& out = file.stream();
  out.write("CSCG", 4);
  put_le<std::uint32_t>(out, kGraphFormatVersion);
  put_le<std::uint64_t>(out, g.num_nodes());
  put_le<std::uint64_t>(out, g.num_edges());
  put_le<std::uint32_t>(out, wide_ids ? kGraphFlagWideIds : 0);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.direction_mode()));
  for (auto off : g.offsets()) put_le<std::uint64_t>(out, off);
  for (auto v : g.neighbor_array()) {
    if (wide_ids)
      put_le<std::uint64_t>(out, v);
    else
      put_le<std::uint32_t>(out, v);
  }
  file.commit();
}

Graph load_graph(const std::filesystem::path& path) {
  Reader in(io::read_text(path));
  in.expect_bytes("CSCG", "magic");
  const auto version_at = in.pos();
  const auto version = in.get<std::uint32_t>("version");
  if (version != kGraphFormatVersion) throw FormatError("unsupported graph format version " + std::to_string(version), version_at);
  const auto num_nodes = in.get<std::uint64_t>("num_nodes");
  const auto num_edges = in.get<std::uint64_t>("num_edges");
  const auto flags_at = in.pos();
  const auto flags = in.get<std::uint32_t>("flags");
  if (flags & ~kGraphFlagWideIds) throw FormatError("unknown graph flags", flags_at);
  const auto mode_at = in.pos();
  const auto mode = in.get<std::uint32_t>("direction mode");
  if (mode > 2) throw FormatError("unknown direction mode", mode_at);
  if (num_nodes > std::numeric_limits<NodeId>::max()) throw FormatError("node count exceeds 32-bit ids", 8);

  const std::uint64_t id_width = (flags & kGraphFlagWideIds) ? 8 : 4;
  const unsigned __int128 need = static_cast<unsigned __int128>(num_nodes + 1) * 8 +
                                 static_cast<unsigned __int128>(num_edges) * id_width;
  if (need > in.remaining()) throw FormatError("truncated graph file", in.pos());
  if (need < in.remaining()) throw FormatError("trailing bytes after graph data", in.pos() + static_cast<std::uint64_t>(need));

  std::vector<std::uint64_t> offsets(num_nodes + 1);
  for (std::uint64_t i = 0; i <= num_nodes; ++i) {
    const auto at = in.pos();
    offsets[i] = in.get<std::uint64_t>("offsets");
    if ((i == 0 && offsets[i] != 0) || (i > 0 && offsets[i] < offsets[i - 1]) || offsets[i] > num_edges)
      throw FormatError("invalid offset array", at);
  }
  if (offsets.back() != num_edges) throw FormatError("last offset does not equal edge count", in.pos() - 8);

  std::vector<NodeId> neighbors(num_edges);
  std::uint64_t src = 0;
  for (std::uint64_t e = 0; e < num_edges; ++e) {
    const auto at = in.pos();
    const std::uint64_t v = id_width == 8 ? in.get<std::uint64_t>("neighbors") : in.get<std::uint32_t>("neighbors");
    while (offsets[src + 1] <= e) ++src;
    if (v >= num_nodes || v == src || (e > offsets[src] && v <= neighbors[e - 1]))
      throw FormatError("invalid neighbor entry", at);
    neighbors[e] = static_cast<NodeId>(v);
  }
  return Graph(std::move(offsets), std::move(neighbors), static_cast<DirectionMode>(mode));
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> read_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
  std::string line;
  std::uint64_t lineno = 0;
  auto parse = [&](std::string_view field) {
    std::uint64_t value = 0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc() || ptr != end) throw ParseError("expected a decimal node id, got '" + std::string(field) + "'", lineno);
    return value;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = io::split(line, '\t');
    if (fields.size() != 2) throw ParseError("expected src<TAB>dst", lineno);
    edges.emplace_back(parse(fields[0]), parse(fields[1]));
  }
  if (in.bad()) throw IoError("read failed for " + path.string());
  return edges;
}

}  // namespace cascade
