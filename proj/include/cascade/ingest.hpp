#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cascade/graph.hpp"
#include "cascade/stats.hpp"

namespace cascade {

/// One interaction: `actor` retweeted, replied to or mentioned each of
/// `targets`, using `hashtags`. Targets and hashtags are sorted and unique;
/// hashtags are case-folded.
struct EventRecord {
  std::int64_t timestamp = 0;  // seconds since the epoch, UTC
  std::string actor;
  std::vector<std::string> targets;
  std::vector<std::string> hashtags;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct ParseOptions {
  bool strict = false;  // throw ParseError instead of skipping malformed lines
};

struct ParsedEvents {
  std::vector<EventRecord> events;
  std::uint64_t malformed = 0;
};

/// Reads `timestamp<TAB>actor<TAB>targets<TAB>hashtags` lines, the last two
/// comma-separated and possibly empty. Blank lines and '#' comments are skipped.
ParsedEvents parse_events(std::istream& in, const ParseOptions& options = {});
ParsedEvents parse_events(std::string_view text, const ParseOptions& options = {});

// Unicode full case folding of a UTF-8 hashtag.
std::string fold_hashtag(std::string_view tag);

/// Retweet graph in influence direction: "A retweeted B" yields B -> A.
/// `ids[d]` is the external id of dense node d; every actor and target gets a
/// node, numbered in ascending byte order of the external id.
struct RetweetEdges {
  std::vector<std::string> ids;
  std::vector<std::pair<NodeId, NodeId>> edges;  // sorted, unique, no self-loops

  Graph to_graph() const;
};

RetweetEdges build_retweet_edges(std::span<const EventRecord> events);

struct TimeRange {
  std::int64_t begin = 0;  // inclusive
  std::int64_t end = 0;    // exclusive

  bool contains(std::int64_t t) const noexcept { return t >= begin && t < end; }
};

inline constexpr std::int64_t kSecondsPerDay = 86'400;

/// Prefix window from the first event through the end of the `fresh_days`-th
/// full UTC day.
TimeRange default_fresh_window(std::span<const EventRecord> events, unsigned fresh_days = 1);

/// popularity (distinct users) -> number of hashtags with that popularity.
struct PopularityDistribution {
  std::map<std::uint64_t, std::uint64_t> counts;
  std::uint64_t total = 0;

  SizeHistogram histogram() const;
};

/// Hashtags used at any time inside `fresh_window` are dropped. Each remaining
/// hashtag's popularity is the number of distinct actors using it at or after
/// the window's end.
PopularityDistribution compute_popularity(std::span<const EventRecord> events, const TimeRange& fresh_window);

/// Full UTC calendar days as day numbers since the epoch; first half to
/// train, second half to test, the odd day to train.
struct DaySplit {
  std::vector<std::int64_t> train;
  std::vector<std::int64_t> test;
};

// Throws DomainError when the events span fewer than two full days.
DaySplit split_days(std::span<const EventRecord> events);

std::vector<EventRecord> events_in_days(std::span<const EventRecord> events, std::span<const std::int64_t> days);

std::string format_day(std::int64_t day);

}  // namespace cascade
