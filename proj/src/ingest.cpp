#include "cascade/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <istream>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "cascade/error.hpp"
#include "cascade/io.hpp"

namespace cascade {

namespace {

std::vector<std::string> split_set(std::string_view field, bool fold) {
  std::vector<std::string> out;
  if (field.empty()) return out;
  for (auto item : io::split(field, ',')) {
    if (item.empty()) continue;
    out.push_back(fold ? fold_hashtag(item) : std::string(item));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Empty string on success, otherwise the reason the line is malformed.
std::string parse_line(std::string_view line, EventRecord& out) {
  const auto fields = io::split(line, '\t');
  if (fields.size() != 4) return "expected 4 tab-separated fields, got " + std::to_string(fields.size());
  std::int64_t ts = 0;
  const auto* end = fields[0].data() + fields[0].size();
  auto [ptr, ec] = std::from_chars(fields[0].data(), end, ts);
  if (ec != std::errc() || ptr != end || ts < 0) return "timestamp must be a non-negative integer";
  if (fields[1].empty()) return "empty actor";
  out.timestamp = ts;
  out.actor = std::string(fields[1]);
  out.targets = split_set(fields[2], false);
  out.hashtags = split_set(fields[3], true);
  return {};
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) { return a / b - ((a % b != 0) && ((a < 0) != (b < 0))); }

}  // namespace

std::string fold_hashtag(std::string_view tag) {
  std::string out;
  icu::UnicodeString::fromUTF8(icu::StringPiece(tag.data(), static_cast<std::int32_t>(tag.size())))
      .foldCase(U_FOLD_CASE_DEFAULT)
      .toUTF8String(out);
  return out;
}

ParsedEvents parse_events(std::istream& in, const ParseOptions& options) {
  ParsedEvents parsed;
  std::string line;
  std::uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    EventRecord record;
    if (auto err = parse_line(line, record); !err.empty()) {
      if (options.strict) throw ParseError(err, lineno);
      ++parsed.malformed;
      continue;
    }
    parsed.events.push_back(std::move(record));
  }
  if (in.bad()) throw IoError("read failed while parsing events");
  return parsed;
}

ParsedEvents parse_events(std::string_view text, const ParseOptions& options) {
  std::istringstream in{std::string(text)};
  return parse_events(in, options);
}

Graph RetweetEdges::to_graph() const {
  GraphBuilder builder(DirectionMode::forward, ids.size());
  builder.reserve(edges.size());
  for (const auto& [src, dst] : edges) builder.add_edge(src, dst);
  return std::move(builder).build();
}

RetweetEdges build_retweet_edges(std::span<const EventRecord> events) {
  RetweetEdges out;
  for (const auto& e : events) {
    out.ids.push_back(e.actor);
    out.ids.insert(out.ids.end(), e.targets.begin(), e.targets.end());
  }
  std::sort(out.ids.begin(), out.ids.end());
  out.ids.erase(std::unique(out.ids.begin(), out.ids.end()), out.ids.end());
  if (out.ids.size() > std::numeric_limits<NodeId>::max()) throw DomainError("too many users for 32-bit node ids");

  std::unordered_map<std::string_view, NodeId> dense;
  dense.reserve(out.ids.size());
  for (std::size_t i = 0; i < out.ids.size(); ++i) dense.emplace(out.ids[i], static_cast<NodeId>(i));

  for (const auto& e : events) {
    const NodeId actor = dense.at(e.actor);
    for (const auto& t : e.targets) {
      const NodeId target = dense.at(t);
      if (target != actor) out.edges.emplace_back(target, actor);
    }
  }
  std::sort(out.edges.begin(), out.edges.end());
  out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());
  return out;
}

TimeRange default_fresh_window(std::span<const EventRecord> events, unsigned fresh_days) {
  if (events.empty()) return {};
  std::int64_t first = std::numeric_limits<std::int64_t>::max();
  for (const auto& e : events) first = std::min(first, e.timestamp);
  const std::int64_t first_full_day = floor_div(first + kSecondsPerDay - 1, kSecondsPerDay);
  return {first, (first_full_day + fresh_days) * kSecondsPerDay};
}

SizeHistogram PopularityDistribution::histogram() const {
  SizeHistogram h;
  for (const auto& [popularity, count] : counts) h.add(popularity, count);
  return h;
}

PopularityDistribution compute_popularity(std::span<const EventRecord> events, const TimeRange& fresh_window) {
  std::unordered_set<std::string_view> stale;
  for (const auto& e : events)
    if (fresh_window.contains(e.timestamp))
      for (const auto& tag : e.hashtags) stale.insert(tag);

  std::unordered_map<std::string_view, std::unordered_set<std::string_view>> users;
  for (const auto& e : events) {
    if (e.timestamp < fresh_window.end) continue;
    for (const auto& tag : e.hashtags)
      if (!stale.contains(tag)) users[tag].insert(e.actor);
  }

  PopularityDistribution dist;
  for (const auto& [tag, actors] : users) {
    ++dist.counts[actors.size()];
    ++dist.total;
  }
  return dist;
}

DaySplit split_days(std::span<const EventRecord> events) {
  if (events.empty()) throw DomainError("no events to split");
  std::int64_t lo = std::numeric_limits<std::int64_t>::max();
  std::int64_t hi = std::numeric_limits<std::int64_t>::min();
  for (const auto& e : events) {
    lo = std::min(lo, e.timestamp);
    hi = std::max(hi, e.timestamp);
  }
  // A day is full when the sample covers it from 00:00:00 through 23:59:59.
  const std::int64_t first_full = floor_div(lo + kSecondsPerDay - 1, kSecondsPerDay);
  const std::int64_t last_full = floor_div(hi + 1, kSecondsPerDay) - 1;
  const std::int64_t days = last_full - first_full + 1;
  if (days < 2) throw DomainError("need at least 2 full days to split, found " + std::to_string(std::max<std::int64_t>(days, 0)));

  DaySplit split;
  const std::int64_t train_days = (days + 1) / 2;
  for (std::int64_t d = first_full; d <= last_full; ++d) (d - first_full < train_days ? split.train : split.test).push_back(d);
  return split;
}

std::vector<EventRecord> events_in_days(std::span<const EventRecord> events, std::span<const std::int64_t> days) {
  std::set<std::int64_t> wanted(days.begin(), days.end());
  std::vector<EventRecord> out;
  for (const auto& e : events)
    if (wanted.contains(floor_div(e.timestamp, kSecondsPerDay))) out.push_back(e);
  return out;
}

std::string format_day(std::int64_t day) {
  const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{day}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace cascade
