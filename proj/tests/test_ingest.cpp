#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "cascade/error.hpp"
#include "cascade/ingest.hpp"
#include "cascade/rng.hpp"

using namespace cascade;

namespace {

constexpr std::int64_t kDay = kSecondsPerDay;

EventRecord ev(std::int64_t ts, std::string actor, std::vector<std::string> targets,
               std::vector<std::string> tags = {}) {
  std::sort(targets.begin(), targets.end());
  std::sort(tags.begin(), tags.end());
  return {ts, std::move(actor), std::move(targets), std::move(tags)};
}

std::pair<std::string, std::string> edge_names(const RetweetEdges& r, std::size_t i) {
  return {r.ids[r.edges[i].first], r.ids[r.edges[i].second]};
}

}  // namespace

TEST_CASE("parse a single record") {
  const auto p = parse_events("100\tu1\tu2\ttag1\n");
  REQUIRE(p.events.size() == 1);
  CHECK(p.events[0].timestamp == 100);
  CHECK(p.events[0].actor == "u1");
  CHECK(p.events[0].targets == std::vector<std::string>{"u2"});
  CHECK(p.events[0].hashtags == std::vector<std::string>{"tag1"});
  CHECK(p.malformed == 0);
}

TEST_CASE("parse empty lists, comments, duplicates and CRLF") {
  const auto p = parse_events("# header\n\n5\ta\t\t\n6\tb\tc,c,a\tX,x\r\n");
  REQUIRE(p.events.size() == 2);
  CHECK(p.events[0].targets.empty());
  CHECK(p.events[0].hashtags.empty());
  CHECK(p.events[1].targets == std::vector<std::string>{"a", "c"});
  CHECK(p.events[1].hashtags == std::vector<std::string>{"x"});
}

TEST_CASE("malformed lines") {
  const std::string text = "1\ta\tb\tt\nnope\ta\tb\tt\n2\ta\tb\n-3\ta\tb\tt\n4\t\tb\tt\n5\ta\tb\tt\n";
  const auto lenient = parse_events(text);
  CHECK(lenient.events.size() == 2);
  CHECK(lenient.malformed == 4);
  try {
    parse_events(text, ParseOptions{true});
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("parse from a stream") {
  std::istringstream in("1\ta\tb\tt\n2\tc\td\tu\n");
  CHECK(parse_events(in).events.size() == 2);
}

TEST_CASE("hashtag case folding is full Unicode folding") {
  CHECK(fold_hashtag("Rumor") == "rumor");
  CHECK(fold_hashtag("STRASSE") == fold_hashtag("straße"));
  CHECK(fold_hashtag("ΣΊΣΥΦΟΣ") == fold_hashtag("σίσυφος"));
  CHECK(fold_hashtag("ПРИВЕТ") == "привет");
}

TEST_CASE("retweet edges") {
  SUBCASE("single retweet gives influence edge B -> A") {
    const std::vector<EventRecord> e{ev(1, "A", {"B"})};
    const auto r = build_retweet_edges(e);
    REQUIRE(r.edges.size() == 1);
    CHECK(edge_names(r, 0) == std::pair<std::string, std::string>{"B", "A"});
  }
  SUBCASE("repeated retweet gives one edge") {
    const std::vector<EventRecord> e{ev(1, "A", {"B"}), ev(2, "A", {"B"})};
    CHECK(build_retweet_edges(e).edges.size() == 1);
  }
  SUBCASE("mention of two users") {
    const std::vector<EventRecord> e{ev(1, "A", {"B", "C"})};
    const auto r = build_retweet_edges(e);
    REQUIRE(r.edges.size() == 2);
    std::vector<std::pair<std::string, std::string>> names{edge_names(r, 0), edge_names(r, 1)};
    std::sort(names.begin(), names.end());
    CHECK(names == std::vector<std::pair<std::string, std::string>>{{"B", "A"}, {"C", "A"}});
  }
  SUBCASE("self mention is dropped but the actor is a node") {
    const std::vector<EventRecord> e{ev(1, "A", {"A"}), ev(2, "Z", {})};
    const auto r = build_retweet_edges(e);
    CHECK(r.edges.empty());
    CHECK(r.ids == std::vector<std::string>{"A", "Z"});
  }
  SUBCASE("graph conversion") {
    const std::vector<EventRecord> e{ev(1, "A", {"B"}), ev(2, "C", {"B"}), ev(3, "C", {"A"})};
    const auto r = build_retweet_edges(e);
    const auto g = r.to_graph();
    CHECK(g.num_nodes() == 3);
    CHECK(g.num_edges() == 3);
    // B -> A, B -> C, A -> C
    CHECK(g.degree(1) == 2);
    CHECK(g.degree(0) == 1);
  }
}

TEST_CASE("retweet edges ignore order and duplication") {
  RngStream rng(1);
  std::vector<EventRecord> events;
  for (int i = 0; i < 300; ++i) {
    std::vector<std::string> targets;
    for (int k = 0, m = static_cast<int>(rng.below(4)); k < m; ++k) targets.push_back("u" + std::to_string(rng.below(40)));
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    events.push_back(ev(static_cast<std::int64_t>(i), "u" + std::to_string(rng.below(40)), targets));
  }
  const auto base = build_retweet_edges(events);
  auto shuffled = events;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  shuffled.insert(shuffled.end(), events.begin(), events.begin() + 50);
  const auto again = build_retweet_edges(shuffled);
  CHECK(again.ids == base.ids);
  CHECK(again.edges == base.edges);
  CHECK(std::is_sorted(base.ids.begin(), base.ids.end()));
}

TEST_CASE("fresh window") {
  // First event mid-day 10; one fresh day ends at the close of day 11.
  const std::vector<EventRecord> e{ev(10 * kDay + 500, "a", {}), ev(20 * kDay, "b", {})};
  const auto w = default_fresh_window(e, 1);
  CHECK(w.begin == 10 * kDay + 500);
  CHECK(w.end == 12 * kDay);
  // Starting exactly at midnight, that day is itself full.
  const std::vector<EventRecord> f{ev(10 * kDay, "a", {}), ev(20 * kDay, "b", {})};
  CHECK(default_fresh_window(f, 2).end == 12 * kDay);
}

TEST_CASE("popularity") {
  const TimeRange window{0, 100};
  SUBCASE("three distinct users after the window") {
    const std::vector<EventRecord> e{ev(5, "z", {}, {"other"}), ev(100, "a", {}, {"t"}), ev(150, "b", {}, {"t"}),
                                     ev(200, "c", {}, {"t"})};
    const auto p = compute_popularity(e, window);
    CHECK(p.counts == std::map<std::uint64_t, std::uint64_t>{{3, 1}});
    CHECK(p.total == 1);
  }
  SUBCASE("tag seen in the window is excluded") {
    const std::vector<EventRecord> e{ev(50, "a", {}, {"t"}), ev(150, "b", {}, {"t"}), ev(160, "c", {}, {"u"})};
    const auto p = compute_popularity(e, window);
    CHECK(p.counts == std::map<std::uint64_t, std::uint64_t>{{1, 1}});
  }
  SUBCASE("repeat use by one user counts once") {
    std::vector<EventRecord> e;
    for (int i = 0; i < 5; ++i) e.push_back(ev(200 + i, "a", {}, {"t"}));
    CHECK(compute_popularity(e, window).counts == std::map<std::uint64_t, std::uint64_t>{{1, 1}});
  }
  SUBCASE("no hashtags gives an empty distribution") {
    const std::vector<EventRecord> e{ev(200, "a", {"b"})};
    const auto p = compute_popularity(e, window);
    CHECK(p.counts.empty());
    CHECK(p.histogram().empty());
  }
}

TEST_CASE("popularity ignores event order") {
  RngStream rng(2);
  std::vector<EventRecord> events;
  for (int i = 0; i < 500; ++i)
    events.push_back(ev(static_cast<std::int64_t>(rng.below(1000)), "u" + std::to_string(rng.below(30)), {},
                        {"t" + std::to_string(rng.below(25))}));
  const TimeRange w{0, 100};
  const auto base = compute_popularity(events, w);
  std::shuffle(events.begin(), events.end(), rng);
  CHECK(compute_popularity(events, w).counts == base.counts);
}

TEST_CASE("day split") {
  SUBCASE("ten full days") {
    const std::vector<EventRecord> e{ev(kDay, "a", {}), ev(11 * kDay - 1, "b", {})};
    const auto s = split_days(e);
    CHECK(s.train == std::vector<std::int64_t>{1, 2, 3, 4, 5});
    CHECK(s.test == std::vector<std::int64_t>{6, 7, 8, 9, 10});
  }
  SUBCASE("three full days, odd day to train") {
    const std::vector<EventRecord> e{ev(kDay - 10, "a", {}), ev(4 * kDay + 10, "b", {})};
    const auto s = split_days(e);
    CHECK(s.train == std::vector<std::int64_t>{1, 2});
    CHECK(s.test == std::vector<std::int64_t>{3});
  }
  SUBCASE("partial edge days are not full days") {
    const std::vector<EventRecord> e{ev(kDay + 1, "a", {}), ev(3 * kDay + 5, "b", {})};
    CHECK_THROWS_AS(split_days(e), DomainError);
  }
  CHECK(format_day(0) == "1970-01-01");
  CHECK(format_day(19723) == "2024-01-01");
}

TEST_CASE("events in days") {
  const std::vector<EventRecord> e{ev(kDay + 5, "a", {}), ev(2 * kDay + 5, "b", {}), ev(3 * kDay + 5, "c", {})};
  const std::vector<std::int64_t> days{1, 3};
  const auto sel = events_in_days(e, days);
  REQUIRE(sel.size() == 2);
  CHECK(sel[0].actor == "a");
  CHECK(sel[1].actor == "c");
}
