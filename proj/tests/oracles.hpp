#pragma once

// Independent reference implementations used only by tests. None of them
// shares code paths with the simulators or samplers they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <vector>

#include "cascade/compound.hpp"
#include "cascade/graph.hpp"
#include "cascade/poisson.hpp"
#include "cascade/rng.hpp"
#include "cascade/stats.hpp"

namespace oracle {

using Distribution = std::map<std::uint64_t, double>;  // size -> probability

inline double binomial_pmf(unsigned n, unsigned k, double p) {
  double c = 1.0;
  for (unsigned i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
  return c * std::pow(p, k) * std::pow(1.0 - p, n - k);
}

// Exact size distribution of the alpha / alpha^k models by branching on every
// spreading decision. Exponential in the number of decision sites.
inline void enumerate_alpha_rounds(const cascade::Graph& g, double alpha, bool exponential, std::vector<char> informed,
                                   const std::vector<cascade::NodeId>& spreaders_last_round, unsigned round,
                                   std::uint64_t spreaders, double prob, Distribution& out) {
  std::vector<cascade::NodeId> fresh;
  for (auto u : spreaders_last_round)
    for (auto v : g.neighbors(u))
      if (!informed[v]) {
        informed[v] = 1;
        fresh.push_back(v);
      }
  if (fresh.empty()) {
    out[spreaders] += prob;
    return;
  }
  const double p = exponential ? std::pow(alpha, round) : alpha;
  const std::size_t m = fresh.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    std::vector<cascade::NodeId> next;
    double q = prob;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask >> i & 1) {
        next.push_back(fresh[i]);
        q *= p;
      } else {
        q *= 1.0 - p;
      }
    }
    if (q == 0.0) continue;
    if (next.empty()) {
      out[spreaders] += q;
      continue;
    }
    enumerate_alpha_rounds(g, alpha, exponential, informed, next, round + 1, spreaders + next.size(), q, out);
  }
}

inline Distribution enumerate_alpha(const cascade::Graph& g, double alpha, bool exponential, cascade::NodeId start) {
  Distribution out;
  std::vector<char> informed(g.num_nodes(), 0);
  informed[start] = 1;
  enumerate_alpha_rounds(g, alpha, exponential, informed, {start}, 1, 1, 1.0, out);
  return out;
}

// Exact CGM informed-count distribution, branching on each (informer,
// uninformed neighbor) trial in BFS order.
struct CgmState {
  std::vector<char> informed;
  std::vector<cascade::NodeId> frontier;
  std::vector<cascade::NodeId> next;
  std::size_t fi = 0;
  std::size_t ni = 0;
  std::uint64_t count = 1;
};

inline void enumerate_cgm_rec(const cascade::Graph& g, double alpha, CgmState s, double prob, Distribution& out) {
  if (prob == 0.0) return;
  for (;;) {
    while (s.fi < s.frontier.size()) {
      const auto nbrs = g.neighbors(s.frontier[s.fi]);
      while (s.ni < nbrs.size()) {
        const auto v = nbrs[s.ni];
        if (s.informed[v]) {
          ++s.ni;
          continue;
        }
        CgmState hit = s;
        hit.informed[v] = 1;
        hit.next.push_back(v);
        ++hit.count;
        ++hit.ni;
        enumerate_cgm_rec(g, alpha, std::move(hit), prob * alpha, out);
        ++s.ni;
        enumerate_cgm_rec(g, alpha, std::move(s), prob * (1.0 - alpha), out);
        return;
      }
      ++s.fi;
      s.ni = 0;
    }
    if (s.next.empty()) {
      out[s.count] += prob;
      return;
    }
    s.frontier = std::move(s.next);
    s.next.clear();
    s.fi = 0;
    s.ni = 0;
  }
}

inline Distribution enumerate_cgm(const cascade::Graph& g, double alpha, cascade::NodeId start) {
  Distribution out;
  CgmState s;
  s.informed.assign(g.num_nodes(), 0);
  s.informed[start] = 1;
  s.frontier = {start};
  enumerate_cgm_rec(g, alpha, std::move(s), 1.0, out);
  return out;
}

// Forward-reachable set size by plain DFS.
inline std::uint64_t reachable_count(const cascade::Graph& g, cascade::NodeId start) {
  std::vector<char> seen(g.num_nodes(), 0);
  std::vector<cascade::NodeId> stack{start};
  seen[start] = 1;
  std::uint64_t n = 0;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    ++n;
    for (auto v : g.neighbors(u))
      if (!seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
  }
  return n;
}

inline std::uint64_t reachable_edge_count(const cascade::Graph& g, cascade::NodeId start) {
  std::vector<char> seen(g.num_nodes(), 0);
  std::vector<cascade::NodeId> stack{start};
  seen[start] = 1;
  std::uint64_t edges = 0;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    edges += g.degree(u);
    for (auto v : g.neighbors(u))
      if (!seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
  }
  return edges;
}

// sup |F_emp - F_exact| over the union of supports.
inline double ks_against(const cascade::SizeHistogram& h, const Distribution& exact) {
  std::set<std::uint64_t> points;
  for (const auto& [s, c] : h.counts()) points.insert(s);
  for (const auto& [s, p] : exact) points.insert(s);
  double worst = 0.0, fe = 0.0, fx = 0.0;
  auto hit = h.counts().begin();
  auto xit = exact.begin();
  for (auto x : points) {
    while (hit != h.counts().end() && hit->first <= x) fe += static_cast<double>((hit++)->second) / h.total();
    while (xit != exact.end() && xit->first <= x) fx += (xit++)->second;
    worst = std::max(worst, std::fabs(fe - fx));
  }
  return worst;
}

// Dense scan of every integer in [1, max support], exact rational comparison.
struct BruteKs {
  cascade::u128 numerator = 0;
  cascade::u128 denominator = 1;
  std::uint64_t location = 0;
};

inline BruteKs brute_force_ks(const cascade::SizeHistogram& a, const cascade::SizeHistogram& b) {
  const std::uint64_t hi = std::max(a.max_size(), b.max_size());
  BruteKs out;
  out.denominator = static_cast<cascade::u128>(a.total()) * b.total();
  out.location = 1;
  cascade::u128 ca = 0, cb = 0;
  for (std::uint64_t x = 1; x <= hi; ++x) {
    ca += a.count(x);
    cb += b.count(x);
    const cascade::u128 l = ca * b.total();
    const cascade::u128 r = cb * a.total();
    const cascade::u128 d = l > r ? l - r : r - l;
    if (d > out.numerator) {
      out.numerator = d;
      out.location = x;
    }
  }
  return out;
}

// Literal reading of the multi-source procedure: a queue holds the rounds
// still to be played; when a sub-cascade reaches past the last queued round,
// the missing rounds are appended.
inline cascade::RumorOutcome naive_multi_source(const cascade::PropertyTable& table, double lambda,
                                                cascade::RngStream& rng, std::uint64_t round_cap) {
  const auto first = table.sample(rng);
  cascade::RumorOutcome out{first.size, first.rounds, false};
  std::deque<std::uint64_t> pending;
  for (std::uint64_t r = 1; r <= first.rounds && r <= round_cap + 1; ++r) pending.push_back(r);
  if (first.rounds > round_cap) {
    out.diverged = true;
    return out;
  }
  std::uint64_t last_queued = first.rounds;
  while (!pending.empty()) {
    const std::uint64_t round = pending.front();
    pending.pop_front();
    const std::uint64_t k = cascade::sample_poisson(lambda, rng);
    for (std::uint64_t i = 0; i < k; ++i) {
      const auto sub = table.sample(rng);
      out.size += sub.size;
      const std::uint64_t reach = round + sub.rounds;
      while (last_queued < reach) pending.push_back(++last_queued);
    }
    out.rounds = std::max(out.rounds, last_queued);
    if (out.rounds > round_cap) {
      out.diverged = true;
      return out;
    }
  }
  return out;
}

}  // namespace oracle
