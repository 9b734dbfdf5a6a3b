#include "cascade/compound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cascade/error.hpp"
#include "cascade/parallel.hpp"

namespace cascade {

PropertyTable PropertyTable::build(std::vector<TableEntry> entries) {
  if (entries.empty()) throw InvalidArgument("property table is empty");
  if (entries.size() > std::numeric_limits<std::uint32_t>::max()) throw InvalidArgument("property table too large");
  u128 total = 0;
  for (const auto& e : entries) {
    if (e.frequency == 0) throw InvalidArgument("property table frequencies must be positive");
    total += e.frequency;
  }
  if (total > std::numeric_limits<std::uint64_t>::max()) throw InvalidArgument("property table total overflows");

  PropertyTable t;
  t.entries_ = std::move(entries);
  t.total_ = static_cast<std::uint64_t>(total);
  const std::size_t k = t.entries_.size();
  const u128 capacity = t.total_;

  // Vose's construction on scaled weights w_i * K against capacity T.
  std::vector<u128> scaled(k);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < k; ++i) {
    scaled[i] = static_cast<u128>(t.entries_[i].frequency) * k;
    (scaled[i] < capacity ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  t.cut_.assign(k, t.total_);
  t.alias_.resize(k);
  for (std::size_t i = 0; i < k; ++i) t.alias_[i] = static_cast<std::uint32_t>(i);
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    t.cut_[s] = static_cast<std::uint64_t>(scaled[s]);
    t.alias_[s] = l;
    scaled[l] -= capacity - scaled[s];
    if (scaled[l] < capacity) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Integer arithmetic leaves no residue: whatever remains is exactly full.
  t.single_draw_ = static_cast<u128>(k) * capacity <= std::numeric_limits<std::uint64_t>::max();
  return t;
}

PropertyTable PropertyTable::from_counts(const PropertyCounts& counts) {
  std::vector<TableEntry> entries;
  entries.reserve(counts.size());
  for (const auto& [key, count] : counts) entries.push_back({key.first, key.second, count});
  return build(std::move(entries));
}

const TableEntry& PropertyTable::sample(RngStream& rng) const noexcept {
  const std::uint64_t k = entries_.size();
  std::uint64_t bucket, u;
  if (single_draw_) {
    const std::uint64_t r = rng.below(k * total_);
    bucket = r / total_;
    u = r % total_;
  } else {
    bucket = rng.below(k);
    u = rng.below(total_);
  }
  return entries_[u < cut_[bucket] ? bucket : alias_[bucket]];
}

std::vector<u128> PropertyTable::sampler_masses() const {
  std::vector<u128> mass(entries_.size(), 0);
  for (std::size_t j = 0; j < entries_.size(); ++j) {
    mass[j] += cut_[j];
    mass[alias_[j]] += total_ - cut_[j];
  }
  return mass;
}

SizeHistogram PropertyTable::size_marginal() const {
  SizeHistogram h;
  for (const auto& e : entries_) h.add(e.size, e.frequency);
  return h;
}

RumorOutcome multi_source_alpha_exp(const PropertyTable& table, double lambda, RngStream& rng,
                                    std::uint64_t round_cap) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be finite and >= 0");
  const auto& first = table.sample(rng);
  RumorOutcome out{first.size, first.rounds, false};
  if (out.rounds > round_cap) {
    out.diverged = true;
    return out;
  }
  for (std::uint64_t round = 1; round <= out.rounds; ++round) {
    const std::uint64_t sources = sample_poisson(lambda, rng);
    for (std::uint64_t i = 0; i < sources; ++i) {
      const auto& sub = table.sample(rng);
      out.size += sub.size;
      out.rounds = std::max(out.rounds, round + sub.rounds);
    }
    if (out.rounds > round_cap) {
      out.diverged = true;
      return out;
    }
  }
  return out;
}

CompoundResult run_compound_batch(const PropertyTable& table, const CompoundOptions& options) {
  constexpr std::uint64_t kDenseSizes = 1 << 16;
  if (options.num_runs < 1) throw InvalidArgument("num_runs must be >= 1");
  if (!(options.lambda >= 0.0) || !std::isfinite(options.lambda)) throw InvalidArgument("lambda must be finite and >= 0");

  const unsigned workers = std::max(1u, options.workers);
  std::vector<SizeHistogram> hists(workers);
  std::vector<std::uint64_t> diverged(workers, 0);
  for_each_chunk(options.num_runs, workers, 4096, [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
    std::vector<std::uint64_t> sizes;
    for (std::uint64_t i = begin; i < end; ++i) {
      RngStream rng(options.seed, i);
      const auto out = multi_source_alpha_exp(table, options.lambda, rng, options.round_cap);
      if (out.diverged) {
        ++diverged[w];
        continue;
      }
      if (out.size >= kDenseSizes) {
        hists[w].add(out.size);
        continue;
      }
      if (out.size >= sizes.size()) sizes.resize(std::min(kDenseSizes, std::max<std::uint64_t>(out.size + 1, sizes.size() * 2)), 0);
      ++sizes[out.size];
    }
    for (std::uint64_t s = 1; s < sizes.size(); ++s)
      if (sizes[s] != 0) hists[w].add(s, sizes[s]);
  });

  CompoundResult result;
  result.runs = options.num_runs;
  for (unsigned w = 0; w < workers; ++w) {
    result.histogram = merge(result.histogram, hists[w]);
    result.diverged += diverged[w];
  }
  return result;
}

}  // namespace cascade
