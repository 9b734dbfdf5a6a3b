#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cascade/diffusion.hpp"
#include "cascade/poisson.hpp"
#include "cascade/rng.hpp"
#include "cascade/stats.hpp"

namespace cascade {

struct TableEntry {
  std::uint64_t size = 0;
  std::uint64_t rounds = 0;
  std::uint64_t frequency = 0;

  friend bool operator==(const TableEntry&, const TableEntry&) = default;
};

/// Empirical joint distribution of (size, rounds) with O(1) sampling.
///
/// The sampler is an alias table built in integer arithmetic: with K entries
/// and total T, bucket j keeps itself when a uniform draw u in [0, T) falls
/// below cut[j] and otherwise yields alias[j]. Entry i then has probability
/// exactly frequency_i / T.
class PropertyTable {
 public:
  // Throws InvalidArgument for an empty table or a zero frequency.
  static PropertyTable build(std::vector<TableEntry> entries);
  static PropertyTable from_counts(const PropertyCounts& counts);

  const TableEntry& sample(RngStream& rng) const noexcept;

  std::span<const TableEntry> entries() const noexcept { return entries_; }
  std::uint64_t total() const noexcept { return total_; }

  /// Sampler mass of each entry in units of 1 / (K * T). Equals
  /// frequency_i * K for a correct table.
  std::vector<u128> sampler_masses() const;

  // Distribution of a single draw's size.
  SizeHistogram size_marginal() const;

 private:
  PropertyTable() = default;

  std::vector<TableEntry> entries_;
  std::vector<std::uint64_t> cut_;
  std::vector<std::uint32_t> alias_;
  std::uint64_t total_ = 0;
  bool single_draw_ = false;  // K * T fits one 64-bit draw
};

struct RumorOutcome {
  std::uint64_t size = 0;
  std::uint64_t rounds = 0;
  bool diverged = false;  // rounds exceeded the cap before the loop finished

  friend bool operator==(const RumorOutcome&, const RumorOutcome&) = default;
};

inline constexpr std::uint64_t kDefaultRoundCap = 1'000'000;

/// One multi-source rumor: an initial table draw, then for every round up to
/// the (growing) round count, Poisson(lambda) further draws whose sizes add
/// up and whose rounds extend the horizon to max(rounds, round + r).
RumorOutcome multi_source_alpha_exp(const PropertyTable& table, double lambda, RngStream& rng,
                                    std::uint64_t round_cap = kDefaultRoundCap);

struct CompoundOptions {
  double lambda = 0.0;
  std::uint64_t num_runs = 1;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::uint64_t round_cap = kDefaultRoundCap;
};

struct CompoundResult {
  SizeHistogram histogram;  // diverged runs excluded
  std::uint64_t runs = 0;
  std::uint64_t diverged = 0;
};

CompoundResult run_compound_batch(const PropertyTable& table, const CompoundOptions& options);

}  // namespace cascade
