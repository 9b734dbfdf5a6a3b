#pragma once

#include <cstdint>
#include <map>
#include <vector>

namespace cascade {

__extension__ using u128 = unsigned __int128;

/// Counts of cascade sizes. Sizes are positive; every stored count is >= 1.
class SizeHistogram {
 public:
  SizeHistogram() = default;

  // Throws InvalidArgument for size 0, DomainError if a count would overflow.
  void add(std::uint64_t size, std::uint64_t count = 1);

  std::uint64_t total() const noexcept { return total_; }
  bool empty() const noexcept { return total_ == 0; }
  std::uint64_t count(std::uint64_t size) const;
  std::uint64_t max_size() const noexcept { return counts_.empty() ? 0 : counts_.rbegin()->first; }
  double mean() const;
  const std::map<std::uint64_t, std::uint64_t>& counts() const noexcept { return counts_; }

  friend bool operator==(const SizeHistogram&, const SizeHistogram&) = default;

 private:
  std::map<std::uint64_t, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

SizeHistogram merge(const SizeHistogram& a, const SizeHistogram& b);

/// Right-continuous step CDF kept as exact cumulative counts over a total.
class Cdf {
 public:
  const std::vector<std::uint64_t>& support() const noexcept { return support_; }
  const std::vector<std::uint64_t>& cumulative_counts() const noexcept { return cumulative_; }
  std::uint64_t total() const noexcept { return total_; }

  // Cumulative count at x, i.e. number of observations <= x.
  std::uint64_t count_at(std::uint64_t x) const;
  double at(std::uint64_t x) const;

 private:
  friend Cdf to_cdf(const SizeHistogram&);
  std::vector<std::uint64_t> support_;
  std::vector<std::uint64_t> cumulative_;
  std::uint64_t total_ = 0;
};

// Throws DomainError on an empty histogram.
Cdf to_cdf(const SizeHistogram& h);

/// Kolmogorov-Smirnov distance of two step CDFs. The statistic is the exact
/// fraction numerator / denominator rounded once to double.
struct KsResult {
  double statistic = 0.0;
  std::uint64_t location = 0;  // smallest support point achieving the supremum
  u128 numerator = 0;
  u128 denominator = 1;
};

KsResult ks_statistic(const Cdf& a, const Cdf& b);
KsResult ks_statistic(const SizeHistogram& a, const SizeHistogram& b);

struct LogBucket {
  std::uint64_t lo = 0;  // inclusive
  std::uint64_t hi = 0;  // exclusive
  double mass = 0.0;
};

/// Buckets [ceil(base^k), ceil(base^(k+1))) up to the one holding the largest
/// size. Ranges that collapse to nothing under the integer ceiling are skipped
/// so every size lands in exactly one bucket.
std::vector<LogBucket> log_bucketize(const SizeHistogram& h, double base);

}  // namespace cascade
