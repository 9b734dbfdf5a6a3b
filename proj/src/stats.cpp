#include "cascade/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cascade/error.hpp"

namespace cascade {

void SizeHistogram::add(std::uint64_t size, std::uint64_t count) {
  if (size == 0) throw InvalidArgument("cascade sizes are positive");
  if (count == 0) return;
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  if (total_ > kMax - count) throw DomainError("histogram count overflow");
  counts_[size] += count;
  total_ += count;
}

std::uint64_t SizeHistogram::count(std::uint64_t size) const {
  auto it = counts_.find(size);
  return it == counts_.end() ? 0 : it->second;
}

double SizeHistogram::mean() const {
  if (total_ == 0) return 0.0;
  long double sum = 0;
  for (const auto& [size, count] : counts_) sum += static_cast<long double>(size) * count;
  return static_cast<double>(sum / total_);
}

SizeHistogram merge(const SizeHistogram& a, const SizeHistogram& b) {
  SizeHistogram out = a;
  for (const auto& [size, count] : b.counts()) out.add(size, count);
  return out;
}

std::uint64_t Cdf::count_at(std::uint64_t x) const {
  auto it = std::upper_bound(support_.begin(), support_.end(), x);
  if (it == support_.begin()) return 0;
  return cumulative_[static_cast<std::size_t>(it - support_.begin()) - 1];
}

double Cdf::at(std::uint64_t x) const {
  return static_cast<double>(static_cast<long double>(count_at(x)) / total_);
}

Cdf to_cdf(const SizeHistogram& h) {
  if (h.empty()) throw DomainError("CDF of an empty histogram");
  Cdf cdf;
  cdf.support_.reserve(h.counts().size());
  cdf.cumulative_.reserve(h.counts().size());
  std::uint64_t running = 0;
  for (const auto& [size, count] : h.counts()) {
    running += count;
    cdf.support_.push_back(size);
    cdf.cumulative_.push_back(running);
  }
  cdf.total_ = running;
  return cdf;
}

KsResult ks_statistic(const Cdf& a, const Cdf& b) {
  if (a.total() == 0 || b.total() == 0) throw DomainError("K-S statistic of an empty distribution");
  // |ca/ta - cb/tb| = |ca*tb - cb*ta| / (ta*tb), compared without rounding.
  const u128 ta = a.total();
  const u128 tb = b.total();
  KsResult best;
  best.denominator = ta * tb;
  best.location = std::min(a.support().front(), b.support().front());

  const auto& sa = a.support();
  const auto& sb = b.support();
  std::size_t i = 0, j = 0;
  u128 ca = 0, cb = 0;
  while (i < sa.size() || j < sb.size()) {
    std::uint64_t x;
    if (j == sb.size() || (i < sa.size() && sa[i] <= sb[j]))
      x = sa[i];
    else
      x = sb[j];
    if (i < sa.size() && sa[i] == x) ca = a.cumulative_counts()[i++];
    if (j < sb.size() && sb[j] == x) cb = b.cumulative_counts()[j++];
    const u128 lhs = ca * tb;
    const u128 rhs = cb * ta;
    const u128 diff = lhs > rhs ? lhs - rhs : rhs - lhs;
    if (diff > best.numerator) {
      best.numerator = diff;
      best.location = x;
    }
  }
  best.statistic = static_cast<double>(static_cast<long double>(best.numerator) / static_cast<long double>(best.denominator));
  return best;
}

KsResult ks_statistic(const SizeHistogram& a, const SizeHistogram& b) {
  return ks_statistic(to_cdf(a), to_cdf(b));
}

std::vector<LogBucket> log_bucketize(const SizeHistogram& h, double base) {
  if (!(base > 1.0) || !std::isfinite(base)) throw InvalidArgument("bucket base must be a finite number > 1");
  std::vector<LogBucket> buckets;
  if (h.empty()) return buckets;

  auto boundary = [base](int k) {
    const long double v = std::ceil(std::pow(static_cast<long double>(base), static_cast<long double>(k)));
    if (v >= static_cast<long double>(std::numeric_limits<std::uint64_t>::max())) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(v);
  };

  const auto max_size = h.max_size();
  auto it = h.counts().begin();
  for (int k = 0;; ++k) {
    const auto lo = boundary(k);
    const auto hi = boundary(k + 1);
    if (hi <= lo) continue;
    std::uint64_t in_bucket = 0;
    while (it != h.counts().end() && it->first < hi) in_bucket += (it++)->second;
    buckets.push_back({lo, hi, static_cast<double>(static_cast<long double>(in_bucket) / h.total())});
    if (max_size < hi) break;
  }
  return buckets;
}

}  // namespace cascade
