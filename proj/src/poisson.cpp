#include "cascade/poisson.hpp"

#include <cmath>

#include "cascade/error.hpp"

namespace cascade {

namespace {

constexpr double kInversionLimit = 10.0;

std::uint64_t poisson_inversion(double lambda, RngStream& rng) {
  const double u = rng.uniform();
  std::uint64_t k = 0;
  double p = std::exp(-lambda);
  double cdf = p;
  while (u > cdf) {
    ++k;
    p *= lambda / static_cast<double>(k);
    const double next = cdf + p;
    if (next == cdf) break;  // remaining tail below double resolution
    cdf = next;
  }
  return k;
}

// W. Hormann, "The transformed rejection method for generating Poisson random
// variables", Insurance: Mathematics and Economics 12 (1993).
std::uint64_t poisson_ptrs(double lambda, RngStream& rng) {
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <= -lambda + k * loglam - std::lgamma(k + 1.0))
      return static_cast<std::uint64_t>(k);
  }
}

}  // namespace

std::uint64_t sample_poisson(double lambda, RngStream& rng) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("Poisson rate must be finite and >= 0");
  if (lambda == 0.0) return 0;
  return lambda < kInversionLimit ? poisson_inversion(lambda, rng) : poisson_ptrs(lambda, rng);
}

}  // namespace cascade
