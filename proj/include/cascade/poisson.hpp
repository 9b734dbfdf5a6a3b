#pragma once

#include <cstdint>

#include "cascade/rng.hpp"

namespace cascade {

/// Exact Poisson(lambda) draw. Sequential inversion below lambda = 10,
/// Hormann's transformed rejection (PTRS) above. lambda = 0 returns 0 without
/// consuming randomness.
std::uint64_t sample_poisson(double lambda, RngStream& rng);

}  // namespace cascade
