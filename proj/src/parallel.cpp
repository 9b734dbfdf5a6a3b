#include "cascade/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <string_view>

namespace cascade {

unsigned default_workers() {
  if (const char* env = std::getenv("CASCADE_LAB_WORKERS")) {
    std::string_view s(env);
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec == std::errc() && ptr == s.data() + s.size() && value > 0) return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace cascade
