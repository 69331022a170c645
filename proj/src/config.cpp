#include "densplit/config.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace densplit {

namespace {

std::uint64_t initial_cap() {
  if (const char* env = std::getenv("DENSPLIT_MAX_HORIZON")) {
    try {
      auto v = std::stoull(env);
      if (v > 0) return v;
    } catch (...) {
    }
  }
  return kDefaultExplicitCap;
}

std::atomic<std::uint64_t>& cap_storage() {
  static std::atomic<std::uint64_t> cap{initial_cap()};
  return cap;
}

}  // namespace

std::uint64_t explicit_cap() { return cap_storage().load(std::memory_order_relaxed); }

void set_explicit_cap(std::uint64_t cap) { cap_storage().store(cap, std::memory_order_relaxed); }

}  // namespace densplit
