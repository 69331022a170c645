#pragma once

#include <cstdint>

namespace densplit {

inline constexpr std::uint64_t kDefaultExplicitCap = std::uint64_t{1} << 27;

/// Largest horizon (in bits) that may be materialized explicitly. Initialized
/// from DENSPLIT_MAX_HORIZON when set.
std::uint64_t explicit_cap();
void set_explicit_cap(std::uint64_t cap);

}  // namespace densplit
