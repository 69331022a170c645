#pragma once

#include <string_view>

#include "densplit/omega_set.hpp"
#include "densplit/partition.hpp"

namespace densplit {

/// Parses the textual set grammar:
///   omega | empty | evens | odds | tower | osc(parity)
///   prog(a,d) | bern(p,seed) | per(prefixbits,patternbits) | pow(b)
///   list(n,...) | range(lo,hi) | alt(S)
///   inter(S,T) | union(S,T) | diff(S,T) | compl(S)
///   iv:first-half | iv:last-half | iv:singleton | iv:full | iv:empty | iv:alt
///   iv:trace(S) | iv:capped(S)
/// The iv: forms are defined interval by interval and need a partition.
/// describe() of a parsed set parses back to the same descriptor.
OmegaSet parse_set(std::string_view text, const IntervalPartition* partition = nullptr);

}  // namespace densplit
