#pragma once

#include <span>
#include <string>
#include <vector>

#include "tokaudit/vocabulary.hpp"

namespace tokaudit {

// Trains a scalar-level BPE vocabulary. Deterministic: ties between equally
// frequent pairs break to the lexicographically smallest (left, right) token
// strings, and training stops once no adjacent pair occurs at least twice.
// Base symbols take ids 0..B-1 in sorted order; merged tokens follow in
// merge order.
Vocabulary train(std::span<const std::string> documents,
                 std::size_t target_size,
                 const PreTokenRules& rules = {});

}  // namespace tokaudit
