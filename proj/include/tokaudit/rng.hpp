#pragma once

#include <cstdint>
#include <random>

namespace tokaudit {

// mt19937_64 is fully specified by the standard, so seeded streams are
// identical across platforms and standard libraries.
using Rng = std::mt19937_64;

// Unbiased index in [0, k) via rejection sampling. std::uniform_int_distribution
// is not portable across standard libraries, so this is hand-rolled.
std::uint64_t uniform_index(Rng& rng, std::uint64_t k);

}  // namespace tokaudit
