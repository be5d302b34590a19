#include "tokaudit/rng.hpp"

#include "tokaudit/error.hpp"

namespace tokaudit {

std::uint64_t uniform_index(Rng& rng, std::uint64_t k) {
    if (k == 0) {
        throw ValidationError("uniform_index: empty range");
    }
    if (k == 1) {
        return 0;
    }
    // Accept draws in [2^64 mod k, 2^64); that range has a multiple of k values.
    const std::uint64_t reject_below = (0 - k) % k;
    for (;;) {
        const std::uint64_t v = rng();
        if (v >= reject_below) {
            return v % k;
        }
    }
}

}  // namespace tokaudit
