#include "pmlab/rng.hpp"

#include <array>

namespace pmlab {

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t trial, StreamRole role) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                      static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(trial),
                      static_cast<std::uint32_t>(trial >> 32),
                      static_cast<std::uint32_t>(role)};
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

}  // namespace pmlab
