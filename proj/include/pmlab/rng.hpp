#pragma once

#include <cstdint>
#include <random>

namespace pmlab {

// Independent random streams inside one trial.
enum class StreamRole : std::uint32_t { environment = 1, policy = 2 };

// Seed for the (master seed, trial, role) stream. Depends on nothing else, so
// results do not change with the number of worker threads.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t trial, StreamRole role);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double normal() { return normal_(engine_); }
    std::size_t uniform_index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

}  // namespace pmlab
