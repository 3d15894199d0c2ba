#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace segblend {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// All randomness flows from one root seed. Each subsystem draws from its own
// stream: derive_seed(root, tag) = splitmix64(root ^ fnv1a64(tag)). Tags in
// use: "init", "train", "generate", "layout", "assemble", "forest", "cv",
// "eval".
std::uint64_t derive_seed(std::uint64_t root, std::string_view tag);

inline Rng make_rng(std::uint64_t root, std::string_view tag) { return Rng(derive_seed(root, tag)); }

}  // namespace segblend
