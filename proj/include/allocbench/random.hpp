#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace allocbench {

using Rng = std::mt19937_64;

/// FNV-1a hash of a label, used to name seed streams.
std::uint64_t seed_tag(std::string_view label) noexcept;

/// Derives an independent stream seed from a parent seed and a path of
/// components by repeated splitmix64 mixing. The derivation is stable across
/// platforms, so any cell of an experiment can be reproduced in isolation.
std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path) noexcept;

}  // namespace allocbench
