#pragma once

#include <cstdint>
#include <initializer_list>

namespace pragbandit {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Child seed for a path of indices below a master seed, e.g.
/// child_seed(master, {record, trial}). Pure function of its inputs, so
/// results never depend on scheduling.
constexpr std::uint64_t child_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix64(master);
    for (std::uint64_t i : path) s = mix64(s ^ mix64(i + 0x632be59bd9b4e019ULL));
    return s;
}

}  // namespace pragbandit
