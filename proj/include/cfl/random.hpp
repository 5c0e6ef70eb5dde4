#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace cfl {

using Rng = std::mt19937_64;

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Deterministic sub-stream seed from a master seed and a path of indices,
/// e.g. derive_seed(master, {trial, node, tag}).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = detail::splitmix64(master);
    for (auto p : path) h = detail::splitmix64(h ^ detail::splitmix64(p + 0x632be59bd9b4e019ULL));
    return h;
}

inline Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    return Rng{derive_seed(master, path)};
}

// Stream tags keep sub-streams of one trial disjoint.
enum class StreamTag : std::uint64_t {
    deploy = 1,
    observe = 2,
    mobility = 3,
    localize = 4,
};

constexpr std::uint64_t tag(StreamTag t) { return static_cast<std::uint64_t>(t); }

}  // namespace cfl
