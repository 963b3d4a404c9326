// rng.hpp: deterministic named substreams derived from a single 64-bit run seed.
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace svqnhe {

// splitmix64 finalizer; decorrelates nearby seeds before feeding mt19937_64.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_name(std::string_view name) {
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : name) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// One run seed fans out into independent substreams ("nn-init", "sampling", ...).
// The same (seed, name, index) triple always yields the same generator state.
class SeedSequence {
public:
    explicit SeedSequence(std::uint64_t root) : root_(root) {}

    std::uint64_t root() const { return root_; }

    std::uint64_t derive(std::string_view name, std::uint64_t index = 0) const {
        return mix64(root_ ^ mix64(hash_name(name) + 0x632be59bd9b4e019ull * index));
    }

    std::mt19937_64 stream(std::string_view name, std::uint64_t index = 0) const {
        return std::mt19937_64(derive(name, index));
    }

private:
    std::uint64_t root_;
};

}  // namespace svqnhe
