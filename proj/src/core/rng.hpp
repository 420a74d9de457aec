#pragma once

#include <cstdint>
#include <random>

#include "core/linalg.hpp"

namespace heterodet {

// Deterministic random source. mt19937_64's output sequence is fixed by the
// standard; the uniform and Gaussian mappings below are our own, so a given
// seed produces the same draw sequence on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01();

    // Standard real normal via Box-Muller.
    double normal();

    // Circular complex normal with E|z|^2 = 1; one Box-Muller pair per draw.
    Complex complex_normal();

private:
    // Uniform on (0, 1]; safe under log().
    double open01();

    std::mt19937_64 gen_;
};

// Decorrelated per-stream seed from a master seed and a stream index
// (splitmix64 finalizer). Stream i is stable across runs and thread counts.
std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index);

}  // namespace heterodet
