#include "core/rng.hpp"

#include <cmath>

namespace heterodet {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double Rng::uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::open01() {
    return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
}

double Rng::normal() {
    const double r = std::sqrt(-2.0 * std::log(open01()));
    return r * std::cos(kTwoPi * uniform01());
}

Complex Rng::complex_normal() {
    const double r = std::sqrt(-2.0 * std::log(open01()));
    const double phase = kTwoPi * uniform01();
    // (g0 + i g1) / sqrt(2) with g0, g1 the Box-Muller pair: E|z|^2 = 1.
    const double s = r * 0x1.6a09e667f3bcdp-1;  // r / sqrt(2)
    return Complex(s * std::cos(phase), s * std::sin(phase));
}

std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace heterodet
