#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

namespace iosim {

// Rounds the significand of an IEEE-754 binary32 value to 10 explicit bits
// (round-to-nearest, ties-to-even) while keeping the full 8-bit exponent.
// This is the storage format of tensor hardware that trades FP32 precision
// for half-precision multiplier width. Overflow rounds to infinity, like a
// real narrowing unit would.
inline float round_reduced_precision(float x) {
    if (!std::isfinite(x)) return x;
    auto bits = std::bit_cast<std::uint32_t>(x);
    const std::uint32_t keep_lsb = (bits >> 13) & 1u;
    bits += 0x0FFFu + keep_lsb;  // nearest, ties to even over the dropped 13 bits
    bits &= ~0x1FFFu;
    return std::bit_cast<float>(bits);
}

// Exponential policies for the simulation kernels.
//
// Both are applied element-by-element through unaryExpr, never through a
// SIMD polynomial, so the value of exp(x) for a given x does not depend on
// how neurons are partitioned across threads or packets.

// Full-precision libm exponential.
struct IeeeExp {
    template <class Scalar>
    Scalar operator()(Scalar x) const {
        return std::exp(x);
    }
};

// Emulates an exponential unit that only keeps 10 significand bits on its
// input and output operands; everything in between is regular float math.
struct ReducedExp {
    float operator()(float x) const {
        return round_reduced_precision(std::exp(round_reduced_precision(x)));
    }
};

}  // namespace iosim
