#pragma once

#include <array>
#include <cstdint>

namespace rpst {

/// Philox4x32-10 counter-based bijection (Salmon et al., SC'11).
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter apply(Counter ctr, Key key) noexcept;
};

/**
 * Standard normal variate fully determined by a 64-bit seed and a 128-bit
 * counter (stream, component, cell). Same inputs give the same bits on every
 * platform with IEEE doubles and a correctly rounded libm log/sqrt/cos.
 */
double keyed_normal(std::uint64_t seed, std::uint64_t stream, std::uint32_t component, std::int64_t cell) noexcept;

} // namespace rpst
