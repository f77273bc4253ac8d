#include "rpst/philox.hpp"

#include <cmath>
#include <numbers>

namespace rpst {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline Philox4x32::Counter round(const Philox4x32::Counter& c, const Philox4x32::Key& k) noexcept {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

// 53-bit uniform in (0, 1]; never zero so log() below stays finite.
inline double open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

} // namespace

Philox4x32::Counter Philox4x32::apply(Counter ctr, Key key) noexcept {
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        ctr = round(ctr, key);
    }
    return ctr;
}

double keyed_normal(std::uint64_t seed, std::uint64_t stream, std::uint32_t component, std::int64_t cell) noexcept {
    const auto ucell = static_cast<std::uint64_t>(cell);
    const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    // Counter layout: cell (64 bits) | stream (56 bits) | component (8 bits).
    const std::uint32_t tag = (static_cast<std::uint32_t>(stream & 0xFFFFFFu) << 8) | (component & 0xFFu);
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(ucell), static_cast<std::uint32_t>(ucell >> 32),
                                  static_cast<std::uint32_t>(stream >> 24), tag};
    const auto out = Philox4x32::apply(ctr, key);
    const double u1 = open_unit(out[0], out[1]);
    const double u2 = open_unit(out[2], out[3]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace rpst
