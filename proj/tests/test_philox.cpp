#include "rpst/philox.hpp"

#include <doctest.h>

#include <cmath>

using rpst::Philox4x32;

// Known-answer vectors from the Random123 distribution (kat_vectors, philox4x32 10 rounds).
TEST_CASE("philox4x32-10 known answers") {
    using C = Philox4x32::Counter;
    CHECK(Philox4x32::apply({0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::apply({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::apply({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("keyed normals depend on every key field") {
    const double base = rpst::keyed_normal(1, 2, 0, 3);
    CHECK(std::isfinite(base));
    CHECK(rpst::keyed_normal(1, 2, 0, 3) == base);
    CHECK(rpst::keyed_normal(2, 2, 0, 3) != base);
    CHECK(rpst::keyed_normal(1, 3, 0, 3) != base);
    CHECK(rpst::keyed_normal(1, 2, 1, 3) != base);
    CHECK(rpst::keyed_normal(1, 2, 0, 4) != base);
    CHECK(rpst::keyed_normal(1, 2, 0, -3) != base);
    CHECK(rpst::keyed_normal(1, std::uint64_t{1} << 40, 0, 3) != rpst::keyed_normal(1, 0, 0, 3));
}
