#pragma once

#include "expresso/util/crypto.hpp"

namespace expresso::zk {

/// Uniform field element from 64 bytes of the stream (bias below 2^-250).
template <class F>
F random_element(Rng& rng)
{
    std::array<std::uint8_t, 64> wide{};
    rng.fill(wide);
    return F::from_wide_bytes(wide);
}

/// Uniform non-zero element.
template <class F>
F random_nonzero(Rng& rng)
{
    for (;;) {
        F v = random_element<F>(rng);
        if (!v.is_zero()) return v;
    }
}

}  // namespace expresso::zk
