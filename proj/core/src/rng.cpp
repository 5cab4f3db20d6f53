#include "ctqw/rng.hpp"

namespace ctqw {

double SplitMix64::uniform_open() noexcept
{
    constexpr double kTwoPowMinus53 = 1.0 / 9007199254740992.0;
    return (static_cast<double>((*this)() >> 11) + 0.5) * kTwoPowMinus53;
}

} // namespace ctqw
