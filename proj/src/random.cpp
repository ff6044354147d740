#include "pairstats/random.hpp"

namespace pairstats {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_index),
                      static_cast<std::uint32_t>(stream_index >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_index)
    : engine_(seeded_engine(seed, stream_index)) {}

double RandomStream::uniform() {
    // 53 random mantissa bits, offset by half an ulp so 0 and 1 never occur.
    constexpr double scale = 1.0 / 9007199254740992.0;
    return (static_cast<double>(engine_() >> 11) + 0.5) * scale;
}

}  // namespace pairstats
