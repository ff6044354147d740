#pragma once

#include <cstdint>
#include <random>

namespace pairstats {

/// Deterministic random stream keyed by (seed, stream index). Streams with
/// different indices are seeded independently, so work split across streams
/// is reproducible regardless of how the streams are scheduled.
class RandomStream {
  public:
    using engine_type = std::mt19937_64;

    RandomStream(std::uint64_t seed, std::uint64_t stream_index);

    /// Uniform draw on the open interval (0, 1).
    double uniform();

    /// Bernoulli trial with success probability p.
    bool bernoulli(double p) { return uniform() < p; }

    engine_type& engine() noexcept { return engine_; }

  private:
    engine_type engine_;
};

}  // namespace pairstats
