#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "pairstats/distributions.hpp"

namespace pairstats {

enum class Topology {
    BeamSplit5050,   ///< both photons of a pair share a 50/50 coupler
    SeparatedPairs,  ///< signal always reaches D1, idler always reaches D2
};

std::string_view to_string(Topology topology) noexcept;
Topology parse_topology(std::string_view name);

enum class Detector { First, Second };

/// Gated two-detector chain. Defaults are the reference 800 kHz setup.
struct SetupConfig {
    double pulse_rate_hz = 8e5;
    double eta1 = 0.25;
    double eta2 = 0.10;
    double dark1_per_gate = 6e-5;
    double dark2_per_gate = 4e-4;
    double t_total = 0.148;
    Topology topology = Topology::BeamSplit5050;

    void validate() const;

    double eta(Detector k) const noexcept { return k == Detector::First ? eta1 : eta2; }
    /// Dark-count rates, counts/s.
    double delta1() const noexcept { return dark1_per_gate * pulse_rate_hz; }
    double delta2() const noexcept { return dark2_per_gate * pulse_rate_hz; }
};

/// One pump-power point. Corrected fields are filled by correct_counts.
struct CountRecord {
    double pump_mw = 0.0;
    double s1_raw = 0.0;
    double s2_raw = 0.0;
    double c_raw = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    double c = 0.0;
    bool s1_clamped = false;
    bool s2_clamped = false;
    bool c_clamped = false;

    bool clamped() const noexcept { return s1_clamped || s2_clamped || c_clamped; }
    double s_ave() const noexcept { return (s1 + s2) / 2.0; }
};

struct Rates {
    double s1 = 0.0;
    double s2 = 0.0;
    double c = 0.0;
};

/// Reduced evaluates the binomial inner sums in closed form and the outer sum
/// over m through the family's generating function, so any mean is exact.
/// Literal sums both series term by term up to the truncation index and exists
/// to verify the reduced path.
enum class SeriesMode { Reduced, Literal };

/// Probability that a detector with per-photon efficiency a clicks when 2m
/// photons are split at random over the two outputs.
double split_click_probability(std::size_t m, double a, SeriesMode mode = SeriesMode::Reduced);

/// Probability that both detectors click for 2m randomly split photons.
double split_coincidence_probability(std::size_t m, double a1, double a2,
                                     SeriesMode mode = SeriesMode::Reduced);

/// Dark-free single-count rate at detector k (counts/s). For SeparatedPairs
/// each detector sees one photon of every pair.
double single_rate(const PairDistribution& dist, const SetupConfig& cfg, Detector k,
                   SeriesMode mode = SeriesMode::Reduced,
                   double tail_mass = kDefaultTailMass);

/// Dark-free coincidence rate behind the 50/50 coupler. Requires
/// Topology::BeamSplit5050.
double coincidence_rate(const PairDistribution& dist, const SetupConfig& cfg,
                        SeriesMode mode = SeriesMode::Reduced,
                        double tail_mass = kDefaultTailMass);

/// Dark-free coincidence rate with deterministic pair routing,
/// R sum p(m) [1 - (1 - T eta1)^m][1 - (1 - T eta2)^m]. Requires
/// Topology::SeparatedPairs.
double separated_coincidence_rate(const PairDistribution& dist, const SetupConfig& cfg,
                                  SeriesMode mode = SeriesMode::Reduced,
                                  double tail_mass = kDefaultTailMass);

/// s1, s2 and c for the configured topology.
Rates model_rates(const PairDistribution& dist, const SetupConfig& cfg,
                  SeriesMode mode = SeriesMode::Reduced);

/// Coincidences with at least one dark click: (s1 d2 + s2 d1 + d1 d2) / R.
double accidental_coincidence_rate(double s1, double s2, const SetupConfig& cfg);

/// Subtracts dark counts from the singles and accidental coincidences
/// (computed from the corrected singles) from the coincidences. Negative
/// results clamp to zero and set the matching flag.
CountRecord correct_counts(const CountRecord& rec, const SetupConfig& cfg);

struct RateEstimate {
    double rate = 0.0;
    double std_error = 0.0;
};

struct MonteCarloOptions {
    bool dark_counts = false;
    /// Worker threads; 0 picks the hardware concurrency.
    std::size_t shards = 0;
};

struct MonteCarloResult {
    std::uint64_t pulses = 0;
    std::uint64_t clicks1 = 0;
    std::uint64_t clicks2 = 0;
    std::uint64_t coincidences = 0;
    RateEstimate s1;
    RateEstimate s2;
    RateEstimate c;
};

/// Pulse-by-pulse simulation of the detection chain. Pulses are grouped
/// into fixed blocks with one random stream per block, so the counts depend
/// only on the seed and never on the shard count.
MonteCarloResult monte_carlo(const PairDistribution& dist, const SetupConfig& cfg,
                             std::uint64_t n_pulses, std::uint64_t seed,
                             MonteCarloOptions options = {});

}  // namespace pairstats
