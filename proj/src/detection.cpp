#include "pairstats/detection.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "pairstats/errors.hpp"
#include "pairstats/random.hpp"

namespace pairstats {

namespace {

constexpr std::uint64_t kPulsesPerBlock = 1u << 15;

bool probability_ok(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

// 1 - x^n, accurate when x is close to 1.
double one_minus_pow(double x, double n) {
    if (n == 0.0) return 0.0;
    if (x == 0.0) return 1.0;
    return -std::expm1(n * std::log(x));
}

double pow_n(double x, double n) { return n == 0.0 ? 1.0 : std::pow(x, n); }

// C(2m, n) / 2^{2m}
double split_weight(std::size_t m, std::size_t n) {
    const double two_m = 2.0 * static_cast<double>(m);
    const double k = static_cast<double>(n);
    return std::exp(std::lgamma(two_m + 1.0) - std::lgamma(k + 1.0) -
                    std::lgamma(two_m - k + 1.0) - two_m * std::log(2.0));
}

template <class PerPairs>
double expected_over(const PairDistribution& dist, double tail_mass, PerPairs&& per_pairs) {
    const auto table = pmf_table(dist, tail_mass);
    double sum = 0.0;
    for (std::size_t m = 1; m < table.size(); ++m) sum += table[m] * per_pairs(m);
    return sum;
}

RateEstimate estimate(std::uint64_t count, std::uint64_t pulses, double rate_hz) {
    const double p = static_cast<double>(count) / static_cast<double>(pulses);
    return {rate_hz * p, rate_hz * std::sqrt(p * (1.0 - p) / static_cast<double>(pulses))};
}

}  // namespace

std::string_view to_string(Topology topology) noexcept {
    switch (topology) {
        case Topology::BeamSplit5050: return "beam_split_5050";
        case Topology::SeparatedPairs: return "separated_pairs";
    }
    return "unknown";
}

Topology parse_topology(std::string_view name) {
    if (name == "beam_split_5050" || name == "beam_split") return Topology::BeamSplit5050;
    if (name == "separated_pairs" || name == "separated") return Topology::SeparatedPairs;
    throw ValidationError("unknown topology '" + std::string(name) + "'");
}

void SetupConfig::validate() const {
    if (!std::isfinite(pulse_rate_hz) || pulse_rate_hz <= 0.0) {
        throw ValidationError("pulse_rate_hz must be positive");
    }
    if (!probability_ok(eta1) || !probability_ok(eta2)) {
        throw ValidationError("detector efficiencies must lie in [0, 1]");
    }
    if (!probability_ok(dark1_per_gate) || dark1_per_gate >= 1.0 ||
        !probability_ok(dark2_per_gate) || dark2_per_gate >= 1.0) {
        throw ValidationError("dark-count probabilities must lie in [0, 1)");
    }
    if (!std::isfinite(t_total) || t_total <= 0.0 || t_total > 1.0) {
        throw ValidationError("t_total must lie in (0, 1]");
    }
}

double split_click_probability(std::size_t m, double a, SeriesMode mode) {
    if (mode == SeriesMode::Reduced) {
        return one_minus_pow(1.0 - a / 2.0, 2.0 * static_cast<double>(m));
    }
    double sum = 0.0;
    for (std::size_t n = 0; n <= 2 * m; ++n) {
        sum += split_weight(m, n) * one_minus_pow(1.0 - a, static_cast<double>(n));
    }
    return sum;
}

double split_coincidence_probability(std::size_t m, double a1, double a2, SeriesMode mode) {
    const double two_m = 2.0 * static_cast<double>(m);
    if (mode == SeriesMode::Reduced) {
        // Binomial theorem on each of the four products.
        return 1.0 - pow_n(1.0 - a1 / 2.0, two_m) - pow_n(1.0 - a2 / 2.0, two_m) +
               pow_n(1.0 - (a1 + a2) / 2.0, two_m);
    }
    double sum = 0.0;
    for (std::size_t n = 0; n <= 2 * m; ++n) {
        const double to_first = static_cast<double>(n);
        sum += split_weight(m, n) * one_minus_pow(1.0 - a1, to_first) *
               one_minus_pow(1.0 - a2, two_m - to_first);
    }
    return sum;
}

namespace {

// 1 - (1 - x)(1 - y), exact for small x and y.
double union_loss(double x, double y) { return x + y - x * y; }

// Per-pulse single-click probability at overall efficiency a.
double click_probability(const PairDistribution& dist, Topology topology, double a) {
    // Beam split: each pair contributes (1 - a/2)^2 to the no-click product.
    const double w = topology == Topology::BeamSplit5050 ? union_loss(a / 2.0, a / 2.0) : a;
    return generating_complement(dist, w);
}

double both_click_probability(const PairDistribution& dist, Topology topology, double a1,
                              double a2) {
    // P(both) = P(1) + P(2) - P(either), with P(either) from the joint no-click product.
    const double w_either = topology == Topology::BeamSplit5050
                                ? union_loss((a1 + a2) / 2.0, (a1 + a2) / 2.0)
                                : union_loss(a1, a2);
    return click_probability(dist, topology, a1) + click_probability(dist, topology, a2) -
           generating_complement(dist, w_either);
}

}  // namespace

double single_rate(const PairDistribution& dist, const SetupConfig& cfg, Detector k,
                   SeriesMode mode, double tail_mass) {
    cfg.validate();
    const double a = cfg.t_total * cfg.eta(k);
    if (mode == SeriesMode::Reduced) {
        return cfg.pulse_rate_hz * click_probability(dist, cfg.topology, a);
    }
    if (cfg.topology == Topology::SeparatedPairs) {
        return cfg.pulse_rate_hz * expected_over(dist, tail_mass, [&](std::size_t m) {
                   return one_minus_pow(1.0 - a, static_cast<double>(m));
               });
    }
    return cfg.pulse_rate_hz * expected_over(dist, tail_mass, [&](std::size_t m) {
               return split_click_probability(m, a, mode);
           });
}

double coincidence_rate(const PairDistribution& dist, const SetupConfig& cfg, SeriesMode mode,
                        double tail_mass) {
    cfg.validate();
    if (cfg.topology != Topology::BeamSplit5050) {
        throw ValidationError("coincidence_rate needs the beam_split_5050 topology");
    }
    const double a1 = cfg.t_total * cfg.eta1;
    const double a2 = cfg.t_total * cfg.eta2;
    if (mode == SeriesMode::Reduced) {
        return cfg.pulse_rate_hz * both_click_probability(dist, cfg.topology, a1, a2);
    }
    return cfg.pulse_rate_hz * expected_over(dist, tail_mass, [&](std::size_t m) {
               return split_coincidence_probability(m, a1, a2, mode);
           });
}

double separated_coincidence_rate(const PairDistribution& dist, const SetupConfig& cfg,
                                  SeriesMode mode, double tail_mass) {
    cfg.validate();
    if (cfg.topology != Topology::SeparatedPairs) {
        throw ValidationError("separated_coincidence_rate needs the separated_pairs topology");
    }
    const double a1 = cfg.t_total * cfg.eta1;
    const double a2 = cfg.t_total * cfg.eta2;
    if (mode == SeriesMode::Reduced) {
        return cfg.pulse_rate_hz * both_click_probability(dist, cfg.topology, a1, a2);
    }
    return cfg.pulse_rate_hz * expected_over(dist, tail_mass, [&](std::size_t m) {
               const double n = static_cast<double>(m);
               return one_minus_pow(1.0 - a1, n) * one_minus_pow(1.0 - a2, n);
           });
}

Rates model_rates(const PairDistribution& dist, const SetupConfig& cfg, SeriesMode mode) {
    Rates r;
    r.s1 = single_rate(dist, cfg, Detector::First, mode);
    r.s2 = single_rate(dist, cfg, Detector::Second, mode);
    r.c = cfg.topology == Topology::BeamSplit5050 ? coincidence_rate(dist, cfg, mode)
                                                  : separated_coincidence_rate(dist, cfg, mode);
    return r;
}

double accidental_coincidence_rate(double s1, double s2, const SetupConfig& cfg) {
    cfg.validate();
    if (!(s1 >= 0.0) || !(s2 >= 0.0)) throw ValidationError("single rates must be nonnegative");
    const double d1 = cfg.delta1();
    const double d2 = cfg.delta2();
    return (s1 * d2 + s2 * d1 + d1 * d2) / cfg.pulse_rate_hz;
}

CountRecord correct_counts(const CountRecord& rec, const SetupConfig& cfg) {
    cfg.validate();
    if (!(rec.s1_raw >= 0.0) || !(rec.s2_raw >= 0.0) || !(rec.c_raw >= 0.0)) {
        throw ValidationError("raw counts must be nonnegative");
    }
    CountRecord out = rec;
    const double s1 = rec.s1_raw - cfg.delta1();
    const double s2 = rec.s2_raw - cfg.delta2();
    out.s1_clamped = cfg.delta1() > 0.0 && s1 <= 0.0;
    out.s2_clamped = cfg.delta2() > 0.0 && s2 <= 0.0;
    out.s1 = std::max(0.0, s1);
    out.s2 = std::max(0.0, s2);
    const double accidental = accidental_coincidence_rate(out.s1, out.s2, cfg);
    const double c = rec.c_raw - accidental;
    out.c_clamped = accidental > 0.0 && c <= 0.0;
    out.c = std::max(0.0, c);
    return out;
}

MonteCarloResult monte_carlo(const PairDistribution& dist, const SetupConfig& cfg,
                             std::uint64_t n_pulses, std::uint64_t seed,
                             MonteCarloOptions options) {
    cfg.validate();
    if (n_pulses == 0) throw ValidationError("monte_carlo needs at least one pulse");

    const PairSampler sampler(dist);
    const double a1 = cfg.t_total * cfg.eta1;
    const double a2 = cfg.t_total * cfg.eta2;
    const bool separated = cfg.topology == Topology::SeparatedPairs;
    const std::uint64_t blocks = (n_pulses + kPulsesPerBlock - 1) / kPulsesPerBlock;

    std::size_t shards = options.shards;
    if (shards == 0) shards = std::max(1u, std::thread::hardware_concurrency());
    shards = static_cast<std::size_t>(std::min<std::uint64_t>(shards, blocks));

    std::atomic<std::uint64_t> clicks1{0};
    std::atomic<std::uint64_t> clicks2{0};
    std::atomic<std::uint64_t> both{0};

    auto run_shard = [&](std::size_t shard) {
        std::uint64_t n1 = 0, n2 = 0, n12 = 0;
        for (std::uint64_t block = shard; block < blocks; block += shards) {
            RandomStream rng(seed, block);
            const std::uint64_t begin = block * kPulsesPerBlock;
            const std::uint64_t end = std::min(n_pulses, begin + kPulsesPerBlock);
            for (std::uint64_t pulse = begin; pulse < end; ++pulse) {
                const std::size_t pairs = sampler(rng);
                bool click1 = false;
                bool click2 = false;
                if (separated) {
                    for (std::size_t i = 0; i < pairs; ++i) {
                        click1 |= rng.bernoulli(a1);
                        click2 |= rng.bernoulli(a2);
                    }
                } else {
                    for (std::size_t i = 0; i < 2 * pairs; ++i) {
                        if (rng.bernoulli(0.5)) {
                            click1 |= rng.bernoulli(a1);
                        } else {
                            click2 |= rng.bernoulli(a2);
                        }
                    }
                }
                if (options.dark_counts) {
                    click1 |= rng.bernoulli(cfg.dark1_per_gate);
                    click2 |= rng.bernoulli(cfg.dark2_per_gate);
                }
                n1 += click1;
                n2 += click2;
                n12 += click1 && click2;
            }
        }
        clicks1 += n1;
        clicks2 += n2;
        both += n12;
    };

    if (shards == 1) {
        run_shard(0);
    } else {
        std::vector<std::jthread> workers;
        workers.reserve(shards);
        for (std::size_t s = 0; s < shards; ++s) workers.emplace_back(run_shard, s);
    }

    MonteCarloResult result;
    result.pulses = n_pulses;
    result.clicks1 = clicks1;
    result.clicks2 = clicks2;
    result.coincidences = both;
    result.s1 = estimate(result.clicks1, n_pulses, cfg.pulse_rate_hz);
    result.s2 = estimate(result.clicks2, n_pulses, cfg.pulse_rate_hz);
    result.c = estimate(result.coincidences, n_pulses, cfg.pulse_rate_hz);
    return result;
}

}  // namespace pairstats
