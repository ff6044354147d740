#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "pairstats/random.hpp"

namespace pairstats {

/// Photon-pair number statistics of the source.
enum class Family {
    SqueezedVacuum,  ///< single degenerate process
    Thermal,         ///< single nondegenerate process
    Poissonian,      ///< many distinguishable processes
};

std::string_view to_string(Family family) noexcept;

/// Accepts "squeezed_vacuum"/"sqvac", "thermal", "poissonian"/"poisson".
Family parse_family(std::string_view name);

inline constexpr double kDefaultTailMass = 1e-12;
inline constexpr std::size_t kTruncationCap = 1'000'000;

/*!
 * Pair-number distribution p(m) of one family.
 *
 * The mean parameter is the mean photon number for the squeezed vacuum and
 * the mean pair number for the thermal and Poissonian families. All pmf
 * evaluations are in log space so they stay finite for large m.
 */
class PairDistribution {
  public:
    PairDistribution(Family family, double mean_param);

    Family family() const noexcept { return family_; }
    double mean_param() const noexcept { return mean_param_; }

    double pmf(std::size_t m) const;
    double mean_pairs() const noexcept;

  private:
    Family family_;
    double mean_param_;
};

double pmf(const PairDistribution& dist, std::size_t m);
double mean_pairs(const PairDistribution& dist);

/// 1 - E[(1 - w)^m] for w in [0, 1], from the closed-form generating function
/// of each family. Stays accurate when w is small.
double generating_complement(const PairDistribution& dist, double w);

/// Pump constant (K or the many-process constant, mW^-1) at an average pump
/// power in mW.
struct PumpRelation {
    double constant_per_mw;
    double p_ave_mw;

    void validate() const;
};

/// Squeezed vacuum and thermal: sinh^2 sqrt(K P). Poissonian: K P.
PairDistribution mean_from_pump(const PumpRelation& rel, Family family);

/// Smallest M with sum_{m > M} p(m) < tail_mass. Throws NumericError when M
/// would exceed kTruncationCap.
std::size_t truncation_index(const PairDistribution& dist,
                             double tail_mass = kDefaultTailMass);

/// p(0), ..., p(M) with M = truncation_index(dist, tail_mass).
std::vector<double> pmf_table(const PairDistribution& dist,
                              double tail_mass = kDefaultTailMass);

/// Draws pair numbers. Poissonian by the multiplication (counting) method,
/// thermal by geometric inversion, squeezed vacuum by inverse CDF over the
/// table truncated at kDefaultTailMass.
class PairSampler {
  public:
    explicit PairSampler(const PairDistribution& dist);

    std::size_t operator()(RandomStream& rng) const;

    const PairDistribution& distribution() const noexcept { return dist_; }

  private:
    PairDistribution dist_;
    std::vector<double> cdf_;
};

std::size_t sample(const PairDistribution& dist, RandomStream& rng);

}  // namespace pairstats
