#include "pairstats/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "pairstats/errors.hpp"

namespace pairstats {

namespace {

// Above this mean the counting method needs too many uniforms per draw.
constexpr double kCountingMethodLimit = 30.0;

double log_pmf(Family family, double mean, std::size_t m) {
    const double k = static_cast<double>(m);
    switch (family) {
        case Family::SqueezedVacuum:
            // (2m-1)!!/(2m)!! = (2m)! / (2^m m!)^2
            return std::lgamma(2.0 * k + 1.0) - 2.0 * k * std::log(2.0) -
                   2.0 * std::lgamma(k + 1.0) + k * std::log(mean) -
                   (k + 0.5) * std::log1p(mean);
        case Family::Thermal:
            return k * std::log(mean) - (k + 1.0) * std::log1p(mean);
        case Family::Poissonian:
            return k * std::log(mean) - mean - std::lgamma(k + 1.0);
    }
    return -std::numeric_limits<double>::infinity();
}

}  // namespace

std::string_view to_string(Family family) noexcept {
    switch (family) {
        case Family::SqueezedVacuum: return "squeezed_vacuum";
        case Family::Thermal: return "thermal";
        case Family::Poissonian: return "poissonian";
    }
    return "unknown";
}

Family parse_family(std::string_view name) {
    if (name == "squeezed_vacuum" || name == "sqvac") return Family::SqueezedVacuum;
    if (name == "thermal") return Family::Thermal;
    if (name == "poissonian" || name == "poisson") return Family::Poissonian;
    throw ValidationError("unknown distribution family '" + std::string(name) + "'");
}

PairDistribution::PairDistribution(Family family, double mean_param)
    : family_(family), mean_param_(mean_param) {
    if (!std::isfinite(mean_param) || mean_param < 0.0) {
        throw ValidationError("mean parameter must be finite and nonnegative, got " +
                              std::to_string(mean_param));
    }
}

double PairDistribution::pmf(std::size_t m) const {
    if (mean_param_ == 0.0) return m == 0 ? 1.0 : 0.0;
    return std::exp(log_pmf(family_, mean_param_, m));
}

double PairDistribution::mean_pairs() const noexcept {
    return family_ == Family::SqueezedVacuum ? mean_param_ / 2.0 : mean_param_;
}

double pmf(const PairDistribution& dist, std::size_t m) { return dist.pmf(m); }

double mean_pairs(const PairDistribution& dist) { return dist.mean_pairs(); }

double generating_complement(const PairDistribution& dist, double w) {
    if (!std::isfinite(w) || w < 0.0 || w > 1.0) {
        throw ValidationError("generating_complement needs w in [0, 1]");
    }
    const double u = dist.mean_param() * w;
    switch (dist.family()) {
        case Family::Poissonian: return -std::expm1(-u);
        case Family::Thermal: return u / (1.0 + u);
        case Family::SqueezedVacuum: return -std::expm1(-0.5 * std::log1p(u));
    }
    throw ValidationError("unknown family");
}

void PumpRelation::validate() const {
    if (!std::isfinite(constant_per_mw) || constant_per_mw <= 0.0) {
        throw ValidationError("pump constant must be positive");
    }
    if (!std::isfinite(p_ave_mw) || p_ave_mw < 0.0) {
        throw ValidationError("average pump power must be nonnegative");
    }
}

PairDistribution mean_from_pump(const PumpRelation& rel, Family family) {
    rel.validate();
    const double kp = rel.constant_per_mw * rel.p_ave_mw;
    if (family == Family::Poissonian) return {family, kp};
    const double s = std::sinh(std::sqrt(kp));
    return {family, s * s};
}

std::size_t truncation_index(const PairDistribution& dist, double tail_mass) {
    if (!(tail_mass > 0.0 && tail_mass < 1.0)) {
        throw ValidationError("tail mass must lie in (0, 1)");
    }
    if (dist.mean_pairs() > static_cast<double>(kTruncationCap)) {
        throw NumericError("mean too large: truncation would exceed the cap of " +
                           std::to_string(kTruncationCap) + " pairs");
    }
    // Neumaier-compensated running sum of the pmf.
    double sum = 0.0;
    double carry = 0.0;
    for (std::size_t m = 0; m <= kTruncationCap; ++m) {
        const double p = dist.pmf(m);
        const double t = sum + p;
        carry += std::abs(sum) >= p ? (sum - t) + p : (p - t) + sum;
        sum = t;
        if (1.0 - (sum + carry) < tail_mass) return m;
    }
    throw NumericError("truncation index exceeds the cap of " +
                       std::to_string(kTruncationCap) + " pairs");
}

std::vector<double> pmf_table(const PairDistribution& dist, double tail_mass) {
    const std::size_t last = truncation_index(dist, tail_mass);
    std::vector<double> table(last + 1);
    for (std::size_t m = 0; m <= last; ++m) table[m] = dist.pmf(m);
    return table;
}

PairSampler::PairSampler(const PairDistribution& dist) : dist_(dist) {
    if (dist_.family() != Family::SqueezedVacuum || dist_.mean_param() == 0.0) return;
    const auto table = pmf_table(dist_);
    cdf_.resize(table.size());
    double acc = 0.0;
    for (std::size_t m = 0; m < table.size(); ++m) {
        acc += table[m];
        cdf_[m] = acc;
    }
    // Remaining tail mass (< 1e-12) goes to the last entry.
    cdf_.back() = 1.0;
}

std::size_t PairSampler::operator()(RandomStream& rng) const {
    const double mean = dist_.mean_param();
    if (mean == 0.0) return 0;
    switch (dist_.family()) {
        case Family::Poissonian: {
            if (mean > kCountingMethodLimit) {
                std::poisson_distribution<std::size_t> draw(mean);
                return draw(rng.engine());
            }
            const double limit = std::exp(-mean);
            std::size_t count = 0;
            double product = rng.uniform();
            while (product > limit) {
                ++count;
                product *= rng.uniform();
            }
            return count;
        }
        case Family::Thermal: {
            // P(M >= m) = q^m with q = mu / (mu + 1).
            const double log_q = std::log(mean) - std::log1p(mean);
            return static_cast<std::size_t>(std::floor(std::log(rng.uniform()) / log_q));
        }
        case Family::SqueezedVacuum: {
            const double u = rng.uniform();
            const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
            return static_cast<std::size_t>(std::distance(cdf_.begin(), it));
        }
    }
    return 0;
}

std::size_t sample(const PairDistribution& dist, RandomStream& rng) {
    return PairSampler(dist)(rng);
}

}  // namespace pairstats
