#include "pairstats/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pairstats/errors.hpp"

namespace pairstats {

namespace {

constexpr double kNm = 1e-9;

}  // namespace

FilterSpec::FilterSpec(double center_nm, double bandwidth_nm)
    : center_nm_(center_nm), bandwidth_nm_(bandwidth_nm) {
    if (!std::isfinite(center_nm) || center_nm <= 0.0) {
        throw ValidationError("filter center_nm must be positive");
    }
    if (!std::isfinite(bandwidth_nm) || bandwidth_nm <= 0.0 ||
        bandwidth_nm >= 2.0 * center_nm) {
        throw ValidationError("filter bandwidth_nm must lie in (0, 2 * center_nm)");
    }
}

double FilterSpec::f1_hz() const noexcept { return kSpeedOfLight / (lambda1_nm() * kNm); }

double FilterSpec::f2_hz() const noexcept { return kSpeedOfLight / (lambda2_nm() * kNm); }

void PumpModel::validate() const {
    if (!(coherence_time_ps > 0.0) || !(pulse_rate_hz > 0.0) || !(wavelength_nm > 0.0)) {
        throw ValidationError("pump coherence_time_ps, pulse_rate_hz and wavelength_nm must be positive");
    }
}

double filter_spectrum(const FilterSpec& filter, double omega) {
    using std::numbers::pi;
    const double f1 = filter.f1_hz();
    const double f2 = filter.f2_hz();
    const double offset = omega - pi * (f1 + f2);
    const double width = pi * (f1 - f2);
    return std::exp(-offset * offset * std::numbers::ln2 / (width * width));
}

double coherence_time(const FilterSpec& filter) {
    const double lc = filter.center_nm() * kNm;
    const double b = filter.bandwidth_nm() * kNm;
    return (4.0 * lc * lc - b * b) * std::numbers::ln2 /
           (2.0 * std::numbers::pi * kSpeedOfLight * b);
}

double coherence_time_approx(const FilterSpec& filter) {
    const double lc = filter.center_nm() * kNm;
    const double b = filter.bandwidth_nm() * kNm;
    return 2.0 * std::numbers::ln2 / std::numbers::pi * lc * lc / (kSpeedOfLight * b);
}

std::string_view to_string(Regime regime) noexcept {
    switch (regime) {
        case Regime::ManyProcesses: return "many_processes";
        case Regime::SingleProcess: return "single_process";
        case Regime::Intermediate: return "intermediate";
    }
    return "unknown";
}

Regime regime(const PumpModel& pump, const FilterSpec& filter, RegimeThresholds thresholds) {
    pump.validate();
    if (!(thresholds.many_processes > 1.0) ||
        !(thresholds.single_process < thresholds.many_processes)) {
        throw ValidationError("regime thresholds need many_processes > 1 and single_process < many_processes");
    }
    const double ratio = pump.coherence_time_ps * 1e-12 / coherence_time(filter);
    if (ratio >= thresholds.many_processes) return Regime::ManyProcesses;
    if (ratio <= thresholds.single_process) return Regime::SingleProcess;
    return Regime::Intermediate;
}

std::vector<SweepPoint> coherence_sweep(std::span<const double> centers_nm, double b_min_nm,
                                        double b_max_nm, std::size_t npoints) {
    if (centers_nm.empty()) throw ValidationError("sweep needs at least one center wavelength");
    if (npoints == 0) throw ValidationError("sweep needs at least one point");
    const double min_center = *std::min_element(centers_nm.begin(), centers_nm.end());
    if (!(b_min_nm > 0.0 && b_min_nm < b_max_nm && b_max_nm < 2.0 * min_center)) {
        throw ValidationError("sweep bandwidths need 0 < b_min < b_max < 2 * min(centers)");
    }

    std::vector<double> bandwidths(npoints);
    const double log_ratio = std::log(b_max_nm / b_min_nm);
    for (std::size_t i = 0; i < npoints; ++i) {
        if (i == 0) {
            bandwidths[i] = b_min_nm;
        } else if (i + 1 == npoints) {
            bandwidths[i] = b_max_nm;
        } else {
            const double frac = static_cast<double>(i) / static_cast<double>(npoints - 1);
            bandwidths[i] = b_min_nm * std::exp(frac * log_ratio);
        }
    }

    std::vector<SweepPoint> table;
    table.reserve(centers_nm.size() * npoints);
    for (double center : centers_nm) {
        for (double b : bandwidths) {
            table.push_back({center, b, coherence_time(FilterSpec(center, b)) * 1e15});
        }
    }
    return table;
}

}  // namespace pairstats
