#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace pairstats {

/// Exact SI speed of light, m/s.
inline constexpr double kSpeedOfLight = 2.99792458e8;

/// Gaussian band-pass filter; half-maximum wavelengths center +/- bandwidth/2.
class FilterSpec {
  public:
    FilterSpec(double center_nm, double bandwidth_nm);

    double center_nm() const noexcept { return center_nm_; }
    double bandwidth_nm() const noexcept { return bandwidth_nm_; }

    /// Long-wavelength half-maximum point, center + B/2.
    double lambda1_nm() const noexcept { return center_nm_ + bandwidth_nm_ / 2.0; }
    /// Short-wavelength half-maximum point, center - B/2.
    double lambda2_nm() const noexcept { return center_nm_ - bandwidth_nm_ / 2.0; }

    /// Optical frequencies c / lambda_k, Hz.
    double f1_hz() const noexcept;
    double f2_hz() const noexcept;

  private:
    double center_nm_;
    double bandwidth_nm_;
};

struct PumpModel {
    double coherence_time_ps = 40.0;
    double pulse_rate_hz = 8e5;
    double wavelength_nm = 774.0;

    void validate() const;
};

/// Relative spectral density at angular frequency omega (rad/s); 1 at the
/// center 2*pi*(f1 + f2)/2 and 1/2 at 2*pi*f1 and 2*pi*f2.
double filter_spectrum(const FilterSpec& filter, double omega);

/// Coherence time (s) of transform-limited pulses with the filter's Gaussian
/// spectrum, taken as the intensity FWHM: (4 lc^2 - B^2) ln2 / (2 pi c B).
double coherence_time(const FilterSpec& filter);

/// Narrow-band form 2 ln2 / pi * lc^2 / (c B). Relative gap to
/// coherence_time is exactly (B / 2 lc)^2.
double coherence_time_approx(const FilterSpec& filter);

enum class Regime { ManyProcesses, SingleProcess, Intermediate };

std::string_view to_string(Regime regime) noexcept;

/// Ratio thresholds on pump / down-converted coherence time.
struct RegimeThresholds {
    double many_processes = 10.0;  ///< ratio >= this: ManyProcesses
    double single_process = 2.0;   ///< ratio <= this: SingleProcess
};

Regime regime(const PumpModel& pump, const FilterSpec& filter,
              RegimeThresholds thresholds = {});

struct SweepPoint {
    double center_nm;
    double bandwidth_nm;
    double tau_fs;
};

/// Coherence time versus bandwidth for each center wavelength. Bandwidths
/// are spaced geometrically from b_min to b_max inclusive (npoints >= 2), or
/// just b_min when npoints == 1.
std::vector<SweepPoint> coherence_sweep(std::span<const double> centers_nm, double b_min_nm,
                                        double b_max_nm, std::size_t npoints);

}  // namespace pairstats
