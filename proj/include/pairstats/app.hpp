#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pairstats/coherence.hpp"
#include "pairstats/detection.hpp"
#include "pairstats/distributions.hpp"
#include "pairstats/fitting.hpp"
#include "pairstats/waveguide.hpp"

namespace pairstats::app {

inline constexpr std::string_view kCountsHeader = "pump_mw,s1_raw,s2_raw,c_raw";
inline constexpr std::string_view kCurvesHeader = "pump_mw,s1_model,s2_model,c_model";
inline constexpr std::string_view kSweepHeader = "center_nm,bandwidth_nm,tau_fs";
inline constexpr std::size_t kCurvePoints = 200;

struct FitSettings {
    Family family = Family::Poissonian;
    double bracket_lo = kDefaultBracketLo;
    double bracket_hi = kDefaultBracketHi;
    double tolerance = kDefaultFitTolerance;
    std::vector<Observable> observables{Observable::S1, Observable::S2, Observable::C};
};

/// Parsed run configuration. When a waveguide block is present,
/// setup.t_total holds the transmittivity derived from it.
struct RunConfig {
    SetupConfig setup;
    std::optional<WaveguideSpec> waveguide;
    std::optional<FilterSpec> filter;
    std::optional<PumpModel> pump;
    FitSettings fit;
};

/*!
 * Reads a configuration document:
 *
 *     {
 *       "setup": {"pulse_rate_hz": 8e5, "eta1": 0.25, "eta2": 0.10,
 *                 "dark1_per_gate": 6e-5, "dark2_per_gate": 4e-4,
 *                 "topology": "beam_split_5050", "t_total": 0.148},
 *       "waveguide": {"length_cm": 3, "loss_pump_db_per_cm": 0.7, ...},
 *       "filter": {"center_nm": 1548, "bandwidth_nm": 30},
 *       "pump": {"coherence_time_ps": 40, "pulse_rate_hz": 8e5, "wavelength_nm": 774},
 *       "fit": {"family": "poissonian", "bracket_per_mw": [0.1, 1000],
 *               "tolerance": 1e-6, "observables": ["s1", "s2", "c"]}
 *     }
 *
 * Exactly one of setup.t_total and the waveguide block must be given.
 */
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);

/// Parses counts CSV text. Rows come back sorted by pump power.
std::vector<CountRecord> parse_counts(std::istream& in, std::string_view source = "<input>");
std::vector<CountRecord> ingest_counts(const std::filesystem::path& path);

struct FitRun {
    RunConfig config;
    std::vector<CountRecord> corrected;
    FitResult fit;
    std::vector<CurvePoint> curves;
    std::vector<std::string> warnings;
};

/// Dark-count correction, fit, and model curves on a kCurvePoints grid
/// spanning the data's pump range.
FitRun run_fit(const RunConfig& config, std::span<const CountRecord> raw);

nlohmann::json make_report(const FitRun& run);

/// n evenly spaced values from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, std::size_t n);

std::string format_number(double x);
std::string curves_csv(std::span<const CurvePoint> curves);
std::string sweep_csv(std::span<const SweepPoint> sweep);

/// End-to-end file pipeline. Warnings go to diag. Returns the process exit
/// status; errors are reported on diag, not thrown.
int run_fit_files(const std::filesystem::path& config_path,
                  const std::filesystem::path& data_path,
                  const std::filesystem::path& report_path,
                  const std::filesystem::path& curves_path, std::ostream& diag);

}  // namespace pairstats::app
