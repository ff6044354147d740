#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "pairstats/detection.hpp"
#include "pairstats/distributions.hpp"

namespace pairstats {

enum class Observable { S1, S2, C };

std::string_view to_string(Observable observable) noexcept;
Observable parse_observable(std::string_view name);

/// Estimation of one pump constant from dark-corrected count curves.
struct FitProblem {
    std::vector<CountRecord> records;
    SetupConfig cfg;
    Family family = Family::Poissonian;
    std::vector<Observable> include{Observable::S1, Observable::S2, Observable::C};

    /// At least two records with distinct pump powers and a nonempty,
    /// duplicate-free observable set.
    void validate() const;
};

struct Residual {
    double pump_mw;
    Observable observable;
    double experimental;
    double theoretical;
    double weighted_sq_error;  ///< (E - T)^2 / E^2
};

/// A data point left out of the objective because its experimental value is
/// zero (relative weight undefined).
struct ExcludedPoint {
    double pump_mw;
    Observable observable;
};

struct Evaluation {
    double objective = 0.0;
    std::vector<Residual> residuals;
    std::vector<ExcludedPoint> excluded;
};

/// Relative-weighted sum of squares with its per-point breakdown. Throws
/// NumericError when every point is excluded.
Evaluation evaluate(const FitProblem& problem, double constant_per_mw);

double objective(const FitProblem& problem, double constant_per_mw);

inline constexpr double kDefaultBracketLo = 0.1;
inline constexpr double kDefaultBracketHi = 1000.0;
inline constexpr double kDefaultFitTolerance = 1e-6;
inline constexpr std::size_t kCoarseGridPoints = 64;

struct FitResult {
    double constant_per_mw = 0.0;
    double objective = 0.0;
    std::vector<Residual> residuals;
    std::vector<ExcludedPoint> excluded;
    std::size_t iterations = 0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    /// The minimum sits on the bracket boundary; widen the bracket.
    bool edge_warning = false;
};

/*!
 * Minimizes the objective over [lo, hi] mW^-1.
 *
 * A logarithmic grid of kCoarseGridPoints localizes the minimum, then golden
 * section refines the two cells around the best grid point until the
 * interval width drops below tol times the current estimate.
 */
FitResult fit(const FitProblem& problem, double lo = kDefaultBracketLo,
              double hi = kDefaultBracketHi, double tol = kDefaultFitTolerance);

struct CurvePoint {
    double pump_mw;
    double s1;
    double s2;
    double c;
};

/// Forward model on a pump grid (mW).
std::vector<CurvePoint> predict_curves(const SetupConfig& cfg, Family family,
                                       double constant_per_mw,
                                       std::span<const double> pump_grid_mw);

}  // namespace pairstats
