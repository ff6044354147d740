#include "pairstats/waveguide.hpp"

#include <algorithm>
#include <cmath>

#include "pairstats/errors.hpp"

namespace pairstats {

namespace {

constexpr double kEqualLossThreshold = 1e-12;

bool transmittivity_ok(double t) { return std::isfinite(t) && t > 0.0 && t <= 1.0; }

// (1 - exp(-a d)) / a with its a -> 0 limit d.
double decay_integral(double a, double d) {
    if (a == 0.0) return d;
    return -std::expm1(-a * d) / a;
}

}  // namespace

void WaveguideSpec::validate() const {
    if (!std::isfinite(length_cm) || length_cm <= 0.0) {
        throw ValidationError("waveguide length_cm must be positive");
    }
    if (!std::isfinite(loss_pump_db_per_cm) || loss_pump_db_per_cm < 0.0) {
        throw ValidationError("waveguide loss_pump_db_per_cm must be nonnegative");
    }
    if (!std::isfinite(loss_dc_db_per_cm) || loss_dc_db_per_cm < 0.0) {
        throw ValidationError("waveguide loss_dc_db_per_cm must be nonnegative");
    }
    if (!transmittivity_ok(t_ar)) throw ValidationError("waveguide t_ar must lie in (0, 1]");
    if (!transmittivity_ok(t_ext)) throw ValidationError("waveguide t_ext must lie in (0, 1]");
    if (!std::isfinite(kappa) || kappa <= 0.0) {
        throw ValidationError("waveguide kappa must be positive");
    }
}

double db_to_natural(double loss_db_per_cm) {
    if (!(loss_db_per_cm >= 0.0)) throw ValidationError("loss in dB must be nonnegative");
    return loss_db_per_cm * std::log(10.0) / 10.0;
}

double generated_photons(const WaveguideSpec& spec, double p0_mw) {
    spec.validate();
    if (!(p0_mw >= 0.0)) throw ValidationError("coupled pump power must be nonnegative");
    const double lp = db_to_natural(spec.loss_pump_db_per_cm);
    return 2.0 * spec.kappa * p0_mw * decay_integral(lp, spec.length_cm);
}

double facet_photons(const WaveguideSpec& spec, double p0_mw) {
    spec.validate();
    if (!(p0_mw >= 0.0)) throw ValidationError("coupled pump power must be nonnegative");
    const double lp = db_to_natural(spec.loss_pump_db_per_cm);
    const double ldc = db_to_natural(spec.loss_dc_db_per_cm);
    const double d = spec.length_cm;
    const double scale = 2.0 * spec.kappa * p0_mw;
    const double diff = ldc - lp;
    if (std::abs(diff) <= kEqualLossThreshold * std::max(lp, ldc)) {
        return scale * d * std::exp(-lp * d);
    }
    // exp(-L_p d) - exp(-L_dc d) = exp(-L_p d) * (1 - exp(-(L_dc - L_p) d))
    return scale * std::exp(-lp * d) * decay_integral(diff, d);
}

double internal_transmittivity(const WaveguideSpec& spec) {
    // The ratio can land an ulp above 1 when down-conversion is lossless.
    return std::min(1.0, facet_photons(spec, 1.0) / generated_photons(spec, 1.0));
}

double overall_transmittivity(const WaveguideSpec& spec) {
    return internal_transmittivity(spec) * spec.t_ar * spec.t_ext;
}

}  // namespace pairstats
