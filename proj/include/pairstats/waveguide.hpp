#pragma once

namespace pairstats {

/// Nonlinear waveguide and the optics behind it. Lengths in cm, losses in
/// dB/cm, kappa in pairs per mW.
struct WaveguideSpec {
    double length_cm = 3.0;
    double loss_pump_db_per_cm = 0.7;
    double loss_dc_db_per_cm = 0.35;
    double t_ar = 0.99;
    double t_ext = 0.17;
    double kappa = 1.0;

    void validate() const;
};

/// dB/cm to natural attenuation coefficient (cm^-1): L = dB * ln(10) / 10.
double db_to_natural(double loss_db_per_cm);

/// Mean photon number generated along the guide by one pump pulse carrying
/// coupled power p0_mw (pump decays as exp(-L_p x)).
double generated_photons(const WaveguideSpec& spec, double p0_mw);

/// Mean photon number reaching the back facet; down-converted photons born
/// at x decay as exp(-L_dc (d - x)). Uses the analytic limit when the two
/// loss coefficients coincide.
double facet_photons(const WaveguideSpec& spec, double p0_mw);

/// facet_photons / generated_photons, independent of kappa and p0.
double internal_transmittivity(const WaveguideSpec& spec);

/// internal_transmittivity * t_ar * t_ext.
double overall_transmittivity(const WaveguideSpec& spec);

}  // namespace pairstats
