#pragma once

#include <complex>

#include "afcxpm/spectrum.hpp"

namespace afcxpm {

/// Dephasing factor e^{-π²/(2 ln2 F²)} of Gaussian teeth at the first echo.
double dephasing_factor(double finesse);

/// η = (1 − e^{−d/F})² e^{−π²/(2 ln2 F²)}. Requires d ≥ 0, F > 0.
double recall_efficiency(double d, double finesse);

/// η e^{−d_bg}: a flat background OD under the comb attenuates the echo on
/// top of the comb-limited efficiency.
double recall_efficiency_with_background(double d, double finesse, double background_od);

/// ∂η/∂d of recall_efficiency.
double recall_efficiency_d_derivative(double d, double finesse);

/// Gaussian probe; `duration` is the intensity FWHM.
struct ProbePulse {
    double duration = 10e-9;  // s
};

/// Intensity-spectrum FWHM of the probe, in Hz.
double probe_bandwidth_hz(const ProbePulse& probe);

struct EchoPrediction {
    std::complex<double> amplitude;  // projection of the output onto the input delayed by t_m
    double efficiency = 0.0;         // first-echo energy / input energy
    double transmitted = 0.0;        // directly transmitted energy / input energy
    bool bandwidth_warning = false;  // probe spectrum wider than the comb band
};

/// Linear-response prediction of the forward-recalled first echo.
///
/// The probe spectrum is multiplied by the causal transfer function whose
/// log-magnitude is −OD(δ)/2 (phase from the Kramers–Kronig partner built
/// with an FFT), then transformed back and integrated over the echo window
/// [t_m/2, 3t_m/2] after the input peak.
EchoPrediction probe_echo_amplitude(const SpectralFeature& feature, const ProbePulse& probe);

}  // namespace afcxpm
