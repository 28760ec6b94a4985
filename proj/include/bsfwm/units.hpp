#pragma once

#include <numbers>

namespace bsfwm {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kTwoPiC = 2.0 * std::numbers::pi * kSpeedOfLight;

// Angular frequency (rad/s) <-> vacuum wavelength. The library uses µm for
// fibre geometry and the dispersion model, nm for the four-wave-mixing layer.

constexpr double omega_from_um(double lambda_um) { return kTwoPiC / (lambda_um * 1e-6); }
constexpr double um_from_omega(double omega) { return kTwoPiC / omega * 1e6; }
constexpr double omega_from_nm(double lambda_nm) { return kTwoPiC / (lambda_nm * 1e-9); }
constexpr double nm_from_omega(double omega) { return kTwoPiC / omega * 1e9; }

/// Angular-frequency width of a wavelength interval `width_nm` centred on `center_nm`.
constexpr double omega_width_from_nm(double width_nm, double center_nm) {
  return kTwoPiC * (width_nm * 1e-9) / ((center_nm * 1e-9) * (center_nm * 1e-9));
}

}  // namespace bsfwm
