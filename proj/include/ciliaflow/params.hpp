#pragma once

#include <numbers>

namespace ciliaflow {

/// Physical constants of the bead chain, SI units throughout.
///
/// Defaults are the reference parameter set: 20 superparamagnetic beads of
/// radius 0.5 um in water, driven by a 70 mT field. The bond rest length
/// defaults to three bead radii.
struct PhysicalParams {
  int n = 20;                              // mobile bead count
  double a = 0.5e-6;                       // bead radius (m)
  double chi = 1.704;                      // magnetic susceptibility
  double eta = 1e-3;                       // viscosity (N s / m^2)
  double k_stretch = 1.5e-9;               // stretching coefficient (N/m)
  double A_bend = 4.5e-22;                 // bending rigidity
  double B_field = 0.07;                   // field magnitude (T)
  double mu0 = 4e-7 * std::numbers::pi;    // vacuum permeability (N/A^2)
  double l_rest = 1.5e-6;                  // bond rest length (m)

  /// Prefactor of the pairwise dipole energy, 4 pi a^6 (chi B)^2 / (9 mu0).
  double dipole_energy_prefactor() const noexcept;

  /// Prefactor of the pairwise dipole force; three times the energy prefactor.
  double dipole_force_prefactor() const noexcept { return 3.0 * dipole_energy_prefactor(); }

  /// Throws ValidationError naming the first offending field.
  void validate() const;

  bool operator==(const PhysicalParams&) const = default;
};

/// Separations below this are treated as coincident points.
inline constexpr double kMinSeparation = 1e-12;

}  // namespace ciliaflow
