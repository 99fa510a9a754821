#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "ciliaflow/params.hpp"

namespace ciliaflow {

using Vec2 = Eigen::Vector2d;

/// Flattened per-bead vectors in the order (y_1, z_1, ..., y_n, z_n).
/// Used for forces (N), velocities (m/s) and force derivatives.
using BeadVector = Eigen::VectorXd;

/// Field direction measured from the z axis. p = (sin phi, cos phi).
struct FieldAngle {
  double phi = 0.0;

  Vec2 direction() const { return {std::sin(phi), std::cos(phi)}; }
  /// d(direction)/d(phi).
  Vec2 direction_derivative() const { return {std::cos(phi), -std::sin(phi)}; }
};

/// Planar positions of the mobile beads. The immobile anchor at the origin
/// is implicit and precedes bead 1.
class ChainState {
 public:
  ChainState() = default;
  /// Takes (y_1, z_1, ..., y_n, z_n). Throws on odd length or non-finite data.
  explicit ChainState(Eigen::VectorXd flat);

  /// Straight chain along z at rest spacing: (0, l, 0, 2l, ..., 0, n l).
  static ChainState rest(const PhysicalParams& params);

  int size() const noexcept { return static_cast<int>(flat_.size() / 2); }
  /// Bead i, 0-based over the mobile beads.
  Vec2 bead(int i) const { return flat_.segment<2>(2 * i); }
  /// Point j of the full chain: j = 0 is the anchor, j >= 1 is bead j - 1.
  Vec2 point(int j) const { return j == 0 ? Vec2::Zero() : bead(j - 1); }

  const Eigen::VectorXd& flat() const noexcept { return flat_; }

 private:
  Eigen::VectorXd flat_;
};

/// Bond lengths and tangents (bond i joins point i-1 to point i, i = 1..n,
/// stored 0-based) and all mobile pair separations.
struct BondGeometry {
  std::vector<double> length;
  std::vector<Vec2> tangent;
  // Dense n x n; separation(i, j) = |x_j - x_i|, unit(i, j) = (x_j - x_i) / separation.
  Eigen::MatrixXd separation;
  std::vector<Vec2> unit_storage;
  int beads = 0;

  const Vec2& unit(int i, int j) const { return unit_storage[static_cast<size_t>(i * beads + j)]; }
};

BondGeometry bond_geometry(const ChainState& state);

double stretching_energy(const ChainState& state, const PhysicalParams& params);
double bending_energy(const ChainState& state, const PhysicalParams& params);
double dipole_energy(const ChainState& state, const PhysicalParams& params, FieldAngle angle);
double total_energy(const ChainState& state, const PhysicalParams& params, FieldAngle angle);

BeadVector stretching_force(const ChainState& state, const PhysicalParams& params);
BeadVector bending_force(const ChainState& state, const PhysicalParams& params);
BeadVector dipole_force(const ChainState& state, const PhysicalParams& params, FieldAngle angle);
BeadVector total_force(const ChainState& state, const PhysicalParams& params, FieldAngle angle);

/// d(dipole_force)/d(phi). Only the dipole term depends on the field angle.
BeadVector dipole_force_dphi(const ChainState& state, const PhysicalParams& params,
                             FieldAngle angle);

// Variants that reuse an already computed geometry.
double stretching_energy(const BondGeometry& geo, const PhysicalParams& params);
double bending_energy(const BondGeometry& geo, const PhysicalParams& params);
double dipole_energy(const BondGeometry& geo, const PhysicalParams& params, FieldAngle angle);
BeadVector stretching_force(const BondGeometry& geo, const PhysicalParams& params);
BeadVector bending_force(const BondGeometry& geo, const PhysicalParams& params);
BeadVector dipole_force(const BondGeometry& geo, const PhysicalParams& params, FieldAngle angle);
BeadVector total_force(const BondGeometry& geo, const PhysicalParams& params, FieldAngle angle);
BeadVector dipole_force_dphi(const BondGeometry& geo, const PhysicalParams& params,
                             FieldAngle angle);

}  // namespace ciliaflow
