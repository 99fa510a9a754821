#pragma once

#include <Eigen/Core>

#include "ciliaflow/chain.hpp"

namespace ciliaflow {

using Mat2 = Eigen::Matrix2d;

/// Dense 2n x 2n grand mobility. Block (i, j) maps the force on bead j to
/// the velocity of bead i, in m/(N s).
class MobilityMatrix {
 public:
  explicit MobilityMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {}

  int beads() const noexcept { return static_cast<int>(m_.rows() / 2); }
  Mat2 block(int i, int j) const { return m_.block<2, 2>(2 * i, 2 * j); }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }

  BeadVector apply(const BeadVector& force) const { return m_ * force; }

 private:
  Eigen::MatrixXd m_;
};

/// Stokes drag mobility of an isolated sphere, 1/(6 pi eta a) I.
Mat2 self_mobility(const PhysicalParams& params);

/// Rotne-Prager pair block on the (y, z) plane for separation r along unit
/// vector e. Throws SeparationTooSmall below kMinSeparation.
Mat2 pair_mobility(double r, const Vec2& e, const PhysicalParams& params);

MobilityMatrix grand_mobility(const ChainState& state, const PhysicalParams& params);
MobilityMatrix grand_mobility(const BondGeometry& geo, const PhysicalParams& params);

/// Laterally averaged Blake kernel min(z, z') / eta, in m^3/(N s).
double blake_kernel(double z, double z_prime, const PhysicalParams& params);

}  // namespace ciliaflow
