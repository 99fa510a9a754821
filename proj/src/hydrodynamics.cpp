#include "ciliaflow/hydrodynamics.hpp"

#include <algorithm>
#include <numbers>

#include "ciliaflow/error.hpp"

namespace ciliaflow {

Mat2 self_mobility(const PhysicalParams& params) {
  return Mat2::Identity() / (6.0 * std::numbers::pi * params.eta * params.a);
}

Mat2 pair_mobility(double r, const Vec2& e, const PhysicalParams& params) {
  if (!(r >= kMinSeparation)) {
    throw Error(ErrorCode::separation_too_small, "pair separation below guard");
  }
  const Mat2 outer = e * e.transpose();
  const Mat2 id = Mat2::Identity();
  const double ratio = params.a * params.a / (2.0 * r * r);
  return (0.75 * (id + outer) + ratio * (id - 3.0 * outer)) /
         (6.0 * std::numbers::pi * params.eta * r);
}

MobilityMatrix grand_mobility(const BondGeometry& geo, const PhysicalParams& params) {
  const int n = geo.beads;
  Eigen::MatrixXd m(2 * n, 2 * n);
  const Mat2 self = self_mobility(params);
  for (int i = 0; i < n; ++i) {
    m.block<2, 2>(2 * i, 2 * i) = self;
    for (int j = i + 1; j < n; ++j) {
      const Mat2 blk = pair_mobility(geo.separation(i, j), geo.unit(i, j), params);
      m.block<2, 2>(2 * i, 2 * j) = blk;
      m.block<2, 2>(2 * j, 2 * i) = blk.transpose();
    }
  }
  return MobilityMatrix(std::move(m));
}

MobilityMatrix grand_mobility(const ChainState& state, const PhysicalParams& params) {
  return grand_mobility(bond_geometry(state), params);
}

double blake_kernel(double z, double z_prime, const PhysicalParams& params) {
  if (z < 0.0 || z_prime < 0.0) throw Error(ErrorCode::negative_height, "heights must be >= 0");
  return std::min(z, z_prime) / params.eta;
}

}  // namespace ciliaflow
