#include "ciliaflow/chain.hpp"

#include <string>

#include "ciliaflow/error.hpp"

namespace ciliaflow {

ChainState::ChainState(Eigen::VectorXd flat) : flat_(std::move(flat)) {
  if (flat_.size() % 2 != 0) {
    throw Error(ErrorCode::invalid_argument, "chain state needs an even number of coordinates");
  }
  if (!flat_.allFinite()) throw Error(ErrorCode::invalid_argument, "chain state is not finite");
}

ChainState ChainState::rest(const PhysicalParams& params) {
  Eigen::VectorXd flat = Eigen::VectorXd::Zero(2 * params.n);
  for (int i = 0; i < params.n; ++i) flat[2 * i + 1] = params.l_rest * (i + 1);
  return ChainState(std::move(flat));
}

BondGeometry bond_geometry(const ChainState& state) {
  const int n = state.size();
  BondGeometry geo;
  geo.beads = n;
  geo.length.resize(static_cast<size_t>(n));
  geo.tangent.resize(static_cast<size_t>(n));
  for (int b = 0; b < n; ++b) {
    const Vec2 d = state.point(b + 1) - state.point(b);
    const double l = d.norm();
    if (!(l >= kMinSeparation)) {
      throw Error(ErrorCode::coincident_beads, "bond " + std::to_string(b + 1) + " has zero length");
    }
    geo.length[static_cast<size_t>(b)] = l;
    geo.tangent[static_cast<size_t>(b)] = d / l;
  }
  geo.separation = Eigen::MatrixXd::Zero(n, n);
  geo.unit_storage.assign(static_cast<size_t>(n * n), Vec2::Zero());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Vec2 d = state.bead(j) - state.bead(i);
      const double r = d.norm();
      if (!(r >= kMinSeparation)) {
        throw Error(ErrorCode::coincident_beads,
                    "beads " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " coincide");
      }
      geo.separation(i, j) = geo.separation(j, i) = r;
      geo.unit_storage[static_cast<size_t>(i * n + j)] = d / r;
      geo.unit_storage[static_cast<size_t>(j * n + i)] = -d / r;
    }
  }
  return geo;
}

namespace {

// Converts per-bond energy gradients dE/d(bond vector) into bead forces.
// Bond b runs from point b (anchor when b == 0) to point b + 1 (bead b).
BeadVector bond_gradient_to_force(const std::vector<Vec2>& grad, int n) {
  BeadVector force = BeadVector::Zero(2 * n);
  for (int b = 0; b < n; ++b) {
    force.segment<2>(2 * b) -= grad[static_cast<size_t>(b)];
    if (b > 0) force.segment<2>(2 * (b - 1)) += grad[static_cast<size_t>(b)];
  }
  return force;
}

double bending_coefficient(const PhysicalParams& params) { return params.A_bend / params.l_rest; }

}  // namespace

double stretching_energy(const ChainState& state, const PhysicalParams& params) {
  return stretching_energy(bond_geometry(state), params);
}

double bending_energy(const ChainState& state, const PhysicalParams& params) {
  return bending_energy(bond_geometry(state), params);
}

double dipole_energy(const ChainState& state, const PhysicalParams& params, FieldAngle angle) {
  return dipole_energy(bond_geometry(state), params, angle);
}

double stretching_energy(const BondGeometry& geo, const PhysicalParams& params) {
  double sum = 0.0;
  for (double l : geo.length) {
    const double d = l - params.l_rest;
    sum += d * d;
  }
  return 0.5 * params.k_stretch * sum;
}

double bending_energy(const BondGeometry& geo, const PhysicalParams& params) {
  double sum = 0.0;
  for (size_t b = 0; b + 1 < geo.tangent.size(); ++b) sum += 1.0 - geo.tangent[b].dot(geo.tangent[b + 1]);
  return bending_coefficient(params) * sum;
}

double dipole_energy(const BondGeometry& geo, const PhysicalParams& params, FieldAngle angle) {
  const Vec2 p = angle.direction();
  double sum = 0.0;
  for (int i = 0; i < geo.beads; ++i) {
    for (int j = i + 1; j < geo.beads; ++j) {
      const double r = geo.separation(i, j);
      const double c = p.dot(geo.unit(i, j));
      sum += (1.0 - 3.0 * c * c) / (r * r * r);
    }
  }
  return params.dipole_energy_prefactor() * sum;
}

double total_energy(const ChainState& state, const PhysicalParams& params, FieldAngle angle) {
  return stretching_energy(state, params) + bending_energy(state, params) +
         dipole_energy(state, params, angle);
}

BeadVector stretching_force(const BondGeometry& geo, const PhysicalParams& params) {
  std::vector<Vec2> grad(geo.length.size());
  for (size_t b = 0; b < grad.size(); ++b) {
    grad[b] = params.k_stretch * (geo.length[b] - params.l_rest) * geo.tangent[b];
  }
  return bond_gradient_to_force(grad, geo.beads);
}

BeadVector bending_force(const BondGeometry& geo, const PhysicalParams& params) {
  const double coeff = bending_coefficient(params);
  std::vector<Vec2> grad(geo.length.size(), Vec2::Zero());
  // d(t_b . t_c)/d(bond_b) = (t_c - (t_b . t_c) t_b) / l_b
  for (size_t b = 0; b + 1 < grad.size(); ++b) {
    const Vec2& tb = geo.tangent[b];
    const Vec2& tc = geo.tangent[b + 1];
    const double c = tb.dot(tc);
    grad[b] -= coeff * (tc - c * tb) / geo.length[b];
    grad[b + 1] -= coeff * (tb - c * tc) / geo.length[b + 1];
  }
  return bond_gradient_to_force(grad, geo.beads);
}

BeadVector dipole_force(const BondGeometry& geo, const PhysicalParams& params, FieldAngle angle) {
  const int n = geo.beads;
  const double cf = params.dipole_force_prefactor();
  const Vec2 p = angle.direction();
  BeadVector force = BeadVector::Zero(2 * n);

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Vec2& e = geo.unit(i, j);
      const double r = geo.separation(i, j);
      const double r2 = r * r;
      const double c = p.dot(e);
      // Force on j from i; i receives the reaction.
      const Vec2 f = (cf / (r2 * r2)) * (2.0 * c * p + (1.0 - 5.0 * c * c) * e);
      force.segment<2>(2 * j) += f;
      force.segment<2>(2 * i) -= f;
    }
  }
  return force;
}

BeadVector dipole_force_dphi(const BondGeometry& geo, const PhysicalParams& params,
                             FieldAngle angle) {
  const int n = geo.beads;
  const double cf = params.dipole_force_prefactor();
  const Vec2 p = angle.direction();
  const Vec2 dp = angle.direction_derivative();
  BeadVector out = BeadVector::Zero(2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Vec2& e = geo.unit(i, j);
      const double r = geo.separation(i, j);
      const double r2 = r * r;
      const double c = p.dot(e);
      const double dc = dp.dot(e);
      const Vec2 df = (cf / (r2 * r2)) * (2.0 * dc * p + 2.0 * c * dp - 10.0 * c * dc * e);
      out.segment<2>(2 * j) += df;
      out.segment<2>(2 * i) -= df;
    }
  }
  return out;
}

BeadVector total_force(const BondGeometry& geo, const PhysicalParams& params, FieldAngle angle) {
  return stretching_force(geo, params) + bending_force(geo, params) + dipole_force(geo, params, angle);
}

BeadVector stretching_force(const ChainState& state, const PhysicalParams& params) {
  return stretching_force(bond_geometry(state), params);
}

BeadVector bending_force(const ChainState& state, const PhysicalParams& params) {
  return bending_force(bond_geometry(state), params);
}

BeadVector dipole_force(const ChainState& state, const PhysicalParams& params, FieldAngle angle) {
  return dipole_force(bond_geometry(state), params, angle);
}

BeadVector total_force(const ChainState& state, const PhysicalParams& params, FieldAngle angle) {
  return total_force(bond_geometry(state), params, angle);
}

BeadVector dipole_force_dphi(const ChainState& state, const PhysicalParams& params,
                             FieldAngle angle) {
  return dipole_force_dphi(bond_geometry(state), params, angle);
}

}  // namespace ciliaflow
