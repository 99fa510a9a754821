#include "ciliaflow/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "ciliaflow/error.hpp"
#include "ciliaflow/hydrodynamics.hpp"

namespace ciliaflow {

BeadVector velocity_field(const ChainState& state, const PhysicalParams& params, FieldAngle angle) {
  const BondGeometry geo = bond_geometry(state);
  return grand_mobility(geo, params).apply(total_force(geo, params, angle));
}

double blowup_limit(const PhysicalParams& params) { return 1e3 * params.n * params.l_rest; }

namespace {

void check_finite(const Eigen::VectorXd& x, double limit, double t) {
  if (!x.allFinite() || x.cwiseAbs().maxCoeff() > limit) {
    throw Error(ErrorCode::numerical_blowup,
                "state left the admissible region at t = " + std::to_string(t));
  }
}

}  // namespace

ChainState Trajectory::state_at(double t) const {
  const double s = std::clamp((t - grid.t0) / grid.dt(), 0.0, static_cast<double>(grid.steps));
  const int m = std::min(static_cast<int>(std::floor(s)), grid.steps - 1);
  const double w = s - m;
  if (w == 0.0) return states[static_cast<size_t>(m)];
  const double h = grid.dt();
  const double w2 = w * w;
  const double w3 = w2 * w;
  const double h00 = 2 * w3 - 3 * w2 + 1;
  const double h10 = w3 - 2 * w2 + w;
  const double h01 = -2 * w3 + 3 * w2;
  const double h11 = w3 - w2;
  const auto& x0 = states[static_cast<size_t>(m)].flat();
  const auto& x1 = states[static_cast<size_t>(m + 1)].flat();
  const auto& v0 = velocities[static_cast<size_t>(m)];
  const auto& v1 = velocities[static_cast<size_t>(m + 1)];
  return ChainState(h00 * x0 + h10 * h * v0 + h01 * x1 + h11 * h * v1);
}

Trajectory integrate_forward(const ChainState& x0, const ControlSignal& control,
                             const TimeGrid& grid, const PhysicalParams& params) {
  if (x0.size() != params.n) throw Error(ErrorCode::invalid_argument, "initial state has wrong bead count");
  const double limit = blowup_limit(params);
  const double h = grid.dt();

  Trajectory traj;
  traj.grid = grid;
  traj.control = control;
  traj.states.reserve(static_cast<size_t>(grid.nodes()));
  traj.forces.reserve(static_cast<size_t>(grid.nodes()));
  traj.velocities.reserve(static_cast<size_t>(grid.nodes()));
  traj.energies.reserve(static_cast<size_t>(grid.nodes()));

  auto record = [&](const ChainState& x, double t) {
    const BondGeometry geo = bond_geometry(x);
    const FieldAngle angle{control(t)};
    BeadVector force = total_force(geo, params, angle);
    traj.velocities.push_back(grand_mobility(geo, params).apply(force));
    traj.forces.push_back(std::move(force));
    traj.energies.push_back({stretching_energy(geo, params), bending_energy(geo, params),
                             dipole_energy(geo, params, angle)});
    traj.states.push_back(x);
  };
  auto rhs = [&](const Eigen::VectorXd& x, double t) {
    check_finite(x, limit, t);
    return velocity_field(ChainState(x), params, FieldAngle{control(t)});
  };

  check_finite(x0.flat(), limit, grid.t0);
  record(x0, grid.t0);
  for (int m = 0; m < grid.steps; ++m) {
    const double t = grid.time(m);
    const Eigen::VectorXd& x = traj.states.back().flat();
    const BeadVector& k1 = traj.velocities.back();
    const BeadVector k2 = rhs(x + 0.5 * h * k1, t + 0.5 * h);
    const BeadVector k3 = rhs(x + 0.5 * h * k2, t + 0.5 * h);
    const BeadVector k4 = rhs(x + h * k3, t + h);
    Eigen::VectorXd next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    check_finite(next, limit, grid.time(m + 1));
    record(ChainState(std::move(next)), grid.time(m + 1));
  }
  return traj;
}

Eigen::MatrixXd state_jacobian(const ChainState& state, const PhysicalParams& params,
                               FieldAngle angle, double h_rel) {
  const int dim = 2 * state.size();
  const double h = h_rel * params.l_rest;
  Eigen::MatrixXd jac(dim, dim);
  Eigen::VectorXd x = state.flat();
  for (int c = 0; c < dim; ++c) {
    const double saved = x[c];
    x[c] = saved + h;
    const BeadVector plus = velocity_field(ChainState(x), params, angle);
    x[c] = saved - h;
    const BeadVector minus = velocity_field(ChainState(x), params, angle);
    x[c] = saved;
    jac.col(c) = (plus - minus) / (2.0 * h);
  }
  return jac;
}

}  // namespace ciliaflow
