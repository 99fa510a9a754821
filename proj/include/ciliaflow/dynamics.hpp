#pragma once

#include <vector>

#include <Eigen/Core>

#include "ciliaflow/chain.hpp"
#include "ciliaflow/control.hpp"

namespace ciliaflow {

struct EnergySnapshot {
  double stretching = 0.0;
  double bending = 0.0;
  double dipole = 0.0;

  double total() const noexcept { return stretching + bending + dipole; }
};

/// Forward solution sampled at every node of the grid.
struct Trajectory {
  TimeGrid grid;
  ControlSignal control;
  std::vector<ChainState> states;
  std::vector<BeadVector> forces;      // total force at each node
  std::vector<BeadVector> velocities;  // state derivative at each node
  std::vector<EnergySnapshot> energies;

  int nodes() const noexcept { return static_cast<int>(states.size()); }

  /// State at an arbitrary time inside the grid: cubic Hermite interpolation
  /// between the bracketing nodes using the stored node velocities.
  ChainState state_at(double t) const;
};

/// Chain velocity M(x) F(x, phi), flattened.
BeadVector velocity_field(const ChainState& state, const PhysicalParams& params, FieldAngle angle);

/// Coordinates beyond this magnitude count as a blown-up solve.
double blowup_limit(const PhysicalParams& params);

/// Classical fixed-step RK4 over the grid. The control is evaluated at RK
/// stage times through its interpolant.
Trajectory integrate_forward(const ChainState& x0, const ControlSignal& control,
                             const TimeGrid& grid, const PhysicalParams& params);

/// d(velocity_field)/dx by central differences with coordinate step
/// h_rel * l_rest. Column c is the response to coordinate c.
Eigen::MatrixXd state_jacobian(const ChainState& state, const PhysicalParams& params,
                               FieldAngle angle, double h_rel = 1e-6);

}  // namespace ciliaflow
