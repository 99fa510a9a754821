#pragma once

#include "ciliaflow/dynamics.hpp"

namespace ciliaflow {

/// Time-averaged integrated flow above the chain, in two unit conventions.
struct PumpingResult {
  double pumping_raw = 0.0;   // (1/T) int sum z_i F_y,i dt, N m
  double pumping_flow = 0.0;  // pumping_raw / eta, m^3/s
  double objective = 0.0;     // -pumping_flow (minimized)
};

/// sum_i z_i F_y,i for the given state and field angle (N m).
double flow_integrand(const ChainState& state, const PhysicalParams& params, FieldAngle angle);

/// Same sum from an already evaluated force vector.
double flow_integrand(const ChainState& state, const BeadVector& force);

/// Trapezoid rule of the flow integrand over the trajectory grid, divided by
/// the horizon. Throws EmptyTrajectory for fewer than two nodes.
PumpingResult pumping_performance(const Trajectory& traj, const PhysicalParams& params);

struct ObjectiveValue {
  double J = 0.0;
  PumpingResult pumping;
  Trajectory trajectory;
};

/// Forward solve plus pumping; J = -pumping_flow.
ObjectiveValue objective(const ControlSignal& control, const ChainState& x0, const TimeGrid& grid,
                         const PhysicalParams& params);

}  // namespace ciliaflow
