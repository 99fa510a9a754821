#include "ciliaflow/pumping.hpp"

#include "ciliaflow/error.hpp"

namespace ciliaflow {

double flow_integrand(const ChainState& state, const BeadVector& force) {
  double sum = 0.0;
  // Flattened layout (y_1, z_1, ...): z_i sits at 2i + 1, F_y,i at 2i.
  const Eigen::VectorXd& x = state.flat();
  for (int i = 0; i < state.size(); ++i) sum += x[2 * i + 1] * force[2 * i];
  return sum;
}

double flow_integrand(const ChainState& state, const PhysicalParams& params, FieldAngle angle) {
  return flow_integrand(state, total_force(state, params, angle));
}

PumpingResult pumping_performance(const Trajectory& traj, const PhysicalParams& params) {
  if (traj.nodes() < 2 || traj.forces.size() != traj.states.size()) {
    throw Error(ErrorCode::empty_trajectory, "trajectory has fewer than two nodes");
  }
  const int last = traj.nodes() - 1;
  double integral = 0.0;
  for (int m = 0; m <= last; ++m) {
    const double w = (m == 0 || m == last) ? 0.5 : 1.0;
    integral += w * flow_integrand(traj.states[static_cast<size_t>(m)],
                                   traj.forces[static_cast<size_t>(m)]);
  }
  integral *= traj.grid.dt();

  PumpingResult out;
  out.pumping_raw = integral / traj.grid.horizon();
  out.pumping_flow = out.pumping_raw / params.eta;
  out.objective = -out.pumping_flow;
  return out;
}

ObjectiveValue objective(const ControlSignal& control, const ChainState& x0, const TimeGrid& grid,
                         const PhysicalParams& params) {
  ObjectiveValue out;
  out.trajectory = integrate_forward(x0, control, grid, params);
  out.pumping = pumping_performance(out.trajectory, params);
  out.J = out.pumping.objective;
  return out;
}

}  // namespace ciliaflow
