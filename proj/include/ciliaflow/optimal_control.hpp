#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ciliaflow/pumping.hpp"

namespace ciliaflow {

// ---------------------------------------------------------------------------
// Hamiltonian and costate
// ---------------------------------------------------------------------------

/// Running cost l = (1/(T eta)) sum z_i dE/dy_i, whose time integral is J.
double running_cost(const ChainState& state, const PhysicalParams& params, FieldAngle angle,
                    double horizon);

/// H = -l + lambda^T f with f the chain velocity.
double hamiltonian(const ChainState& state, FieldAngle angle, const Eigen::VectorXd& lambda,
                   const PhysicalParams& params, double horizon);

/// dH/du at one instant: -dl/dphi + lambda^T M dF/dphi.
double hamiltonian_dphi(const ChainState& state, FieldAngle angle, const Eigen::VectorXd& lambda,
                        const PhysicalParams& params, double horizon);

/// Coefficients of the linear costate equation lambda' = S lambda + g, with
/// S = -(df/dx)^T and g = dl/dx, both from central differences.
struct CostateCoefficients {
  Eigen::MatrixXd S;
  Eigen::VectorXd g;
};

CostateCoefficients costate_coefficients(const ChainState& state, const PhysicalParams& params,
                                         FieldAngle angle, double horizon, double h_rel = 1e-6);

/// -dH/dx at time t, with the state taken from the trajectory interpolant
/// and the angle from the trajectory's control.
Eigen::VectorXd adjoint_rhs(double t, const Eigen::VectorXd& lambda, const Trajectory& traj,
                            const PhysicalParams& params);

struct AdjointTrajectory {
  TimeGrid grid;
  std::vector<Eigen::VectorXd> lambda;  // one per grid node, lambda.back() == 0
};

/// Backward RK4 for lambda' = S(t) lambda + g(t), lambda(tf) = 0, on the
/// given grid. coefficients(t) supplies S and g; it is called once per node
/// and once per interval midpoint.
AdjointTrajectory solve_linear_terminal(
    const TimeGrid& grid, const std::function<CostateCoefficients(double)>& coefficients);

/// Costate of a forward solve. Throws NumericalBlowup on non-finite values.
AdjointTrajectory solve_adjoint(const Trajectory& traj, const PhysicalParams& params);

// ---------------------------------------------------------------------------
// Control gradient and PMP checks
// ---------------------------------------------------------------------------

struct GradientResult {
  Eigen::VectorXd gradient;  // dJ/d(knot), m^3/s per rad
  ObjectiveValue value;
  AdjointTrajectory adjoint;
  std::vector<double> dH_du;  // at every grid node
};

/// Forward solve, backward costate and the knot gradient
/// G_m = -int dH/du(t) w_m(t) dt (trapezoid on the grid).
GradientResult control_gradient(const ControlSignal& control, const ChainState& x0,
                                const TimeGrid& grid, const PhysicalParams& params);

/// Adjoint gradient against central differences of J, knot by knot.
struct GradientCheck {
  Eigen::VectorXd adjoint;
  Eigen::VectorXd finite_difference;
  std::vector<bool> checked;  // |FD| above the noise floor
  double max_rel_error = 0.0;  // max over checked knots of |adj - FD| / max|FD|
  bool passed = false;
};

struct GradientCheckSettings {
  double fd_step = 1e-4;  // rad
  double noise_floor = 1e-3;
  double tolerance = 1e-2;
  bool flip_sign = false;  // negates the adjoint gradient; test hook only
};

/// When every FD entry vanishes the check passes iff the adjoint gradient
/// is zero as well.
GradientCheck gradient_check(const ControlSignal& control, const ChainState& x0, const TimeGrid& grid,
                             const PhysicalParams& params, const GradientCheckSettings& settings = {});

struct PmpDiagnostics {
  double stationarity = 0.0;  // sup_t |dH/du|
  double h_variation = 0.0;   // max H - min H over the grid
};

PmpDiagnostics pmp_diagnostics(const Trajectory& traj, const AdjointTrajectory& adjoint,
                               const PhysicalParams& params);

// ---------------------------------------------------------------------------
// Fletcher-Reeves conjugate gradient
// ---------------------------------------------------------------------------

/// ||g_now||^2 / ||g_prev||^2. Throws DivisionByZero when g_prev vanishes.
double fr_beta(const Eigen::VectorXd& grad_now, const Eigen::VectorXd& grad_prev);

struct LineSearchSettings {
  double alpha_init = 1.0;
  double backtrack = 0.5;
  int max_trials = 30;

  bool operator==(const LineSearchSettings&) const = default;
};

struct LineSearchResult {
  double alpha = 0.0;
  double value = 0.0;
  int trials = 0;
};

/// Objective for line searches. Throwing ciliaflow::Error marks the trial
/// point as inadmissible; it is rejected like a non-decreasing trial.
using ValueFunction = std::function<double(const Eigen::VectorXd&)>;

/// Backtracking until value(u + alpha d) < value_u. Throws LineSearchFailure
/// after max_trials rejected trials.
LineSearchResult line_search(const Eigen::VectorXd& u, const Eigen::VectorXd& direction,
                             double value_u, const ValueFunction& value,
                             const LineSearchSettings& settings = {});

enum class Termination {
  gradient_tolerance,
  max_iterations,
  line_search_failure,
  numerical_failure,
};

const char* to_string(Termination reason) noexcept;

struct OptimizerSettings {
  double eps = 1e-5;
  int max_iter = 200;
  LineSearchSettings line_search;
  /// Unit of J used by the iteration (m^3/s); <= 0 selects
  /// characteristic_flow(params). Gradient norms and eps are in this unit.
  double objective_scale = 0.0;

  bool operator==(const OptimizerSettings&) const = default;
};

/// E_c / eta with E_c = k l^2 + A / l + C_E / l^3, the sum of the three
/// energy scales at rest spacing. Falls back to 1 when all vanish.
double characteristic_flow(const PhysicalParams& params);

/// Generic smooth problem for the CG driver. gradient(x) is only called
/// at points whose value was just computed successfully.
class CgProblem {
 public:
  virtual ~CgProblem() = default;
  virtual double value(const Eigen::VectorXd& x) = 0;
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& x) = 0;
};

struct CgIterate {
  int k = 0;
  double value = 0.0;
  double grad_norm = 0.0;
  double alpha = 0.0;  // step taken from this iterate (0 when none)
  double beta = 0.0;
  bool restarted = false;
  Eigen::VectorXd x;
};

struct CgResult {
  std::vector<CgIterate> iterates;
  Termination reason = Termination::max_iterations;
  std::string message;
  Eigen::VectorXd x;
};

/// Optional exact step rule; when empty the backtracking search is used.
using StepRule = std::function<LineSearchResult(const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                                                double value)>;

CgResult fletcher_reeves(CgProblem& problem, const Eigen::VectorXd& x0,
                         const OptimizerSettings& settings, const StepRule& step = {},
                         const std::function<void(const CgIterate&)>& on_iterate = {});

struct IterationRecord {
  int k = 0;
  double J = 0.0;             // m^3/s
  double J_scaled = 0.0;      // J / objective_scale
  double pumping_raw = 0.0;   // N m
  double pumping_flow = 0.0;  // m^3/s
  double grad_norm = 0.0;     // scaled units
  double alpha = 0.0;
  double beta = 0.0;
  bool restarted = false;
  ControlSignal control;
};

struct OptimizationReport {
  std::vector<IterationRecord> iterations;
  Termination reason = Termination::max_iterations;
  std::string message;
  double objective_scale = 0.0;
  PmpDiagnostics pmp;
  /// Control of the last recorded iterate. Throws EmptyTrajectory when the
  /// run failed before iteration 0 was recorded.
  ControlSignal best_control() const;
};

/// Fletcher-Reeves CG on the knot values of u0. Failures are reported
/// through the termination reason.
OptimizationReport optimize(const ControlSignal& u0, const ChainState& x0, const TimeGrid& grid,
                            const PhysicalParams& params, const OptimizerSettings& settings);

}  // namespace ciliaflow
