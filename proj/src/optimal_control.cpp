#include "ciliaflow/optimal_control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "ciliaflow/error.hpp"
#include "ciliaflow/hydrodynamics.hpp"

namespace ciliaflow {

double running_cost(const ChainState& state, const PhysicalParams& params, FieldAngle angle,
                    double horizon) {
  return -flow_integrand(state, params, angle) / (horizon * params.eta);
}

double hamiltonian(const ChainState& state, FieldAngle angle, const Eigen::VectorXd& lambda,
                   const PhysicalParams& params, double horizon) {
  const BondGeometry geo = bond_geometry(state);
  const BeadVector force = total_force(geo, params, angle);
  const double l = -flow_integrand(state, force) / (horizon * params.eta);
  return -l + lambda.dot(grand_mobility(geo, params).apply(force));
}

double hamiltonian_dphi(const ChainState& state, FieldAngle angle, const Eigen::VectorXd& lambda,
                        const PhysicalParams& params, double horizon) {
  const BondGeometry geo = bond_geometry(state);
  const BeadVector dforce = dipole_force_dphi(geo, params, angle);
  const double dl = -flow_integrand(state, dforce) / (horizon * params.eta);
  return -dl + lambda.dot(grand_mobility(geo, params).apply(dforce));
}

CostateCoefficients costate_coefficients(const ChainState& state, const PhysicalParams& params,
                                         FieldAngle angle, double horizon, double h_rel) {
  CostateCoefficients out;
  out.S = -state_jacobian(state, params, angle, h_rel).transpose();

  const int dim = 2 * state.size();
  const double h = h_rel * params.l_rest;
  out.g.resize(dim);
  Eigen::VectorXd x = state.flat();
  for (int c = 0; c < dim; ++c) {
    const double saved = x[c];
    x[c] = saved + h;
    const double plus = running_cost(ChainState(x), params, angle, horizon);
    x[c] = saved - h;
    const double minus = running_cost(ChainState(x), params, angle, horizon);
    x[c] = saved;
    out.g[c] = (plus - minus) / (2.0 * h);
  }
  return out;
}

Eigen::VectorXd adjoint_rhs(double t, const Eigen::VectorXd& lambda, const Trajectory& traj,
                            const PhysicalParams& params) {
  const CostateCoefficients c = costate_coefficients(traj.state_at(t), params,
                                                     FieldAngle{traj.control(t)},
                                                     traj.grid.horizon());
  return c.S * lambda + c.g;
}

AdjointTrajectory solve_linear_terminal(
    const TimeGrid& grid, const std::function<CostateCoefficients(double)>& coefficients) {
  const double h = grid.dt();
  AdjointTrajectory out;
  out.grid = grid;
  out.lambda.resize(static_cast<size_t>(grid.nodes()));

  CostateCoefficients upper = coefficients(grid.tf);
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(upper.g.size());
  out.lambda.back() = lambda;
  for (int m = grid.steps - 1; m >= 0; --m) {
    const double t_lo = grid.time(m);
    const double t_hi = grid.time(m + 1);
    const CostateCoefficients mid = coefficients(0.5 * (t_lo + t_hi));
    CostateCoefficients lower = coefficients(t_lo);
    // Integrate in reversed time s = t_hi - t, d(lambda)/ds = -(S lambda + g).
    const Eigen::VectorXd k1 = -(upper.S * lambda + upper.g);
    const Eigen::VectorXd k2 = -(mid.S * (lambda + 0.5 * h * k1) + mid.g);
    const Eigen::VectorXd k3 = -(mid.S * (lambda + 0.5 * h * k2) + mid.g);
    const Eigen::VectorXd k4 = -(lower.S * (lambda + h * k3) + lower.g);
    lambda += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!lambda.allFinite()) {
      throw Error(ErrorCode::numerical_blowup, "costate became non-finite at t = " + std::to_string(t_lo));
    }
    out.lambda[static_cast<size_t>(m)] = lambda;
    upper = std::move(lower);
  }
  return out;
}

AdjointTrajectory solve_adjoint(const Trajectory& traj, const PhysicalParams& params) {
  const double horizon = traj.grid.horizon();
  return solve_linear_terminal(traj.grid, [&](double t) {
    return costate_coefficients(traj.state_at(t), params, FieldAngle{traj.control(t)}, horizon);
  });
}

namespace {

GradientResult gradient_from_value(ObjectiveValue value, const PhysicalParams& params) {
  GradientResult out;
  out.value = std::move(value);
  const Trajectory& traj = out.value.trajectory;
  const TimeGrid& grid = traj.grid;
  out.adjoint = solve_adjoint(traj, params);

  const int nodes = grid.nodes();
  out.dH_du.resize(static_cast<size_t>(nodes));
  for (int m = 0; m < nodes; ++m) {
    const double t = grid.time(m);
    out.dH_du[static_cast<size_t>(m)] =
        hamiltonian_dphi(traj.states[static_cast<size_t>(m)], FieldAngle{traj.control(t)},
                         out.adjoint.lambda[static_cast<size_t>(m)], params, grid.horizon());
  }

  const ControlSignal& u = traj.control;
  out.gradient = Eigen::VectorXd::Zero(u.size());
  for (int m = 0; m < nodes; ++m) {
    const double t = grid.time(m);
    const double w = (m == 0 || m == nodes - 1) ? 0.5 * grid.dt() : grid.dt();
    for (int j = 0; j < u.size(); ++j) {
      const double b = u.basis(j, t);
      if (b != 0.0) out.gradient[j] -= w * b * out.dH_du[static_cast<size_t>(m)];
    }
  }
  return out;
}

}  // namespace

GradientResult control_gradient(const ControlSignal& control, const ChainState& x0,
                                const TimeGrid& grid, const PhysicalParams& params) {
  return gradient_from_value(objective(control, x0, grid, params), params);
}

GradientCheck gradient_check(const ControlSignal& control, const ChainState& x0, const TimeGrid& grid,
                             const PhysicalParams& params, const GradientCheckSettings& settings) {
  GradientCheck out;
  out.adjoint = control_gradient(control, x0, grid, params).gradient;
  if (settings.flip_sign) out.adjoint = -out.adjoint;

  const Eigen::VectorXd knots = control.knots();
  out.finite_difference.resize(knots.size());
  for (Eigen::Index m = 0; m < knots.size(); ++m) {
    Eigen::VectorXd plus = knots;
    Eigen::VectorXd minus = knots;
    plus[m] += settings.fd_step;
    minus[m] -= settings.fd_step;
    out.finite_difference[m] = (objective(control.with_knots(plus), x0, grid, params).J -
                                objective(control.with_knots(minus), x0, grid, params).J) /
                               (2.0 * settings.fd_step);
  }

  const double scale = out.finite_difference.cwiseAbs().maxCoeff();
  out.checked.assign(static_cast<size_t>(knots.size()), false);
  if (scale == 0.0) {
    out.max_rel_error = out.adjoint.cwiseAbs().maxCoeff() == 0.0 ? 0.0 : 1.0;
  } else {
    for (Eigen::Index m = 0; m < knots.size(); ++m) {
      if (std::abs(out.finite_difference[m]) < settings.noise_floor * scale) continue;
      out.checked[static_cast<size_t>(m)] = true;
      out.max_rel_error =
          std::max(out.max_rel_error, std::abs(out.adjoint[m] - out.finite_difference[m]) / scale);
    }
  }
  out.passed = out.max_rel_error <= settings.tolerance;
  return out;
}

PmpDiagnostics pmp_diagnostics(const Trajectory& traj, const AdjointTrajectory& adjoint,
                               const PhysicalParams& params) {
  PmpDiagnostics out;
  double h_min = std::numeric_limits<double>::infinity();
  double h_max = -h_min;
  for (int m = 0; m < traj.nodes(); ++m) {
    const double t = traj.grid.time(m);
    const FieldAngle angle{traj.control(t)};
    const auto& state = traj.states[static_cast<size_t>(m)];
    const auto& lambda = adjoint.lambda[static_cast<size_t>(m)];
    const double h = hamiltonian(state, angle, lambda, params, traj.grid.horizon());
    h_min = std::min(h_min, h);
    h_max = std::max(h_max, h);
    out.stationarity = std::max(
        out.stationarity, std::abs(hamiltonian_dphi(state, angle, lambda, params, traj.grid.horizon())));
  }
  out.h_variation = h_max - h_min;
  return out;
}

double fr_beta(const Eigen::VectorXd& grad_now, const Eigen::VectorXd& grad_prev) {
  const double denom = grad_prev.squaredNorm();
  if (denom == 0.0) throw Error(ErrorCode::division_by_zero, "previous gradient vanished");
  return grad_now.squaredNorm() / denom;
}

LineSearchResult line_search(const Eigen::VectorXd& u, const Eigen::VectorXd& direction,
                             double value_u, const ValueFunction& value,
                             const LineSearchSettings& settings) {
  double alpha = settings.alpha_init;
  for (int trial = 1; trial <= settings.max_trials; ++trial, alpha *= settings.backtrack) {
    double v = std::numeric_limits<double>::infinity();
    try {
      v = value(u + alpha * direction);
    } catch (const Error&) {
      continue;
    }
    if (std::isfinite(v) && v < value_u) return {alpha, v, trial};
  }
  throw Error(ErrorCode::line_search_failure,
              "no decrease after " + std::to_string(settings.max_trials) + " trials");
}

ControlSignal OptimizationReport::best_control() const {
  if (iterations.empty()) throw Error(ErrorCode::empty_trajectory, "no iterate was recorded");
  return iterations.back().control;
}

const char* to_string(Termination reason) noexcept {
  switch (reason) {
    case Termination::gradient_tolerance: return "gradient_tolerance";
    case Termination::max_iterations: return "max_iterations";
    case Termination::line_search_failure: return "line_search_failure";
    case Termination::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

double characteristic_flow(const PhysicalParams& params) {
  const double l = params.l_rest;
  const double energy = params.k_stretch * l * l + params.A_bend / l +
                        params.dipole_energy_prefactor() / (l * l * l);
  return energy > 0.0 ? energy / params.eta : 1.0;
}

CgResult fletcher_reeves(CgProblem& problem, const Eigen::VectorXd& x0,
                         const OptimizerSettings& settings, const StepRule& step,
                         const std::function<void(const CgIterate&)>& on_iterate) {
  CgResult result;
  result.x = x0;
  auto finish = [&](CgIterate it, Termination reason, std::string message = {}) {
    result.reason = reason;
    result.message = std::move(message);
    result.iterates.push_back(it);
    if (on_iterate) on_iterate(result.iterates.back());
  };

  Eigen::VectorXd x = x0;
  double value = 0.0;
  Eigen::VectorXd grad;
  try {
    value = problem.value(x);
  } catch (const Error& e) {
    result.reason = Termination::numerical_failure;
    result.message = e.what();
    return result;
  }
  try {
    grad = problem.gradient(x);
  } catch (const Error& e) {
    CgIterate first;
    first.value = value;
    first.grad_norm = std::numeric_limits<double>::quiet_NaN();
    first.x = x;
    finish(first, Termination::numerical_failure, e.what());
    return result;
  }

  Eigen::VectorXd grad_prev;
  Eigen::VectorXd p_prev;
  for (int k = 0;; ++k) {
    CgIterate it;
    it.k = k;
    it.value = value;
    it.grad_norm = grad.norm();
    it.x = x;
    result.x = x;

    if (it.grad_norm < settings.eps) {
      finish(it, Termination::gradient_tolerance);
      return result;
    }
    if (k >= settings.max_iter) {
      finish(it, Termination::max_iterations);
      return result;
    }

    it.beta = k == 0 ? 0.0 : fr_beta(grad, grad_prev);
    Eigen::VectorXd p = k == 0 ? Eigen::VectorXd(-grad) : Eigen::VectorXd(-grad + it.beta * p_prev);
    if (grad.dot(p) >= 0.0) {
      p = -grad;
      it.restarted = true;
    }

    LineSearchResult ls;
    try {
      ls = step ? step(x, p, value) : line_search(x, p, value, [&](const Eigen::VectorXd& trial) {
        return problem.value(trial);
      }, settings.line_search);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::line_search_failure) throw;
      finish(it, Termination::line_search_failure, e.what());
      return result;
    }
    it.alpha = ls.alpha;
    result.iterates.push_back(it);
    if (on_iterate) on_iterate(result.iterates.back());

    x += ls.alpha * p;
    value = ls.value;
    grad_prev = grad;
    p_prev = p;
    try {
      grad = problem.gradient(x);
    } catch (const Error& e) {
      CgIterate last;
      last.k = k + 1;
      last.value = value;
      last.grad_norm = std::numeric_limits<double>::quiet_NaN();
      last.x = x;
      result.x = x;
      finish(last, Termination::numerical_failure, e.what());
      return result;
    }
  }
}

namespace {

// Forward solves keyed by knot vector; the line search's accepted trial is
// always the most recent successful evaluation, so one slot suffices.
class CiliaProblem final : public CgProblem {
 public:
  CiliaProblem(ControlSignal u0, ChainState x0, TimeGrid grid, PhysicalParams params, double scale)
      : u0_(std::move(u0)), x0_(std::move(x0)), grid_(grid), params_(params), scale_(scale) {}

  double value(const Eigen::VectorXd& knots) override {
    ObjectiveValue v = objective(u0_.with_knots(knots), x0_, grid_, params_);
    cached_knots_ = knots;
    cached_ = std::move(v);
    return cached_->J / scale_;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& knots) override {
    if (!cached_ || cached_knots_ != knots) value(knots);
    last_gradient_ = gradient_from_value(*cached_, params_);
    return last_gradient_->gradient / scale_;
  }

  const ObjectiveValue& cached() const { return *cached_; }
  const std::optional<GradientResult>& last_gradient() const { return last_gradient_; }
  const ControlSignal& prototype() const { return u0_; }

 private:
  ControlSignal u0_;
  ChainState x0_;
  TimeGrid grid_;
  PhysicalParams params_;
  double scale_;
  Eigen::VectorXd cached_knots_;
  std::optional<ObjectiveValue> cached_;
  std::optional<GradientResult> last_gradient_;
};

}  // namespace

OptimizationReport optimize(const ControlSignal& u0, const ChainState& x0, const TimeGrid& grid,
                            const PhysicalParams& params, const OptimizerSettings& settings) {
  if (!(settings.eps > 0.0)) throw Error(ErrorCode::invalid_argument, "eps must be positive");
  OptimizationReport report;
  report.objective_scale =
      settings.objective_scale > 0.0 ? settings.objective_scale : characteristic_flow(params);
  CiliaProblem problem(u0, x0, grid, params, report.objective_scale);

  auto on_iterate = [&](const CgIterate& it) {
    IterationRecord rec;
    rec.k = it.k;
    rec.J_scaled = it.value;
    rec.J = it.value * report.objective_scale;
    rec.grad_norm = it.grad_norm;
    rec.alpha = it.alpha;
    rec.beta = it.beta;
    rec.restarted = it.restarted;
    rec.control = u0.with_knots(it.x);
    if (const auto& g = problem.last_gradient(); g && g->value.trajectory.control.knots() == it.x) {
      rec.pumping_raw = g->value.pumping.pumping_raw;
      rec.pumping_flow = g->value.pumping.pumping_flow;
    } else {
      const PumpingResult pr = objective(rec.control, x0, grid, params).pumping;
      rec.pumping_raw = pr.pumping_raw;
      rec.pumping_flow = pr.pumping_flow;
    }
    report.iterations.push_back(std::move(rec));
  };

  const CgResult cg = fletcher_reeves(problem, u0.knots(), settings, {}, on_iterate);
  report.reason = cg.reason;
  report.message = cg.message;
  if (const auto& g = problem.last_gradient(); g && !report.iterations.empty() &&
                                                  g->value.trajectory.control.knots() ==
                                                      report.iterations.back().control.knots()) {
    report.pmp = pmp_diagnostics(g->value.trajectory, g->adjoint, params);
  }
  return report;
}

}  // namespace ciliaflow
