#pragma once

#include <functional>

#include <Eigen/Core>

namespace ciliaflow {

/// Uniform time grid t_m = t0 + m dt, m = 0..steps.
struct TimeGrid {
  double t0 = 0.0;
  double tf = 1.0;
  int steps = 2;

  TimeGrid() = default;
  TimeGrid(double t0, double tf, int steps);

  double dt() const noexcept { return (tf - t0) / steps; }
  double horizon() const noexcept { return tf - t0; }
  double time(int m) const noexcept { return m == steps ? tf : t0 + m * dt(); }
  int nodes() const noexcept { return steps + 1; }
};

/// Field angle phi(t) on uniform knots over [t0, tf], piecewise-linear in
/// between. Angles are kept unwrapped; the dynamics only see sin and cos.
class ControlSignal {
 public:
  ControlSignal() = default;
  ControlSignal(double t0, double tf, Eigen::VectorXd knots);

  static ControlSignal constant(double t0, double tf, int count, double value);
  static ControlSignal sample(double t0, double tf, int count,
                              const std::function<double(double)>& f);

  /// Interpolated angle; t is clamped to [t0, tf].
  double operator()(double t) const;

  /// Hat basis function of knot m evaluated at t.
  double basis(int m, double t) const;

  double knot_time(int m) const;
  double t0() const noexcept { return t0_; }
  double tf() const noexcept { return tf_; }
  int size() const noexcept { return static_cast<int>(knots_.size()); }
  const Eigen::VectorXd& knots() const noexcept { return knots_; }

  ControlSignal with_knots(Eigen::VectorXd knots) const { return {t0_, tf_, std::move(knots)}; }

 private:
  double spacing() const noexcept { return (tf_ - t0_) / (knots_.size() - 1); }

  double t0_ = 0.0;
  double tf_ = 1.0;
  Eigen::VectorXd knots_;
};

}  // namespace ciliaflow
