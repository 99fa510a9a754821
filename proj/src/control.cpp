#include "ciliaflow/control.hpp"

#include <algorithm>
#include <cmath>

#include "ciliaflow/error.hpp"

namespace ciliaflow {

TimeGrid::TimeGrid(double t0_in, double tf_in, int steps_in) : t0(t0_in), tf(tf_in), steps(steps_in) {
  if (!(tf > t0)) throw Error(ErrorCode::invalid_argument, "time grid needs tf > t0");
  if (steps < 2) throw Error(ErrorCode::invalid_argument, "time grid needs at least 2 steps");
}

ControlSignal::ControlSignal(double t0, double tf, Eigen::VectorXd knots)
    : t0_(t0), tf_(tf), knots_(std::move(knots)) {
  if (!(tf_ > t0_)) throw Error(ErrorCode::invalid_argument, "control needs tf > t0");
  if (knots_.size() < 2) throw Error(ErrorCode::invalid_argument, "control needs at least 2 knots");
  if (!knots_.allFinite()) throw Error(ErrorCode::invalid_argument, "control knots must be finite");
}

ControlSignal ControlSignal::constant(double t0, double tf, int count, double value) {
  return {t0, tf, Eigen::VectorXd::Constant(count, value)};
}

ControlSignal ControlSignal::sample(double t0, double tf, int count,
                                    const std::function<double(double)>& f) {
  if (count < 2) throw Error(ErrorCode::invalid_argument, "control needs at least 2 knots");
  Eigen::VectorXd knots(count);
  const double h = (tf - t0) / (count - 1);
  for (int m = 0; m < count; ++m) knots[m] = f(m == count - 1 ? tf : t0 + m * h);
  return {t0, tf, std::move(knots)};
}

double ControlSignal::knot_time(int m) const {
  return m == size() - 1 ? tf_ : t0_ + m * spacing();
}

double ControlSignal::operator()(double t) const {
  const int last = size() - 1;
  const double s = std::clamp((t - t0_) / spacing(), 0.0, static_cast<double>(last));
  const int m = std::min(static_cast<int>(std::floor(s)), last - 1);
  const double w = s - m;
  return (1.0 - w) * knots_[m] + w * knots_[m + 1];
}

double ControlSignal::basis(int m, double t) const {
  const double s = std::clamp((t - t0_) / spacing(), 0.0, static_cast<double>(size() - 1));
  return std::max(0.0, 1.0 - std::abs(s - m));
}

}  // namespace ciliaflow
