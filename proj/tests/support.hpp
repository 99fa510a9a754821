#pragma once

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Core>

#include "ciliaflow/chain.hpp"
#include "ciliaflow/params.hpp"

namespace ciliaflow::testing {

/// Reference constants with a stiffer spring, softer bending and a weaker
/// field. Forward solves stay regular over the whole horizon here.
inline PhysicalParams resolved_params(int n) {
  PhysicalParams p;
  p.n = n;
  p.k_stretch = 5e-6;
  p.A_bend = 4e-25;
  p.B_field = 3e-3;
  return p;
}

inline PhysicalParams reference_params(int n) {
  PhysicalParams p;
  p.n = n;
  return p;
}

inline double min_separation(const ChainState& s) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= s.size(); ++i) {
    for (int j = i + 1; j <= s.size(); ++j) best = std::min(best, (s.point(i) - s.point(j)).norm());
  }
  return best;
}

/// Rest chain plus Gaussian noise of scale `scale * l_rest`, redrawn until
/// every pair of points (anchor included) is at least `min_sep` apart.
inline ChainState random_state(const PhysicalParams& p, std::mt19937_64& rng, double scale = 0.2,
                               double min_sep_over_a = 2.2) {
  std::normal_distribution<double> noise(0.0, scale * p.l_rest);
  const Eigen::VectorXd rest = ChainState::rest(p).flat();
  for (;;) {
    Eigen::VectorXd x = rest;
    for (Eigen::Index c = 0; c < x.size(); ++c) x[c] += noise(rng);
    ChainState s(x);
    if (min_separation(s) >= min_sep_over_a * p.a) return s;
  }
}

/// -(central difference gradient) of an energy functional.
inline Eigen::VectorXd fd_force(const std::function<double(const ChainState&)>& energy, const ChainState& s,
                                double h) {
  Eigen::VectorXd x = s.flat();
  Eigen::VectorXd out(x.size());
  for (Eigen::Index c = 0; c < x.size(); ++c) {
    const double saved = x[c];
    x[c] = saved + h;
    const double plus = energy(ChainState(x));
    x[c] = saved - h;
    const double minus = energy(ChainState(x));
    x[c] = saved;
    out[c] = -(plus - minus) / (2.0 * h);
  }
  return out;
}

/// max |a - b| / max |b|.
inline double rel_err(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

inline ChainState mirrored(const ChainState& s) {
  Eigen::VectorXd x = s.flat();
  for (int i = 0; i < s.size(); ++i) x[2 * i] = -x[2 * i];
  return ChainState(x);
}

inline Eigen::VectorXd flip_y(Eigen::VectorXd v) {
  for (Eigen::Index i = 0; i < v.size(); i += 2) v[i] = -v[i];
  return v;
}

}  // namespace ciliaflow::testing
