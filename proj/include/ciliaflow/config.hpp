#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "ciliaflow/control.hpp"
#include "ciliaflow/optimal_control.hpp"
#include "ciliaflow/params.hpp"

namespace ciliaflow {

struct GridSettings {
  double t0 = std::numbers::pi / 10;
  double T = std::numbers::pi / 10;
  int N_t = 2000;
  int N_u = 64;

  TimeGrid time_grid() const { return {t0, t0 + T, N_t}; }
  bool operator==(const GridSettings&) const = default;
};

/// Initial field-angle trajectory. Text forms:
///   constant(c) | linear(slope) | quadratic_paper |
///   uniform_random(lo, hi[, seed]) | knots(v1, v2, ...)
/// Numbers accept pi multiples such as pi/2, 2*pi or -pi/3.
struct InitialControlSpec {
  enum class Kind { constant, linear, quadratic_paper, uniform_random, knots };

  Kind kind = Kind::constant;
  double value = std::numbers::pi / 2;  // constant value or linear slope
  double lo = 0.0;
  double hi = 2.0 * std::numbers::pi;
  bool has_seed = false;
  std::uint64_t seed = 0;
  std::vector<double> knots;

  static InitialControlSpec parse(std::string_view text);
  std::string to_string() const;

  /// Knot values on the grid's control knots. uniform_random without its own
  /// seed draws from fallback_seed.
  ControlSignal build(const GridSettings& grid, std::uint64_t fallback_seed) const;

  bool operator==(const InitialControlSpec&) const = default;
};

struct SweepPreset {
  std::string name;
  InitialControlSpec spec;

  bool operator==(const SweepPreset&) const = default;
};

struct GradcheckSettings {
  double tolerance = 1e-2;
  double fd_step = 1e-4;      // rad
  double noise_floor = 1e-3;  // fraction of max |FD| below which knots are skipped
  bool flip_sign = false;     // negative-control hook

  bool operator==(const GradcheckSettings&) const = default;
};

struct RunConfig {
  PhysicalParams physics;
  GridSettings grid;
  OptimizerSettings optimizer;
  InitialControlSpec control;
  std::vector<SweepPreset> sweep;
  GradcheckSettings gradcheck;
  std::string output_dir = "out";
  std::uint64_t seed = 0;

  /// Throws ValidationError naming the offending key.
  void validate() const;
  bool operator==(const RunConfig& other) const;
};

/// Parses "key = value" lines; '#' starts a comment. Unknown keys and
/// malformed lines throw ParseError with the line number; values failing
/// validation throw ValidationError. Missing keys keep their defaults.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(save_config(c)) == c.
std::string save_config(const RunConfig& config);

/// Applies one setting without validating the whole config.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Number with optional pi factor: 1.5e-3, pi, -pi/2, 2*pi, 3*pi/4.
double parse_number(std::string_view text);

/// Sweep list: entries separated by ';', each "name=spec" or a bare spec.
std::vector<SweepPreset> parse_presets(std::string_view text);

}  // namespace ciliaflow
