#include "ciliaflow/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "ciliaflow/error.hpp"

namespace ciliaflow {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write '" + path.string() + "'");
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
  if (!out) throw Error(ErrorCode::io_error, "write failed for '" + path.string() + "'");
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot create '" + dir.string() + "': " + ec.message());
}

// Every CSV starts with a name row followed by a units row.
void write_csv_header(std::ostream& out, const std::vector<std::string>& names,
                      const std::vector<std::string>& units) {
  for (size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << '\n';
  for (size_t i = 0; i < units.size(); ++i) out << (i ? "," : "") << units[i];
  out << '\n';
}

void write_control_csv(const fs::path& path, const ControlSignal& control) {
  auto out = open_output(path);
  write_csv_header(out, {"t", "phi"}, {"s", "rad"});
  for (int m = 0; m < control.size(); ++m) {
    out << num(control.knot_time(m)) << ',' << num(control.knots()[m]) << '\n';
  }
}

void write_trajectory_csv(const fs::path& path, const Trajectory& traj) {
  auto out = open_output(path);
  const int n = traj.states.empty() ? 0 : traj.states.front().size();
  std::vector<std::string> names{"t", "phi"};
  std::vector<std::string> units{"s", "rad"};
  for (int i = 1; i <= n; ++i) {
    names.push_back("y" + std::to_string(i));
    names.push_back("z" + std::to_string(i));
    units.insert(units.end(), {"m", "m"});
  }
  write_csv_header(out, names, units);
  for (int m = 0; m < traj.nodes(); ++m) {
    const double t = traj.grid.time(m);
    out << num(t) << ',' << num(traj.control(t));
    const auto& flat = traj.states[static_cast<size_t>(m)].flat();
    for (Eigen::Index c = 0; c < flat.size(); ++c) out << ',' << num(flat[c]);
    out << '\n';
  }
}

void write_energies_csv(const fs::path& path, const Trajectory& traj) {
  auto out = open_output(path);
  write_csv_header(out, {"t", "E_stretch", "E_bend", "E_dipole", "E_total", "flow_integrand"},
                   {"s", "J", "J", "J", "J", "N m"});
  for (int m = 0; m < traj.nodes(); ++m) {
    const auto idx = static_cast<size_t>(m);
    const EnergySnapshot& e = traj.energies[idx];
    out << num(traj.grid.time(m)) << ',' << num(e.stretching) << ',' << num(e.bending) << ','
        << num(e.dipole) << ',' << num(e.total()) << ','
        << num(flow_integrand(traj.states[idx], traj.forces[idx])) << '\n';
  }
}

json pumping_json(const PumpingResult& p) {
  return {{"pumping_raw_Nm", p.pumping_raw},
          {"pumping_flow_m3s", p.pumping_flow},
          {"objective_m3s", p.objective}};
}

json error_json(const std::string& command, const std::string& code, const std::string& message) {
  return {{"command", command}, {"status", "error"}, {"error", code}, {"message", message}};
}

bool strictly_decreasing(const OptimizationReport& report) {
  for (size_t i = 1; i < report.iterations.size(); ++i) {
    if (!(report.iterations[i].J < report.iterations[i - 1].J)) return false;
  }
  return true;
}

json report_json(const OptimizationReport& report) {
  json iterations = json::array();
  for (const auto& it : report.iterations) {
    iterations.push_back({{"k", it.k},
                          {"J_m3s", it.J},
                          {"J_scaled", it.J_scaled},
                          {"pumping_raw_Nm", it.pumping_raw},
                          {"pumping_flow_m3s", it.pumping_flow},
                          {"grad_norm_scaled", it.grad_norm},
                          {"alpha", it.alpha},
                          {"beta", it.beta},
                          {"restarted", it.restarted}});
  }
  json out{{"command", "optimize"},
           {"status", "ok"},
           {"termination", to_string(report.reason)},
           {"message", report.message},
           {"objective_scale_m3s", report.objective_scale},
           {"accepted_steps", report.iterations.empty() ? 0 : report.iterations.size() - 1},
           {"monotone_descent", strictly_decreasing(report)},
           {"pmp", {{"stationarity", report.pmp.stationarity}, {"h_variation", report.pmp.h_variation}}},
           {"iterations", iterations}};
  if (!report.iterations.empty()) {
    const auto& first = report.iterations.front();
    const auto& last = report.iterations.back();
    out["final"] = {{"pumping_raw_Nm", last.pumping_raw},
                    {"pumping_flow_m3s", last.pumping_flow},
                    {"objective_m3s", last.J}};
    out["pumping_gain"] = first.pumping_raw != 0.0 ? json(last.pumping_raw / first.pumping_raw) : json(nullptr);
  }
  return out;
}

std::string table2_text(const OptimizationReport& report) {
  std::string text = "# iteration vs time-averaged pumping\n";
  text += "# pumping_raw in N m, pumping_flow = pumping_raw / eta in m^3/s\n";
  char line[200];
  std::snprintf(line, sizeof line, "%-6s %-24s %-24s %-24s\n", "k", "pumping_raw_Nm", "pumping_flow_m3s",
                "grad_norm_scaled");
  text += line;
  for (const auto& it : report.iterations) {
    std::snprintf(line, sizeof line, "%-6d %-24.10e %-24.10e %-24.10e\n", it.k, it.pumping_raw, it.pumping_flow,
                  it.grad_norm);
    text += line;
  }
  text += "# termination: " + std::string(to_string(report.reason)) + "\n";
  return text;
}

constexpr const char* kPlotScript = R"(#!/usr/bin/env python3
"""Plot every control CSV below this directory (t and phi columns, units row skipped)."""
import glob
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

root = os.path.dirname(os.path.abspath(__file__))
files = sorted(glob.glob(os.path.join(root, "**", "*.csv"), recursive=True))
files = [f for f in files if os.path.basename(f).startswith(("iter_", "optimal_control"))]
if not files:
    sys.exit("no control CSV files found")
fig, ax = plt.subplots(figsize=(7, 4))
for f in files:
    df = pd.read_csv(f, skiprows=[1])
    ax.plot(df["t"], df["phi"], label=os.path.relpath(f, root))
ax.set_xlabel("t [s]")
ax.set_ylabel("phi [rad]")
ax.legend(fontsize="x-small")
fig.tight_layout()
fig.savefig(os.path.join(root, "controls.png"), dpi=150)
)";

/// Writes the optimization artifacts into dir.
void write_optimization(const fs::path& dir, const OptimizationReport& report) {
  prepare_dir(dir / "controls");
  for (const auto& it : report.iterations) {
    write_control_csv(dir / "controls" / ("iter_" + std::to_string(it.k) + ".csv"), it.control);
  }
  write_text(dir / "report.json", report_json(report).dump(2) + "\n");
  write_text(dir / "table2.txt", table2_text(report));
  write_text(dir / "plot_controls.py", kPlotScript);
}

/// Runs body, translating typed errors into exit codes, a diagnostic line
/// and, when possible, an error report in the output directory.
template <typename Body>
int guarded(const char* command, const RunConfig& config, const CommandStreams& io, Body&& body) {
  auto fail = [&](const std::string& code, const std::string& message, int exit_code) {
    io.err << "ciliaflow " << command << ": " << code << ": " << message << '\n';
    try {
      prepare_dir(config.output_dir);
      write_text(fs::path(config.output_dir) / "report.json",
                 error_json(command, code, message).dump(2) + "\n");
    } catch (const std::exception&) {
      // The diagnostic on err already carries the failure.
    }
    return exit_code;
  };
  try {
    config.validate();
    prepare_dir(config.output_dir);
    write_text(fs::path(config.output_dir) / "config", save_config(config));
    return body();
  } catch (const ValidationError& e) {
    return fail("ValidationError", e.key() + ": " + e.what(), exit_validation);
  } catch (const Error& e) {
    return fail(to_string(e.code()), e.what(), exit_code_for(e.code()));
  } catch (const std::exception& e) {
    return fail("InternalError", e.what(), exit_numerical);
  }
}

}  // namespace

int exit_code_for(ErrorCode code) noexcept {
  return is_numerical(code) ? exit_numerical : exit_validation;
}

ChainState initial_state(const PhysicalParams& params) { return ChainState::rest(params); }

GradientCheckSettings to_check_settings(const GradcheckSettings& s) {
  GradientCheckSettings out;
  out.fd_step = s.fd_step;
  out.noise_floor = s.noise_floor;
  out.tolerance = s.tolerance;
  out.flip_sign = s.flip_sign;
  return out;
}

int sweep_threads(int presets) {
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("CILIAFLOW_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) threads = std::min<long>(threads, cap);
  }
  return std::max(1, std::min(threads, presets));
}

int cmd_simulate(const RunConfig& config, const CommandStreams& io) {
  return guarded("simulate", config, io, [&] {
    const fs::path dir = config.output_dir;
    const ControlSignal control = config.control.build(config.grid, config.seed);
    const ObjectiveValue value =
        objective(control, initial_state(config.physics), config.grid.time_grid(), config.physics);
    write_trajectory_csv(dir / "trajectory.csv", value.trajectory);
    write_energies_csv(dir / "energies.csv", value.trajectory);

    json summary{{"command", "simulate"}, {"status", "ok"}};
    summary.update(pumping_json(value.pumping));
    const EnergySnapshot& e = value.trajectory.energies.back();
    summary["nodes"] = value.trajectory.nodes();
    summary["beads"] = config.physics.n;
    summary["final_energy_J"] = {{"stretching", e.stretching},
                                 {"bending", e.bending},
                                 {"dipole", e.dipole},
                                 {"total", e.total()}};
    write_text(dir / "report.json", summary.dump(2) + "\n");
    io.out << "pumping_raw " << num(value.pumping.pumping_raw) << " N m, pumping_flow "
           << num(value.pumping.pumping_flow) << " m^3/s\n";
    return static_cast<int>(exit_success);
  });
}

int cmd_optimize(const RunConfig& config, const CommandStreams& io) {
  return guarded("optimize", config, io, [&] {
    const fs::path dir = config.output_dir;
    const ControlSignal u0 = config.control.build(config.grid, config.seed);
    const OptimizationReport report = optimize(u0, initial_state(config.physics), config.grid.time_grid(),
                                               config.physics, config.optimizer);
    if (report.iterations.empty()) throw Error(ErrorCode::numerical_blowup, report.message);
    write_optimization(dir, report);

    const ObjectiveValue best =
        objective(report.best_control(), initial_state(config.physics), config.grid.time_grid(), config.physics);
    write_trajectory_csv(dir / "trajectory.csv", best.trajectory);
    write_energies_csv(dir / "energies.csv", best.trajectory);

    io.out << table2_text(report);
    if (report.reason == Termination::numerical_failure) {
      io.err << "ciliaflow optimize: numerical failure: " << report.message << '\n';
      return static_cast<int>(exit_numerical);
    }
    return static_cast<int>(exit_success);
  });
}

int cmd_gradcheck(const RunConfig& config, const CommandStreams& io) {
  return guarded("gradcheck", config, io, [&] {
    const fs::path dir = config.output_dir;
    const ControlSignal control = config.control.build(config.grid, config.seed);
    const GradientCheck check = gradient_check(control, initial_state(config.physics), config.grid.time_grid(),
                                               config.physics, to_check_settings(config.gradcheck));

    auto csv = open_output(dir / "gradcheck.csv");
    write_csv_header(csv, {"knot", "t", "adjoint", "finite_difference", "abs_error", "checked"},
                     {"-", "s", "m^3/(s rad)", "m^3/(s rad)", "m^3/(s rad)", "-"});
    char line[200];
    std::snprintf(line, sizeof line, "%-5s %-14s %-16s %-16s %-10s %s\n", "knot", "t_s", "adjoint", "fd",
                  "abs_err", "checked");
    io.out << line;
    for (Eigen::Index m = 0; m < check.adjoint.size(); ++m) {
      const double err = std::abs(check.adjoint[m] - check.finite_difference[m]);
      const bool used = check.checked[static_cast<size_t>(m)];
      csv << m << ',' << num(control.knot_time(static_cast<int>(m))) << ',' << num(check.adjoint[m]) << ','
          << num(check.finite_difference[m]) << ',' << num(err) << ',' << (used ? 1 : 0) << '\n';
      std::snprintf(line, sizeof line, "%-5ld %-14.6e % -16.6e % -16.6e %-10.2e %s\n", static_cast<long>(m),
                    control.knot_time(static_cast<int>(m)), check.adjoint[m], check.finite_difference[m], err,
                    used ? "yes" : "no");
      io.out << line;
    }
    io.out << "max relative error " << num(check.max_rel_error) << " (tolerance "
           << num(config.gradcheck.tolerance) << "): " << (check.passed ? "PASS" : "FAIL") << '\n';

    json summary{{"command", "gradcheck"},
                 {"status", "ok"},
                 {"max_rel_error", check.max_rel_error},
                 {"tolerance", config.gradcheck.tolerance},
                 {"passed", check.passed},
                 {"flip_sign", config.gradcheck.flip_sign}};
    write_text(dir / "report.json", summary.dump(2) + "\n");
    return static_cast<int>(check.passed ? exit_success : exit_numerical);
  });
}

int cmd_sweep(const RunConfig& config, const CommandStreams& io) {
  return guarded("sweep", config, io, [&] {
    if (config.sweep.empty()) throw ValidationError("presets", "sweep needs at least one preset");
    const fs::path dir = config.output_dir;
    const auto count = config.sweep.size();

    struct Row {
      int iterations = 0;
      double grad_norm = 0.0;
      double initial_raw = 0.0;
      double final_raw = 0.0;
      double final_flow = 0.0;
      std::string termination = "not_run";
      bool monotone = false;
      std::string error;
    };
    std::vector<Row> rows(count);
    std::atomic<size_t> next{0};

    auto worker = [&] {
      for (size_t i = next++; i < count; i = next++) {
        const SweepPreset& preset = config.sweep[i];
        Row& row = rows[i];
        try {
          RunConfig single = config;
          single.control = preset.spec;
          single.sweep.clear();
          single.output_dir = (dir / preset.name).string();
          prepare_dir(single.output_dir);
          write_text(fs::path(single.output_dir) / "config", save_config(single));

          const ControlSignal u0 = preset.spec.build(config.grid, config.seed + i);
          const OptimizationReport report = optimize(u0, initial_state(config.physics), config.grid.time_grid(),
                                                     config.physics, config.optimizer);
          row.termination = to_string(report.reason);
          row.monotone = strictly_decreasing(report);
          if (report.reason == Termination::numerical_failure) row.error = report.message;
          if (!report.iterations.empty()) {
            write_optimization(single.output_dir, report);
            write_control_csv(fs::path(single.output_dir) / "optimal_control.csv", report.best_control());
            row.iterations = static_cast<int>(report.iterations.size()) - 1;
            row.grad_norm = report.iterations.back().grad_norm;
            row.initial_raw = report.iterations.front().pumping_raw;
            row.final_raw = report.iterations.back().pumping_raw;
            row.final_flow = report.iterations.back().pumping_flow;
          }
        } catch (const std::exception& e) {
          row.termination = "error";
          row.error = e.what();
        }
      }
    };

    const int threads = sweep_threads(static_cast<int>(count));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    auto csv = open_output(dir / "table3.csv");
    write_csv_header(csv,
                     {"preset", "spec", "iterations", "final_grad_norm", "initial_pumping_raw",
                      "final_pumping_raw", "final_pumping_flow", "termination", "monotone_descent", "error"},
                     {"-", "-", "-", "scaled", "N m", "N m", "m^3/s", "-", "-", "-"});
    bool all_ok = true;
    for (size_t i = 0; i < count; ++i) {
      const Row& r = rows[i];
      std::string error = r.error;
      std::replace(error.begin(), error.end(), '"', '\'');
      csv << config.sweep[i].name << ",\"" << config.sweep[i].spec.to_string() << "\"," << r.iterations << ','
          << num(r.grad_norm) << ',' << num(r.initial_raw) << ',' << num(r.final_raw) << ',' << num(r.final_flow)
          << ',' << r.termination << ',' << (r.monotone ? 1 : 0) << ",\"" << error << "\"\n";
      io.out << config.sweep[i].name << ": " << r.termination << ", " << r.iterations << " steps, pumping "
             << num(r.final_raw) << " N m\n";
      all_ok = all_ok && r.error.empty();
    }
    write_text(dir / "plot_controls.py", kPlotScript);
    return static_cast<int>(all_ok ? exit_success : exit_numerical);
  });
}

}  // namespace ciliaflow
