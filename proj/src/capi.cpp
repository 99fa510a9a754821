#include "ciliaflow/ciliaflow.h"

#include <cstring>
#include <iostream>
#include <sstream>
#include <string>

#include "ciliaflow/commands.hpp"
#include "ciliaflow/config.hpp"
#include "ciliaflow/error.hpp"

struct cf_config {
  ciliaflow::RunConfig config;
};

struct cf_trajectory {
  ciliaflow::ObjectiveValue value;
};

struct cf_report {
  ciliaflow::OptimizationReport report;
};

namespace {

thread_local std::string last_error;

cf_status status_for(ciliaflow::ErrorCode code) {
  using ciliaflow::ErrorCode;
  switch (code) {
    case ErrorCode::validation_error: return CF_ERR_VALIDATION;
    case ErrorCode::parse_error: return CF_ERR_PARSE;
    case ErrorCode::io_error: return CF_ERR_IO;
    case ErrorCode::invalid_argument: return CF_ERR_ARGUMENT;
    default: return ciliaflow::is_numerical(code) ? CF_ERR_NUMERICAL : CF_ERR_INTERNAL;
  }
}

cf_status fail(cf_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

/// Runs body and converts any exception into a status plus message.
template <typename Body>
cf_status guard(Body&& body) {
  try {
    last_error.clear();
    body();
    return CF_OK;
  } catch (const ciliaflow::ValidationError& e) {
    return fail(CF_ERR_VALIDATION, e.key() + ": " + e.what());
  } catch (const ciliaflow::ParseError& e) {
    return fail(CF_ERR_PARSE, "line " + std::to_string(e.line()) + ": " + e.what());
  } catch (const ciliaflow::Error& e) {
    return fail(status_for(e.code()), std::string(ciliaflow::to_string(e.code())) + ": " + e.what());
  } catch (const std::exception& e) {
    return fail(CF_ERR_INTERNAL, e.what());
  }
}

void require(bool condition, const char* what) {
  if (!condition) throw ciliaflow::Error(ciliaflow::ErrorCode::invalid_argument, what);
}

ciliaflow::ChainState chain_from(const cf_config* config, const double* coords) {
  require(config && coords, "null argument");
  const int n = config->config.physics.n;
  return ciliaflow::ChainState(Eigen::Map<const Eigen::VectorXd>(coords, 2 * n));
}

int run_command(const cf_config* config, int (*command)(const ciliaflow::RunConfig&,
                                                          const ciliaflow::CommandStreams&)) {
  if (!config) {
    last_error = "null config";
    return CF_EXIT_VALIDATION;
  }
  return command(config->config, {std::cout, std::cerr});
}

}  // namespace

extern "C" {

const char* cf_version(void) { return "1.0.0"; }

const char* cf_last_error(void) { return last_error.c_str(); }

cf_status cf_config_new(cf_config** out) {
  return guard([&] {
    require(out, "null output pointer");
    *out = new cf_config{};
  });
}

cf_status cf_config_load(const char* path, cf_config** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = new cf_config{ciliaflow::load_config(path)};
  });
}

cf_status cf_config_parse(const char* text, cf_config** out) {
  return guard([&] {
    require(text && out, "null argument");
    *out = new cf_config{ciliaflow::parse_config(text)};
  });
}

void cf_config_free(cf_config* config) { delete config; }

cf_status cf_config_set(cf_config* config, const char* key, const char* value) {
  return guard([&] {
    require(config && key && value, "null argument");
    ciliaflow::apply_setting(config->config, key, value);
  });
}

cf_status cf_config_validate(const cf_config* config) {
  return guard([&] {
    require(config, "null config");
    config->config.validate();
  });
}

cf_status cf_config_save(const cf_config* config, char* buffer, size_t capacity, size_t* required) {
  return guard([&] {
    require(config, "null config");
    const std::string text = ciliaflow::save_config(config->config);
    if (required) *required = text.size() + 1;
    if (!buffer && capacity == 0) return;
    require(buffer && capacity >= text.size() + 1, "buffer too small");
    std::memcpy(buffer, text.c_str(), text.size() + 1);
  });
}

cf_status cf_config_get_number(const cf_config* config, const char* key, double* value) {
  return guard([&] {
    require(config && key && value, "null argument");
    std::istringstream lines(ciliaflow::save_config(config->config));
    const std::string prefix = std::string(key) + " = ";
    for (std::string line; std::getline(lines, line);) {
      if (line.rfind(prefix, 0) == 0) {
        *value = ciliaflow::parse_number(line.substr(prefix.size()));
        return;
      }
    }
    throw ciliaflow::Error(ciliaflow::ErrorCode::invalid_argument, "unknown numeric key '" + std::string(key) + "'");
  });
}

int cf_cmd_simulate(const cf_config* config) { return run_command(config, ciliaflow::cmd_simulate); }
int cf_cmd_optimize(const cf_config* config) { return run_command(config, ciliaflow::cmd_optimize); }
int cf_cmd_gradcheck(const cf_config* config) { return run_command(config, ciliaflow::cmd_gradcheck); }
int cf_cmd_sweep(const cf_config* config) { return run_command(config, ciliaflow::cmd_sweep); }

cf_status cf_total_energy(const cf_config* config, const double* coords, double phi, double* energy) {
  return guard([&] {
    require(config && coords && energy, "null argument");
    *energy = ciliaflow::total_energy(chain_from(config, coords), config->config.physics, ciliaflow::FieldAngle{phi});
  });
}

cf_status cf_total_force(const cf_config* config, const double* coords, double phi, double* force) {
  return guard([&] {
    require(config && coords && force, "null argument");
    const auto f =
        ciliaflow::total_force(chain_from(config, coords), config->config.physics, ciliaflow::FieldAngle{phi});
    std::memcpy(force, f.data(), sizeof(double) * static_cast<size_t>(f.size()));
  });
}

cf_status cf_simulate(const cf_config* config, cf_trajectory** out) {
  return guard([&] {
    require(config && out, "null argument");
    const auto& c = config->config;
    c.validate();
    const auto control = c.control.build(c.grid, c.seed);
    *out = new cf_trajectory{
        ciliaflow::objective(control, ciliaflow::initial_state(c.physics), c.grid.time_grid(), c.physics)};
  });
}

void cf_trajectory_free(cf_trajectory* trajectory) { delete trajectory; }

size_t cf_trajectory_nodes(const cf_trajectory* trajectory) {
  return trajectory ? static_cast<size_t>(trajectory->value.trajectory.nodes()) : 0;
}

size_t cf_trajectory_beads(const cf_trajectory* trajectory) {
  if (!trajectory || trajectory->value.trajectory.states.empty()) return 0;
  return static_cast<size_t>(trajectory->value.trajectory.states.front().size());
}

cf_status cf_trajectory_time(const cf_trajectory* trajectory, size_t node, double* t) {
  return guard([&] {
    require(trajectory && t, "null argument");
    require(node < cf_trajectory_nodes(trajectory), "node out of range");
    *t = trajectory->value.trajectory.grid.time(static_cast<int>(node));
  });
}

cf_status cf_trajectory_state(const cf_trajectory* trajectory, size_t node, double* coords) {
  return guard([&] {
    require(trajectory && coords, "null argument");
    require(node < cf_trajectory_nodes(trajectory), "node out of range");
    const auto& flat = trajectory->value.trajectory.states[node].flat();
    std::memcpy(coords, flat.data(), sizeof(double) * static_cast<size_t>(flat.size()));
  });
}

cf_status cf_trajectory_energy(const cf_trajectory* trajectory, size_t node, double* energy) {
  return guard([&] {
    require(trajectory && energy, "null argument");
    require(node < cf_trajectory_nodes(trajectory), "node out of range");
    *energy = trajectory->value.trajectory.energies[node].total();
  });
}

cf_status cf_trajectory_pumping(const cf_trajectory* trajectory, double* raw, double* flow) {
  return guard([&] {
    require(trajectory, "null trajectory");
    if (raw) *raw = trajectory->value.pumping.pumping_raw;
    if (flow) *flow = trajectory->value.pumping.pumping_flow;
  });
}

cf_status cf_objective(const cf_config* config, const double* knots, size_t count, double* objective,
                       double* gradient) {
  return guard([&] {
    require(config && knots && objective, "null argument");
    require(count >= 2, "need at least two knots");
    const auto& c = config->config;
    c.validate();
    const ciliaflow::ControlSignal control(
        c.grid.t0, c.grid.t0 + c.grid.T,
        Eigen::Map<const Eigen::VectorXd>(knots, static_cast<Eigen::Index>(count)));
    const auto x0 = ciliaflow::initial_state(c.physics);
    if (gradient) {
      const auto g = ciliaflow::control_gradient(control, x0, c.grid.time_grid(), c.physics);
      *objective = g.value.J;
      std::memcpy(gradient, g.gradient.data(), sizeof(double) * count);
    } else {
      *objective = ciliaflow::objective(control, x0, c.grid.time_grid(), c.physics).J;
    }
  });
}

cf_status cf_optimize(const cf_config* config, cf_report** out) {
  return guard([&] {
    require(config && out, "null argument");
    const auto& c = config->config;
    c.validate();
    const auto u0 = c.control.build(c.grid, c.seed);
    *out = new cf_report{ciliaflow::optimize(u0, ciliaflow::initial_state(c.physics), c.grid.time_grid(), c.physics,
                                             c.optimizer)};
  });
}

void cf_report_free(cf_report* report) { delete report; }

size_t cf_report_iterations(const cf_report* report) { return report ? report->report.iterations.size() : 0; }

const char* cf_report_termination(const cf_report* report) {
  return report ? ciliaflow::to_string(report->report.reason) : "";
}

cf_status cf_report_iteration(const cf_report* report, size_t k, double* objective, double* pumping_raw,
                              double* grad_norm) {
  return guard([&] {
    require(report, "null report");
    require(k < report->report.iterations.size(), "iteration out of range");
    const auto& it = report->report.iterations[k];
    if (objective) *objective = it.J;
    if (pumping_raw) *pumping_raw = it.pumping_raw;
    if (grad_norm) *grad_norm = it.grad_norm;
  });
}

cf_status cf_report_control(const cf_report* report, size_t k, double* knots, size_t* count) {
  return guard([&] {
    require(report && count, "null argument");
    require(k < report->report.iterations.size(), "iteration out of range");
    const auto& values = report->report.iterations[k].control.knots();
    *count = static_cast<size_t>(values.size());
    if (knots) std::memcpy(knots, values.data(), sizeof(double) * *count);
  });
}

}  // extern "C"
