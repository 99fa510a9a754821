// Command-line front end. Talks to the library only through the C API.
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ciliaflow/ciliaflow.h"

namespace {

int config_failure(const char* what) {
  std::fprintf(stderr, "ciliaflow: %s: %s\n", what, cf_last_error());
  return CF_EXIT_VALIDATION;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Magnetic artificial cilium simulation and field-angle optimal control"};
  app.set_version_flag("--version", std::string(cf_version()));
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> nt;
  std::optional<int> nu;

  const char* commands[][2] = {
      {"simulate", "Forward solve of the initial control; writes trajectory, energies and pumping"},
      {"optimize", "Conjugate-gradient optimization of the field angle"},
      {"gradcheck", "Compare the adjoint gradient against central finite differences"},
      {"sweep", "Optimize once per initial-control preset"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Key-value configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "Random seed (overrides run.seed)");
    sub->add_option("--nt", nt, "Time steps N_t (overrides grid.N_t)")->check(CLI::PositiveNumber);
    sub->add_option("--nu", nu, "Control knots N_u (overrides grid.N_u)")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? CF_EXIT_SUCCESS : CF_EXIT_VALIDATION;
  }

  cf_config* config = nullptr;
  if (cf_config_load(config_path.c_str(), &config) != CF_OK) return config_failure("cannot load config");

  bool ok = true;
  if (out_dir) ok = ok && cf_config_set(config, "output.dir", out_dir->c_str()) == CF_OK;
  if (seed) ok = ok && cf_config_set(config, "run.seed", std::to_string(*seed).c_str()) == CF_OK;
  if (nt) ok = ok && cf_config_set(config, "grid.N_t", std::to_string(*nt).c_str()) == CF_OK;
  if (nu) ok = ok && cf_config_set(config, "grid.N_u", std::to_string(*nu).c_str()) == CF_OK;
  if (!ok || cf_config_validate(config) != CF_OK) {
    const int code = config_failure("invalid override");
    cf_config_free(config);
    return code;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  int code = CF_EXIT_VALIDATION;
  if (command == "simulate") code = cf_cmd_simulate(config);
  else if (command == "optimize") code = cf_cmd_optimize(config);
  else if (command == "gradcheck") code = cf_cmd_gradcheck(config);
  else if (command == "sweep") code = cf_cmd_sweep(config);
  cf_config_free(config);
  return code;
}
