#include "ciliaflow/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "ciliaflow/error.hpp"

namespace ciliaflow {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

double plain_number(std::string_view text) {
  const std::string s(trim(text));
  if (s.empty()) throw Error(ErrorCode::invalid_argument, "empty number");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) {
    throw Error(ErrorCode::invalid_argument, "not a number: '" + s + "'");
  }
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

long long parse_integer(std::string_view text) {
  const std::string s(trim(text));
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw Error(ErrorCode::invalid_argument, "not an integer: '" + s + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(std::string_view text) {
  const std::string s(trim(text));
  char* end = nullptr;
  errno = 0;
  if (s.empty() || s.front() == '-') throw Error(ErrorCode::invalid_argument, "not an unsigned integer: '" + s + "'");
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno == ERANGE) {
    throw Error(ErrorCode::invalid_argument, "not an unsigned integer: '" + s + "'");
  }
  return v;
}

bool parse_bool(std::string_view text) {
  const auto s = trim(text);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw Error(ErrorCode::invalid_argument, "not a boolean: '" + std::string(s) + "'");
}

int to_int(std::string_view text) {
  const long long v = parse_integer(text);
  if (v < INT32_MIN || v > INT32_MAX) throw Error(ErrorCode::invalid_argument, "integer out of range");
  return static_cast<int>(v);
}

std::string sanitize_name(std::string_view text) {
  std::string out;
  for (char c : text) {
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.') ? c : '_';
  }
  return out.empty() ? "preset" : out;
}

}  // namespace

double parse_number(std::string_view text) {
  std::string_view s = trim(text);
  const size_t pi_pos = s.find("pi");
  if (pi_pos == std::string_view::npos) return plain_number(s);

  double factor = 1.0;
  std::string_view head = trim(s.substr(0, pi_pos));
  if (head == "-") {
    factor = -1.0;
  } else if (head == "+" || head.empty()) {
    factor = 1.0;
  } else {
    if (head.back() != '*') throw Error(ErrorCode::invalid_argument, "bad pi expression: '" + std::string(s) + "'");
    factor = plain_number(head.substr(0, head.size() - 1));
  }
  double value = factor * std::numbers::pi;
  std::string_view tail = trim(s.substr(pi_pos + 2));
  if (!tail.empty()) {
    if (tail.front() != '/') throw Error(ErrorCode::invalid_argument, "bad pi expression: '" + std::string(s) + "'");
    const double denom = plain_number(tail.substr(1));
    if (denom == 0.0) throw Error(ErrorCode::invalid_argument, "division by zero in '" + std::string(s) + "'");
    value /= denom;
  }
  return value;
}

InitialControlSpec InitialControlSpec::parse(std::string_view text) {
  const std::string_view s = trim(text);
  InitialControlSpec spec;
  if (s == "quadratic_paper") {
    spec.kind = Kind::quadratic_paper;
    return spec;
  }
  const size_t open = s.find('(');
  if (open == std::string_view::npos || s.back() != ')') {
    throw Error(ErrorCode::invalid_argument, "bad control spec: '" + std::string(s) + "'");
  }
  const std::string_view name = trim(s.substr(0, open));
  const std::string_view body = s.substr(open + 1, s.size() - open - 2);
  std::vector<std::string_view> args = split(body, ',');
  if (args.size() == 1 && args[0].empty()) args.clear();

  auto want = [&](size_t lo, size_t hi) {
    if (args.size() < lo || args.size() > hi) {
      throw Error(ErrorCode::invalid_argument, "wrong argument count in '" + std::string(s) + "'");
    }
  };
  if (name == "constant") {
    want(1, 1);
    spec.kind = Kind::constant;
    spec.value = parse_number(args[0]);
  } else if (name == "linear") {
    want(1, 1);
    spec.kind = Kind::linear;
    spec.value = parse_number(args[0]);
  } else if (name == "uniform_random") {
    want(2, 3);
    spec.kind = Kind::uniform_random;
    spec.lo = parse_number(args[0]);
    spec.hi = parse_number(args[1]);
    if (!(spec.hi > spec.lo)) throw Error(ErrorCode::invalid_argument, "uniform_random needs hi > lo");
    if (args.size() == 3) {
      spec.has_seed = true;
      spec.seed = parse_unsigned(args[2]);
    }
  } else if (name == "knots") {
    want(2, SIZE_MAX);
    spec.kind = Kind::knots;
    for (auto a : args) spec.knots.push_back(parse_number(a));
  } else {
    throw Error(ErrorCode::invalid_argument, "unknown control kind '" + std::string(name) + "'");
  }
  return spec;
}

std::string InitialControlSpec::to_string() const {
  switch (kind) {
    case Kind::constant: return "constant(" + format_double(value) + ")";
    case Kind::linear: return "linear(" + format_double(value) + ")";
    case Kind::quadratic_paper: return "quadratic_paper";
    case Kind::uniform_random: {
      std::string s = "uniform_random(" + format_double(lo) + ", " + format_double(hi);
      if (has_seed) s += ", " + std::to_string(seed);
      return s + ")";
    }
    case Kind::knots: {
      std::string s = "knots(";
      for (size_t i = 0; i < knots.size(); ++i) s += (i ? ", " : "") + format_double(knots[i]);
      return s + ")";
    }
  }
  return {};
}

ControlSignal InitialControlSpec::build(const GridSettings& grid, std::uint64_t fallback_seed) const {
  const double t0 = grid.t0;
  const double tf = grid.t0 + grid.T;
  switch (kind) {
    case Kind::constant: return ControlSignal::constant(t0, tf, grid.N_u, value);
    case Kind::linear:
      return ControlSignal::sample(t0, tf, grid.N_u, [&](double t) { return value * t; });
    case Kind::quadratic_paper:
      return ControlSignal::sample(t0, tf, grid.N_u, [](double t) {
        const double d = t - std::numbers::pi / 4;
        return -d * d;
      });
    case Kind::uniform_random: {
      std::mt19937_64 gen(has_seed ? seed : fallback_seed);
      Eigen::VectorXd k(grid.N_u);
      // Explicit 53-bit mapping keeps draws identical across standard libraries.
      for (int m = 0; m < grid.N_u; ++m) k[m] = lo + (hi - lo) * static_cast<double>(gen() >> 11) * 0x1.0p-53;
      return {t0, tf, std::move(k)};
    }
    case Kind::knots: {
      const Eigen::VectorXd given = Eigen::Map<const Eigen::VectorXd>(knots.data(), static_cast<Eigen::Index>(knots.size()));
      const ControlSignal explicit_control(t0, tf, given);
      if (static_cast<int>(knots.size()) == grid.N_u) return explicit_control;
      return ControlSignal::sample(t0, tf, grid.N_u, [&](double t) { return explicit_control(t); });
    }
  }
  throw Error(ErrorCode::invalid_argument, "unknown control kind");
}

std::vector<SweepPreset> parse_presets(std::string_view text) {
  std::vector<SweepPreset> out;
  for (auto entry : split(text, ';')) {
    if (entry.empty()) continue;
    SweepPreset preset;
    const size_t eq = entry.find('=');
    if (eq != std::string_view::npos) {
      preset.name = sanitize_name(trim(entry.substr(0, eq)));
      preset.spec = InitialControlSpec::parse(entry.substr(eq + 1));
    } else {
      preset.spec = InitialControlSpec::parse(entry);
      preset.name = sanitize_name(preset.spec.to_string());
    }
    out.push_back(std::move(preset));
  }
  return out;
}

void apply_setting(RunConfig& c, std::string_view key_in, std::string_view value_in) {
  const std::string key(trim(key_in));
  const std::string_view v = trim(value_in);
  auto& p = c.physics;
  if (key == "physics.n") p.n = to_int(v);
  else if (key == "physics.a") p.a = parse_number(v);
  else if (key == "physics.chi") p.chi = parse_number(v);
  else if (key == "physics.eta") p.eta = parse_number(v);
  else if (key == "physics.k_stretch") p.k_stretch = parse_number(v);
  else if (key == "physics.A_bend") p.A_bend = parse_number(v);
  else if (key == "physics.B_field") p.B_field = parse_number(v);
  else if (key == "physics.mu0") p.mu0 = parse_number(v);
  else if (key == "physics.l_rest") p.l_rest = parse_number(v);
  else if (key == "grid.t0") c.grid.t0 = parse_number(v);
  else if (key == "grid.T") c.grid.T = parse_number(v);
  else if (key == "grid.N_t") c.grid.N_t = to_int(v);
  else if (key == "grid.N_u") c.grid.N_u = to_int(v);
  else if (key == "optimizer.eps") c.optimizer.eps = parse_number(v);
  else if (key == "optimizer.max_iter") c.optimizer.max_iter = to_int(v);
  else if (key == "optimizer.alpha_init") c.optimizer.line_search.alpha_init = parse_number(v);
  else if (key == "optimizer.backtrack") c.optimizer.line_search.backtrack = parse_number(v);
  else if (key == "optimizer.max_trials") c.optimizer.line_search.max_trials = to_int(v);
  else if (key == "optimizer.objective_scale") c.optimizer.objective_scale = parse_number(v);
  else if (key == "control.initial") c.control = InitialControlSpec::parse(v);
  else if (key == "sweep.presets") c.sweep = parse_presets(v);
  else if (key == "gradcheck.tolerance") c.gradcheck.tolerance = parse_number(v);
  else if (key == "gradcheck.fd_step") c.gradcheck.fd_step = parse_number(v);
  else if (key == "gradcheck.noise_floor") c.gradcheck.noise_floor = parse_number(v);
  else if (key == "gradcheck.flip_sign") c.gradcheck.flip_sign = parse_bool(v);
  else if (key == "output.dir") c.output_dir = std::string(v);
  else if (key == "run.seed") c.seed = parse_unsigned(v);
  else throw Error(ErrorCode::invalid_argument, "unknown key '" + key + "'");
}

void RunConfig::validate() const {
  physics.validate();
  if (physics.n < 2) throw ValidationError("n", "need at least two beads");
  if (!std::isfinite(grid.t0)) throw ValidationError("t0", "must be finite");
  if (!(std::isfinite(grid.T) && grid.T > 0.0)) throw ValidationError("T", "must be positive");
  if (grid.N_t < 2) throw ValidationError("N_t", "need at least 2 steps");
  if (grid.N_u < 2) throw ValidationError("N_u", "need at least 2 knots");
  if (grid.N_u > grid.N_t) throw ValidationError("N_u", "must not exceed N_t");
  if (!(optimizer.eps > 0.0)) throw ValidationError("eps", "must be positive");
  if (optimizer.max_iter < 0) throw ValidationError("max_iter", "must be non-negative");
  const auto& ls = optimizer.line_search;
  if (!(ls.alpha_init > 0.0)) throw ValidationError("alpha_init", "must be positive");
  if (!(ls.backtrack > 0.0 && ls.backtrack < 1.0)) throw ValidationError("backtrack", "must lie in (0, 1)");
  if (ls.max_trials < 1) throw ValidationError("max_trials", "must be at least 1");
  if (!(optimizer.objective_scale >= 0.0)) throw ValidationError("objective_scale", "must be >= 0 (0 = automatic)");
  if (!(gradcheck.tolerance > 0.0)) throw ValidationError("tolerance", "must be positive");
  if (!(gradcheck.fd_step > 0.0)) throw ValidationError("fd_step", "must be positive");
  if (!(gradcheck.noise_floor >= 0.0 && gradcheck.noise_floor < 1.0)) {
    throw ValidationError("noise_floor", "must lie in [0, 1)");
  }
  if (output_dir.empty()) throw ValidationError("dir", "must not be empty");
  for (size_t i = 0; i < sweep.size(); ++i) {
    for (size_t j = 0; j < i; ++j) {
      if (sweep[i].name == sweep[j].name) throw ValidationError("presets", "duplicate name '" + sweep[i].name + "'");
    }
  }
}

bool RunConfig::operator==(const RunConfig& o) const {
  return physics == o.physics && grid == o.grid && optimizer == o.optimizer && control == o.control &&
         sweep == o.sweep && gradcheck == o.gradcheck && output_dir == o.output_dir && seed == o.seed;
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  bool l_rest_given = false;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  std::vector<std::string> seen;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) throw ParseError(line_no, "duplicate key '" + key + "'");
    seen.push_back(key);
    try {
      apply_setting(c, key, line.substr(eq + 1));
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
    if (key == "physics.l_rest") l_rest_given = true;
  }
  if (!l_rest_given) c.physics.l_rest = 3.0 * c.physics.a;
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot read config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string save_config(const RunConfig& c) {
  std::ostringstream out;
  const auto& p = c.physics;
  out << "# ciliaflow run configuration (SI units)\n";
  out << "physics.n = " << p.n << '\n';
  out << "physics.a = " << format_double(p.a) << '\n';
  out << "physics.chi = " << format_double(p.chi) << '\n';
  out << "physics.eta = " << format_double(p.eta) << '\n';
  out << "physics.k_stretch = " << format_double(p.k_stretch) << '\n';
  out << "physics.A_bend = " << format_double(p.A_bend) << '\n';
  out << "physics.B_field = " << format_double(p.B_field) << '\n';
  out << "physics.mu0 = " << format_double(p.mu0) << '\n';
  out << "physics.l_rest = " << format_double(p.l_rest) << '\n';
  out << "grid.t0 = " << format_double(c.grid.t0) << '\n';
  out << "grid.T = " << format_double(c.grid.T) << '\n';
  out << "grid.N_t = " << c.grid.N_t << '\n';
  out << "grid.N_u = " << c.grid.N_u << '\n';
  out << "optimizer.eps = " << format_double(c.optimizer.eps) << '\n';
  out << "optimizer.max_iter = " << c.optimizer.max_iter << '\n';
  out << "optimizer.alpha_init = " << format_double(c.optimizer.line_search.alpha_init) << '\n';
  out << "optimizer.backtrack = " << format_double(c.optimizer.line_search.backtrack) << '\n';
  out << "optimizer.max_trials = " << c.optimizer.line_search.max_trials << '\n';
  out << "optimizer.objective_scale = " << format_double(c.optimizer.objective_scale) << '\n';
  out << "control.initial = " << c.control.to_string() << '\n';
  if (!c.sweep.empty()) {
    out << "sweep.presets = ";
    for (size_t i = 0; i < c.sweep.size(); ++i) {
      out << (i ? "; " : "") << c.sweep[i].name << '=' << c.sweep[i].spec.to_string();
    }
    out << '\n';
  }
  out << "gradcheck.tolerance = " << format_double(c.gradcheck.tolerance) << '\n';
  out << "gradcheck.fd_step = " << format_double(c.gradcheck.fd_step) << '\n';
  out << "gradcheck.noise_floor = " << format_double(c.gradcheck.noise_floor) << '\n';
  out << "gradcheck.flip_sign = " << (c.gradcheck.flip_sign ? "true" : "false") << '\n';
  out << "output.dir = " << c.output_dir << '\n';
  out << "run.seed = " << c.seed << '\n';
  return out.str();
}

}  // namespace ciliaflow
