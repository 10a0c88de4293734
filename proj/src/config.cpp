#include "aggbne/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace aggbne {

namespace {

const char* const kKnownKeys[] = {
    "game.model",        "game.n",           "game.box_lo",
    "game.box_hi",       "game.type_lo",     "game.type_hi",
    "game.sign",         "game.d",           "game.delta_step",
    "discretization.N",  "discretization.N_list", "discretization.N_fine",
    "network.mode",      "network.seed",     "network.B",
    "network.period",    "solver.T",         "solver.a",
    "solver.b",          "solver.record_every", "solver.init",
    "solver.chain",      "solver.threads",   "solver.seed",
    "output.dir",        "output.probes",    "output.emit_svg",
};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

int edit_distance(const std::string& a, const std::string& b) {
  std::vector<int> row(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) row[j] = static_cast<int>(j);
  for (size_t i = 1; i <= a.size(); ++i) {
    int diag = row[0];
    row[0] = static_cast<int>(i);
    for (size_t j = 1; j <= b.size(); ++j) {
      const int subst = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      diag = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, subst});
    }
  }
  return row[b.size()];
}

std::string nearest_key(const std::string& key) {
  std::string best;
  int best_distance = 1 << 20;
  for (const char* candidate : kKnownKeys) {
    const int d = edit_distance(key, candidate);
    if (d < best_distance) {
      best_distance = d;
      best = candidate;
    }
  }
  return best;
}

[[noreturn]] void fail(int line, const std::string& message) {
  throw ConfigError("config line " + std::to_string(line) + ": " + message);
}

long parse_long(const std::string& value, int line, const std::string& key) {
  try {
    size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    fail(line, "expected an integer for " + key + ", got '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& value, int line, const std::string& key) {
  try {
    size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    fail(line, "expected an unsigned integer for " + key + ", got '" + value + "'");
  }
}

double parse_double(const std::string& value, int line, const std::string& key) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    fail(line, "expected a number for " + key + ", got '" + value + "'");
  }
}

bool parse_bool(const std::string& value, int line, const std::string& key) {
  if (value == "true") return true;
  if (value == "false") return false;
  fail(line, "expected true|false for " + key + ", got '" + value + "'");
}

std::vector<std::string> split(const std::string& value, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(value);
  while (std::getline(in, part, sep)) parts.push_back(trim(part));
  return parts;
}

void apply(ExperimentConfig& c, const std::string& key, const std::string& value,
           int line) {
  if (key == "game.model") {
    if (value != "cournot") fail(line, "unknown game.model '" + value + "'");
    c.model = value;
  } else if (key == "game.n") {
    c.n = static_cast<int>(parse_long(value, line, key));
    if (c.n < 2) fail(line, "game.n must be >= 2");
  } else if (key == "game.box_lo") {
    c.box_lo = parse_double(value, line, key);
  } else if (key == "game.box_hi") {
    c.box_hi = parse_double(value, line, key);
  } else if (key == "game.type_lo") {
    c.type_lo = parse_double(value, line, key);
  } else if (key == "game.type_hi") {
    c.type_hi = parse_double(value, line, key);
  } else if (key == "game.sign") {
    c.sign = parse_double(value, line, key);
    if (c.sign != 1.0 && c.sign != -1.0) fail(line, "game.sign must be 1 or -1");
  } else if (key == "game.d") {
    c.d = parse_double(value, line, key);
  } else if (key == "game.delta_step") {
    c.delta_step = parse_double(value, line, key);
  } else if (key == "discretization.N") {
    c.N = static_cast<int>(parse_long(value, line, key));
    if (c.N < 1) fail(line, "discretization.N must be >= 1");
  } else if (key == "discretization.N_list") {
    c.N_list.clear();
    for (const std::string& part : split(value, ',')) {
      const int N = static_cast<int>(parse_long(part, line, key));
      if (N < 1) fail(line, "discretization.N_list entries must be >= 1");
      c.N_list.push_back(N);
    }
    if (c.N_list.empty()) fail(line, "discretization.N_list is empty");
  } else if (key == "discretization.N_fine") {
    c.N_fine = static_cast<int>(parse_long(value, line, key));
    if (c.N_fine < 1) fail(line, "discretization.N_fine must be >= 1");
  } else if (key == "network.mode") {
    graph_mode_from_string(value);  // validates
    c.network_mode = value;
  } else if (key == "network.seed") {
    c.network_seed = parse_u64(value, line, key);
  } else if (key == "network.B") {
    c.window_B = static_cast<int>(parse_long(value, line, key));
    if (c.window_B < 0) fail(line, "network.B must be >= 0 (0 derives n-1)");
  } else if (key == "network.period") {
    c.period = static_cast<int>(parse_long(value, line, key));
    if (c.period < 0) fail(line, "network.period must be >= 0 (0 derives n)");
  } else if (key == "solver.T") {
    c.T = parse_long(value, line, key);
    if (c.T < 0) fail(line, "solver.T must be >= 0");
  } else if (key == "solver.a") {
    c.stepsize_a = parse_double(value, line, key);
    if (!(c.stepsize_a > 0)) fail(line, "solver.a must be > 0");
  } else if (key == "solver.b") {
    c.stepsize_b = parse_double(value, line, key);
    if (!(c.stepsize_b >= 1)) fail(line, "solver.b must be >= 1");
  } else if (key == "solver.record_every") {
    c.record_every = parse_long(value, line, key);
    if (c.record_every < 1) fail(line, "solver.record_every must be >= 1");
  } else if (key == "solver.init") {
    init_rule_from_string(value);  // validates
    c.init = value;
  } else if (key == "solver.chain") {
    c.chain = parse_bool(value, line, key);
  } else if (key == "solver.threads") {
    c.threads = static_cast<int>(parse_long(value, line, key));
    if (c.threads < 1) fail(line, "solver.threads must be >= 1");
  } else if (key == "solver.seed") {
    c.seed = parse_u64(value, line, key);
  } else if (key == "output.dir") {
    c.out_dir = value;
  } else if (key == "output.probes") {
    c.probes.clear();
    for (const std::string& part : split(value, ',')) {
      const auto colon = part.find(':');
      if (colon == std::string::npos) {
        fail(line, "output.probes entries look like player:type_index (1-based)");
      }
      Probe p;
      p.player = static_cast<int>(parse_long(trim(part.substr(0, colon)), line, key)) - 1;
      p.type_index =
          static_cast<int>(parse_long(trim(part.substr(colon + 1)), line, key)) - 1;
      if (p.player < 0 || p.type_index < 0) {
        fail(line, "output.probes indices are 1-based");
      }
      c.probes.push_back(p);
    }
  } else if (key == "output.emit_svg") {
    c.emit_svg = parse_bool(value, line, key);
  } else {
    fail(line, "unknown key '" + key + "' (did you mean '" + nearest_key(key) + "'?)");
  }
}

void check_ranges(const ExperimentConfig& c) {
  if (!(c.box_lo < c.box_hi)) throw ConfigError("game.box_lo must be < game.box_hi");
  if (!(c.type_lo < c.type_hi)) {
    throw ConfigError("game.type_lo must be < game.type_hi");
  }
  for (const Probe& p : c.probes) {
    if (p.player >= c.n) throw ConfigError("output.probes player exceeds game.n");
    if (p.type_index >= c.N) {
      throw ConfigError("output.probes type index exceeds discretization.N");
    }
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string text = trim(raw);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      fail(line, "expected 'section.key = value', got '" + text + "'");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) fail(line, "missing key");
    apply(config, key, value, line);
  }
  check_ranges(config);
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string print_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "game.model = " << c.model << "\n";
  os << "game.n = " << c.n << "\n";
  os << "game.box_lo = " << format_double(c.box_lo) << "\n";
  os << "game.box_hi = " << format_double(c.box_hi) << "\n";
  os << "game.type_lo = " << format_double(c.type_lo) << "\n";
  os << "game.type_hi = " << format_double(c.type_hi) << "\n";
  os << "game.sign = " << format_double(c.sign) << "\n";
  os << "game.d = " << format_double(c.d) << "\n";
  os << "game.delta_step = " << format_double(c.delta_step) << "\n";
  os << "discretization.N = " << c.N << "\n";
  os << "discretization.N_list = ";
  for (size_t i = 0; i < c.N_list.size(); ++i) os << (i ? "," : "") << c.N_list[i];
  os << "\n";
  os << "discretization.N_fine = " << c.N_fine << "\n";
  os << "network.mode = " << c.network_mode << "\n";
  os << "network.seed = " << c.network_seed << "\n";
  os << "network.B = " << c.window_B << "\n";
  os << "network.period = " << c.period << "\n";
  os << "solver.T = " << c.T << "\n";
  os << "solver.a = " << format_double(c.stepsize_a) << "\n";
  os << "solver.b = " << format_double(c.stepsize_b) << "\n";
  os << "solver.record_every = " << c.record_every << "\n";
  os << "solver.init = " << c.init << "\n";
  os << "solver.chain = " << (c.chain ? "true" : "false") << "\n";
  os << "solver.threads = " << c.threads << "\n";
  os << "solver.seed = " << c.seed << "\n";
  os << "output.dir = " << c.out_dir << "\n";
  if (!c.probes.empty()) {
    os << "output.probes = ";
    for (size_t i = 0; i < c.probes.size(); ++i) {
      os << (i ? "," : "") << c.probes[i].player + 1 << ":"
         << c.probes[i].type_index + 1;
    }
    os << "\n";
  }
  os << "output.emit_svg = " << (c.emit_svg ? "true" : "false") << "\n";
  return os.str();
}

GameSpec config_game_spec(const ExperimentConfig& c) {
  return make_cournot_spec(c.n, c.box_lo, c.box_hi,
                           uniform_interval(c.type_lo, c.type_hi), c.N, c.d,
                           c.delta_step, c.sign);
}

GraphSchedule config_schedule(const ExperimentConfig& c) {
  GraphSchedule sched =
      make_graph_schedule(c.n, graph_mode_from_string(c.network_mode),
                          c.network_seed);
  if (c.window_B > 0) sched.window = c.window_B;
  if (c.period > 0) sched.period = c.period;
  return sched;
}

StepsizeSchedule config_stepsizes(const ExperimentConfig& c) {
  StepsizeSchedule s;
  s.a = c.stepsize_a;
  s.b = c.stepsize_b;
  s.validate();
  return s;
}

std::vector<Probe> default_probes(int n, int N) {
  const auto quantile_index = [N](double q) {
    const int k = static_cast<int>(std::llround(q * N));
    return std::max(0, std::min(N - 1, k - 1));
  };
  std::vector<Probe> probes;
  for (int i = 0; i < n; ++i) probes.push_back({i, quantile_index(0.3)});
  for (int i = 0; i < n; ++i) probes.push_back({i, quantile_index(0.7)});
  return probes;
}

RunOptions config_run_options(const ExperimentConfig& c) {
  RunOptions options;
  options.T = c.T;
  options.record_every = c.record_every;
  options.probes = c.probes.empty() ? default_probes(c.n, c.N) : c.probes;
  options.include_chain = c.chain;
  options.threads = c.threads;
  options.init = init_rule_from_string(c.init);
  options.seed = c.seed;
  return options;
}

}  // namespace aggbne
