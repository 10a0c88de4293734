#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "aggbne/game_model.hpp"
#include "aggbne/network.hpp"
#include "aggbne/solver.hpp"

namespace aggbne {

// Flat `section.key = value` experiment configuration. Unknown keys are
// rejected with a nearest-key suggestion; `#` starts a comment.
struct ExperimentConfig {
  // game
  std::string model = "cournot";
  int n = 5;
  double box_lo = 0.0;
  double box_hi = 20.0;
  double type_lo = 1.0;
  double type_hi = 2.0;
  double sign = -1.0;
  double d = 1200.0;
  double delta_step = 20.0;
  // discretization
  int N = 50;
  std::vector<int> N_list = {10, 20, 40};
  int N_fine = 160;
  // network
  std::string network_mode = "complete";
  std::uint64_t network_seed = 7;
  int window_B = 0;  // 0 derives n-1
  int period = 0;    // 0 derives n
  // solver
  long T = 50000;
  double stepsize_a = 2.0;
  double stepsize_b = 10.0;
  long record_every = 100;
  std::string init = "zeros";
  bool chain = true;
  int threads = 1;
  std::uint64_t seed = 0;
  // output
  std::string out_dir = "out";
  std::vector<Probe> probes;  // empty derives per-player probes at the
                              // 0.3/0.7 type quantiles
  bool emit_svg = true;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

// Canonical text form; parse_config(print_config(c)) reproduces c.
std::string print_config(const ExperimentConfig& config);

// Materialized pieces.
GameSpec config_game_spec(const ExperimentConfig& config);
GraphSchedule config_schedule(const ExperimentConfig& config);
StepsizeSchedule config_stepsizes(const ExperimentConfig& config);
RunOptions config_run_options(const ExperimentConfig& config);
std::vector<Probe> default_probes(int n, int N);

}  // namespace aggbne
