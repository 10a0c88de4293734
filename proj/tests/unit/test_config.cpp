#include <doctest.h>

#include <sstream>

#include "aggbne/config.hpp"

using namespace aggbne;

namespace {

ExperimentConfig parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

bool same(const ExperimentConfig& a, const ExperimentConfig& b) {
  return print_config(a) == print_config(b);
}

}  // namespace

TEST_CASE("empty config yields the full defaults") {
  const ExperimentConfig c = parse_text("");
  CHECK(c.model == "cournot");
  CHECK(c.n == 5);
  CHECK(c.N == 50);
  CHECK(c.box_hi == 20.0);
  CHECK(c.type_lo == 1.0);
  CHECK(c.type_hi == 2.0);
  CHECK(c.sign == -1.0);
  CHECK(c.d == 1200.0);
  CHECK(c.T == 50000);
  CHECK(c.network_mode == "complete");
}

TEST_CASE("single-key override") {
  const ExperimentConfig c = parse_text("discretization.N = 200\n");
  CHECK(c.N == 200);
  ExperimentConfig defaults;
  defaults.N = 200;
  CHECK(same(c, defaults));
}

TEST_CASE("comments, blank lines and spacing are tolerated") {
  const ExperimentConfig c = parse_text(
      "# a comment\n"
      "\n"
      "  solver.T=123   # trailing comment\n"
      "network.mode = ring-static\n");
  CHECK(c.T == 123);
  CHECK(c.network_mode == "ring-static");
}

TEST_CASE("range violations name the key") {
  CHECK_THROWS_WITH_AS(parse_text("solver.T = -1\n"),
                       doctest::Contains("solver.T"), ConfigError);
  CHECK_THROWS_AS(parse_text("game.n = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_text("game.sign = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_text("game.box_lo = 5\ngame.box_hi = 1\n"), ConfigError);
}

TEST_CASE("unknown keys come back with a suggestion and line number") {
  try {
    parse_text("\nsolver.record_evry = 10\n");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("line 2") != std::string::npos);
    CHECK(what.find("solver.record_every") != std::string::npos);
  }
}

TEST_CASE("parse errors carry line numbers") {
  try {
    parse_text("game.n = 5\nnot a key value line\n");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("probe lists parse as 1-based pairs") {
  const ExperimentConfig c = parse_text("output.probes = 1:15, 3:35\n");
  REQUIRE(c.probes.size() == 2);
  CHECK(c.probes[0].player == 0);
  CHECK(c.probes[0].type_index == 14);
  CHECK(c.probes[1].player == 2);
  CHECK(c.probes[1].type_index == 34);
  CHECK_THROWS_AS(parse_text("output.probes = 9:1\n"), ConfigError);   // player > n
  CHECK_THROWS_AS(parse_text("output.probes = 1:99\n"), ConfigError);  // k > N
  CHECK_THROWS_AS(parse_text("output.probes = 0:3\n"), ConfigError);   // 1-based
}

TEST_CASE("round-trip through the printer") {
  ExperimentConfig c;
  c.N = 32;
  c.N_list = {8, 16, 32};
  c.N_fine = 64;
  c.network_mode = "round-robin-edges";
  c.window_B = 4;
  c.T = 777;
  c.stepsize_a = 1.5;
  c.init = "random";
  c.chain = false;
  c.probes = {{0, 3}, {4, 30}};
  c.out_dir = "artifacts";
  const ExperimentConfig back = parse_text(print_config(c));
  CHECK(same(c, back));
}

TEST_CASE("materialized pieces") {
  ExperimentConfig c;
  c.N = 8;
  const GameSpec spec = config_game_spec(c);
  CHECK(spec.n_players == 5);
  CHECK(spec.N == 8);
  CHECK(spec.models.size() == 5);

  const GraphSchedule sched = config_schedule(c);
  CHECK(sched.n == 5);
  CHECK(sched.window == 1);  // complete mode

  c.network_mode = "round-robin-edges";
  CHECK(config_schedule(c).window == 4);  // derives n-1
  c.window_B = 2;
  CHECK(config_schedule(c).window == 2);

  const std::vector<Probe> probes = default_probes(5, 50);
  REQUIRE(probes.size() == 10);
  CHECK(probes[0].type_index == 14);  // theta = 1.3 at N = 50
  CHECK(probes[5].type_index == 34);  // theta = 1.7
}
