#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "aggbne/experiment.hpp"

using namespace aggbne;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ExperimentConfig small_config(const std::string& out_dir) {
  ExperimentConfig c;
  c.N = 8;
  c.T = 300;
  c.record_every = 50;
  c.out_dir = out_dir;
  return c;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("run_experiment produces the artifact set") {
  TempDir dir("aggbne_test_run");
  const ExperimentSummary summary = run_experiment(small_config(dir.path.string()));
  CHECK(fs::exists(dir.path / "trace.csv"));
  CHECK(fs::exists(dir.path / "oracle.csv"));
  CHECK(fs::exists(dir.path / "report.txt"));
  CHECK(fs::exists(dir.path / "convergence.svg"));
  CHECK(fs::exists(dir.path / "consensus.svg"));
  CHECK_FALSE(fs::exists(dir.path / "FAILED"));
  CHECK(summary.final_oracle_distance <= 1e-3);
  CHECK(summary.conservation_max <= 1e-10);
  CHECK(summary.oracle_epsilon <= 1e-8);

  const std::string trace = slurp(dir.path / "trace.csv");
  CHECK(trace.rfind("t,consensus_residual,oracle_distance,stepsize", 0) == 0);
  const std::string svg = slurp(dir.path / "convergence.svg");
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("player1/type") != std::string::npos);
}

TEST_CASE("repeated runs are byte-identical") {
  TempDir dir_a("aggbne_test_det_a");
  TempDir dir_b("aggbne_test_det_b");
  run_experiment(small_config(dir_a.path.string()));
  run_experiment(small_config(dir_b.path.string()));
  CHECK(slurp(dir_a.path / "trace.csv") == slurp(dir_b.path / "trace.csv"));
  CHECK(slurp(dir_a.path / "oracle.csv") == slurp(dir_b.path / "oracle.csv"));
  CHECK(slurp(dir_a.path / "convergence.svg") ==
        slurp(dir_b.path / "convergence.svg"));
}

TEST_CASE("a failing stage leaves a marker naming it") {
  TempDir dir("aggbne_test_fail");
  ExperimentConfig c = small_config(dir.path.string());
  c.network_mode = "round-robin-edges";
  c.period = 2;  // nodes 3 and 4 never communicate
  CHECK_THROWS_AS(run_experiment(c), ValidationError);
  REQUIRE(fs::exists(dir.path / "FAILED"));
  CHECK(slurp(dir.path / "FAILED").find("validate_schedule") != std::string::npos);
}

TEST_CASE("study on an interior instance shows shrinking epsilon") {
  TempDir dir("aggbne_test_study");
  ExperimentConfig c;
  c.d = 20.0;
  c.delta_step = 2.0;
  c.N_list = {4, 8};
  c.N_fine = 16;
  c.out_dir = dir.path.string();
  const StudySummary summary = run_study(c);
  REQUIRE(summary.epsilon_rows.size() == 2);
  CHECK(summary.epsilon_rows[0].epsilon > summary.epsilon_rows[1].epsilon);
  REQUIRE(summary.refinement_rows.size() == 2);
  CHECK(summary.refinement_rows[0].sup_gap >= summary.refinement_rows[1].sup_gap);
  CHECK(fs::exists(dir.path / "study.csv"));
  const std::string csv = slurp(dir.path / "study.csv");
  CHECK(csv.rfind("N,epsilon,certified_tol,runtime_ms", 0) == 0);
  CHECK(fs::exists(dir.path / "refinement.csv"));
}

TEST_CASE("mixing diagnostics artifacts") {
  TempDir dir("aggbne_test_mixing");
  ExperimentConfig c;
  c.network_mode = "ring-static";
  c.out_dir = dir.path.string();
  const MixingSummary summary = run_mixing(c);
  CHECK(summary.fit.beta < 1.0);
  CHECK(summary.deviations.back() <= 1e-6);
  CHECK(fs::exists(dir.path / "mixing.csv"));
  CHECK(fs::exists(dir.path / "mixing_report.txt"));
  CHECK(fs::exists(dir.path / "weights_t0.csv"));
}

TEST_CASE("verify runs the invariant suite") {
  TempDir dir("aggbne_test_verify");
  ExperimentConfig c;
  c.N = 6;
  c.out_dir = dir.path.string();
  const VerifySummary summary = run_verify(c);
  CHECK(summary.model.max_grad_rel_err <= 1e-6);
  CHECK(summary.count_table_residual <= 1e-12);
  CHECK(summary.gradient_rel_err <= 1e-5);
  CHECK(fs::exists(dir.path / "verify_report.txt"));
}
