#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

// ESA_BENCH_PATH is injected by the build so the suite exercises the real
// binary end to end.
const std::string kBench = ESA_BENCH_PATH;

int run_cli(const std::string& args) {
  const std::string cmd = "ESA_THREADS=1 " + kBench + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("esa_cli_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  os << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream is(p);
  std::string line;
  std::getline(is, line);
  return line;
}

const char* kTinyTrainConfig = R"({
  "name": "cli_smoke",
  "env": "pendulum",
  "seeds": [1],
  "algo": {"total_steps": 4096, "lr": 0.001, "threshold": -300.0},
  "esa": {"enabled": true, "amplitude": 0.2}
})";

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("malformed config: nonzero exit and no output files") {
  const fs::path dir = fresh_dir("malformed");
  const fs::path cfg = dir / "bad.json";
  write_file(cfg, "{ this is not json");
  const fs::path out = dir / "out";
  CHECK(run_cli("train --config " + cfg.string() + " --out " + out.string()) != 0);
  CHECK(!fs::exists(out));
}

TEST_CASE("missing config file and bad seed list fail cleanly") {
  const fs::path dir = fresh_dir("badargs");
  CHECK(run_cli("train --config " + (dir / "absent.json").string()) != 0);
  const fs::path cfg = dir / "ok.json";
  write_file(cfg, kTinyTrainConfig);
  CHECK(run_cli("train --config " + cfg.string() + " --seed-list 1,x --out " +
                (dir / "out").string()) != 0);
  CHECK(run_cli("bogus-subcommand --config " + cfg.string()) != 0);
}

TEST_CASE("scan-q with a missing checkpoint exits nonzero") {
  const fs::path dir = fresh_dir("scanq");
  const fs::path cfg = dir / "scan.json";
  write_file(cfg, R"({
    "name": "scan_smoke", "env": "pendulum", "seeds": [1],
    "scan": {"checkpoint": ")" +
                      (dir / "no_such_checkpoint.txt").string() + R"("}
  })");
  CHECK(run_cli("scan-q --config " + cfg.string() + " --out " +
                (dir / "out").string()) != 0);
  CHECK(!fs::exists(dir / "out" / "scan_q.csv"));
}

TEST_CASE("train smoke run: expected artifacts, schema, and determinism") {
  const fs::path dir = fresh_dir("train");
  const fs::path cfg = dir / "train.json";
  write_file(cfg, kTinyTrainConfig);

  const fs::path out_a = dir / "a";
  const fs::path out_b = dir / "b";
  REQUIRE(run_cli("train --config " + cfg.string() + " --out " + out_a.string()) == 0);
  REQUIRE(run_cli("train --config " + cfg.string() + " --out " + out_b.string()) == 0);

  const std::vector<std::string> files{
      "curves_baseline_1.csv", "curves_esa_1.csv",      "timing_baseline_1.csv",
      "timing_esa_1.csv",      "checkpoint_baseline_1.txt", "checkpoint_esa_1.txt",
      "summary.csv",           "timing_summary.csv",    "plot_train.svg"};
  for (const std::string& f : files) CHECK(fs::exists(out_a / f));

  // First line is the config-hash comment: "# config_hash=" + 16 hex digits.
  const std::string head = first_line(out_a / "curves_baseline_1.csv");
  REQUIRE(head.size() == 30);
  CHECK(head.substr(0, 14) == "# config_hash=");
  CHECK(head.find_first_not_of("0123456789abcdef", 14) == std::string::npos);
  CHECK(first_line(out_a / "summary.csv") == head);

  std::ifstream curves(out_a / "curves_baseline_1.csv");
  std::string comment, header;
  std::getline(curves, comment);
  std::getline(curves, header);
  CHECK(header ==
        "iteration,env_steps,mean_return,std_return,trailing_return,mean_abs_v,"
        "mean_filtered_q");

  // Rerun determinism: every non-timing artifact is byte-identical.
  for (const std::string& f :
       {"curves_baseline_1.csv", "curves_esa_1.csv", "checkpoint_baseline_1.txt",
        "checkpoint_esa_1.txt", "summary.csv", "plot_train.svg"}) {
    CHECK(slurp(out_a / f) == slurp(out_b / f));
  }
}

TEST_CASE("overrides reach the config and change its hash") {
  const fs::path dir = fresh_dir("override");
  const fs::path cfg = dir / "train.json";
  write_file(cfg, kTinyTrainConfig);
  const fs::path out_a = dir / "a";
  const fs::path out_b = dir / "b";
  REQUIRE(run_cli("train --config " + cfg.string() + " --out " + out_a.string() +
                  " --override esa.enabled=false") == 0);
  CHECK(fs::exists(out_a / "curves_baseline_1.csv"));
  CHECK(!fs::exists(out_a / "curves_esa_1.csv"));  // override disabled the variant

  REQUIRE(run_cli("train --config " + cfg.string() + " --out " + out_b.string() +
                  " --override algo.total_steps=2048") == 0);
  CHECK(first_line(out_a / "summary.csv") != first_line(out_b / "summary.csv"));
}

TEST_CASE("esc-demo smoke run produces the demo artifacts") {
  const fs::path dir = fresh_dir("demo");
  const fs::path cfg = dir / "demo.json";
  write_file(cfg, R"({
    "name": "demo_smoke", "seeds": [1],
    "demo": {"esc_static_steps": 500, "esc_dynamic_steps": 200,
             "sg_batches": [1, 10], "query_cap": 1500}
  })");
  const fs::path out = dir / "out";
  REQUIRE(run_cli("esc-demo --config " + cfg.string() + " --out " + out.string()) == 0);
  CHECK(fs::exists(out / "summary.csv"));
  CHECK(fs::exists(out / "plot_esc_demo.svg"));
  std::ifstream s(out / "summary.csv");
  std::string comment, header;
  std::getline(s, comment);
  std::getline(s, header);
  CHECK(header == "section,method,seed,queries_to_level,final_j,max_err_4_10");
}

TEST_SUITE_END();
