#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tandem/experiment.hpp"

using namespace tandem::cli;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const auto dir = fs::temp_directory_path() / ("tandem_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  const auto p = dir / name;
  std::ofstream f(p, std::ios::binary);
  f << text;
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run(const std::string& kind, const fs::path& config, const fs::path& out) {
  std::ostringstream o, e;
  const int code = run_command(kind, config.string(), out.string(), std::nullopt, o, e);
  if (code != 0) UNSCOPED_INFO(e.str());
  return code;
}

// strips the wall_ms column (the only measured, non-reproducible field)
std::string mask_timing(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    const auto cut = line.rfind(',');
    out << line.substr(0, cut) << "\n";
  }
  return out.str();
}

const char* kDesignConfig = R"(# small design run
experiment {
  kind: design
}
model {
  M: 2
  snr_db: -10
  bins: 32
}
network {
  N_list: 1..3
  rates: 1,2
  K: 2
  eta: 1e-6
  seed: 7
}
output {
  prefix: demo
}
)";

}  // namespace

TEST_CASE("config parser reads sections, lists and ranges", "[cli]") {
  const auto cfg = parse_config(kDesignConfig, "demo.cfg");
  CHECK(cfg.kind == "design");
  CHECK(cfg.hypotheses == 2);
  CHECK(cfg.bins == 32);
  CHECK(cfg.n_list == std::vector<int>{1, 2, 3});
  CHECK(cfg.rates == std::vector<int>{1, 2});
  CHECK(cfg.iterations == 2);
  CHECK(cfg.seed == 7);
  CHECK(cfg.prefix == "demo");
  CHECK(cfg.interval_pad == 4.0);  // default
}

TEST_CASE("config parser reports line-anchored diagnostics", "[cli]") {
  auto expect_error = [](const std::string& text, const std::string& needle) {
    try {
      parse_config(text, "bad.cfg");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      INFO(msg);
      CHECK(msg.find("bad.cfg:") != std::string::npos);
      CHECK(msg.find(needle) != std::string::npos);
    }
  };
  expect_error("experiment {\n  kind: design\n}\nmodel {\n  snrdb: 1\n}\n", "unknown key 'snrdb'");
  expect_error("weird {\n}\n", "unknown section");
  expect_error("experiment {\n  kind: sideways\n}\n", "unknown experiment kind");
  expect_error("experiment {\n  kind: design\n}\nnetwork {\n  K: zero\n}\n", "expected an integer");
  expect_error("experiment {\n  kind: design\n", "unterminated section");
  expect_error("model {\n  M: 2\n}\n", "missing experiment.kind");
}

TEST_CASE("design run writes sorted per-series CSVs and a manifest", "[cli]") {
  const auto dir = fresh_dir("design");
  const auto cfg = write_file(dir, "demo.cfg", kDesignConfig);
  REQUIRE(run("design", cfg, dir / "out") == 0);

  const auto csv1 = read_file(dir / "out" / "demo_rate-1.csv");
  const auto csv2 = read_file(dir / "out" / "demo_rate-2.csv");
  CHECK(csv1.rfind("N,series,log10_pe,pe,iterations_used,wall_ms\n", 0) == 0);
  // three rows after the header, sorted by N
  std::istringstream in(csv1);
  std::string line;
  std::getline(in, line);
  int expect_n = 1;
  while (std::getline(in, line)) {
    CHECK(line.rfind(std::to_string(expect_n) + ",rate-1,", 0) == 0);
    ++expect_n;
  }
  CHECK(expect_n == 4);
  CHECK(!csv2.empty());

  const auto manifest = read_file(dir / "out" / "demo_manifest.txt");
  CHECK(manifest.find("tandem manifest v1") != std::string::npos);
  CHECK(manifest.find("config_fnv1a64:") != std::string::npos);
  CHECK(manifest.find("cell rate-2 N=3") != std::string::npos);
  CHECK(manifest.find("mults_dominant:") != std::string::npos);
}

TEST_CASE("reruns with the same config and seed are byte-identical", "[cli]") {
  const auto dir = fresh_dir("determinism");
  const auto cfg = write_file(dir, "demo.cfg", kDesignConfig);
  REQUIRE(run("design", cfg, dir / "a") == 0);
  REQUIRE(run("design", cfg, dir / "b") == 0);
  for (const char* name : {"demo_rate-1.csv", "demo_rate-2.csv"}) {
    const auto a = read_file(dir / "a" / name);
    const auto b = read_file(dir / "b" / name);
    CHECK(mask_timing(a) == mask_timing(b));  // wall_ms is measured; all data columns must agree
  }
}

TEST_CASE("baseline run covers the closed-form series", "[cli]") {
  const auto dir = fresh_dir("baseline");
  const auto cfg = write_file(dir, "base.cfg", R"(
experiment { kind: baseline }
model { M: 2
        snr_db: 0 }
network { N_list: 1..14 }
output { prefix: base }
)");
  REQUIRE(run("baseline", cfg, dir / "out") == 0);
  for (const char* name : {"base_swaszek.csv", "base_cover.csv", "base_linear.csv"})
    CHECK(fs::exists(dir / "out" / name));
  const auto swz = read_file(dir / "out" / "base_swaszek.csv");
  CHECK(swz.find("14,swaszek,-1.841077") != std::string::npos);
  const auto cov = read_file(dir / "out" / "base_cover.csv");
  CHECK(cov.find("14,cover,-1.684159") != std::string::npos);
}

TEST_CASE("figure-style recipe emits designed, trace and overlay series", "[cli]") {
  const auto dir = fresh_dir("recipe");
  const auto cfg = write_file(dir, "fig.cfg", R"(
experiment {
  kind: design
  series: rate-1, rate-1-init, rate-1-iter-1, rate-1-iter-2, swaszek, cover, linear
}
model { M: 2
        snr_db: -10
        bins: 32 }
network { N_list: 1,2,4
          rates: 1
          K: 2
          seed: 3 }
output { prefix: fig }
)");
  REQUIRE(run("design", cfg, dir / "out") == 0);
  int csvs = 0;
  for (const auto& entry : fs::directory_iterator(dir / "out"))
    if (entry.path().extension() == ".csv") ++csvs;
  CHECK(csvs == 7);
  // the trace series are consistent: init >= iter-1 >= iter-2 = final
  const auto get_pe = [&](const std::string& name, int n) {
    std::istringstream in(read_file(dir / "out" / ("fig_" + name + ".csv")));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.rfind(std::to_string(n) + ",", 0) != 0) continue;
      std::size_t pos = 0;
      for (int c = 0; c < 3; ++c) pos = line.find(',', pos) + 1;
      return std::stod(line.substr(pos));
    }
    FAIL("row not found in " + name);
    return 0.0;
  };
  for (int n : {2, 4}) {
    CHECK(get_pe("rate-1-init", n) >= get_pe("rate-1-iter-1", n) - 1e-12);
    CHECK(get_pe("rate-1-iter-1", n) >= get_pe("rate-1-iter-2", n) - 1e-12);
    CHECK(get_pe("rate-1-iter-2", n) == Catch::Approx(get_pe("rate-1", n)).margin(1e-15));
  }
}

TEST_CASE("empty series list produces only the manifest", "[cli]") {
  const auto dir = fresh_dir("empty");
  const auto cfg = write_file(dir, "empty.cfg", R"(
experiment { kind: design
             series: }
model { M: 2 }
network { N_list: 1..4
          rates: 1 }
output { prefix: empty }
)");
  REQUIRE(run("design", cfg, dir / "out") == 0);
  CHECK(fs::exists(dir / "out" / "empty_manifest.txt"));
  int csvs = 0;
  for (const auto& entry : fs::directory_iterator(dir / "out"))
    if (entry.path().extension() == ".csv") ++csvs;
  CHECK(csvs == 0);
}

TEST_CASE("oracle subcommand: feasible run and infeasible exit code", "[cli]") {
  const auto dir = fresh_dir("oracle");
  const auto tiny = write_file(dir, "tiny.cfg", R"(
experiment { kind: oracle }
model { M: 2
        bins: 2 }
network { N_list: 1,2
          rates: 1
          K: 1 }
output { prefix: tiny }
)");
  REQUIRE(run("oracle", tiny, dir / "out") == 0);
  const auto manifest = read_file(dir / "out" / "tiny_manifest.txt");
  CHECK(manifest.find("cell oracle N=2") != std::string::npos);
  CHECK(manifest.find("optimum_pe:") != std::string::npos);
  // designed result can never beat the oracle
  const auto get_col = [&](const std::string& name, int n, int col) {
    std::istringstream in(read_file(dir / "out" / ("tiny_" + name + ".csv")));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.rfind(std::to_string(n) + ",", 0) != 0) continue;
      std::size_t pos = 0;
      for (int c = 0; c < col; ++c) pos = line.find(',', pos) + 1;
      return std::stod(line.substr(pos));
    }
    FAIL("row not found");
    return 0.0;
  };
  CHECK(get_col("rate-1", 2, 3) >= get_col("oracle", 2, 3) - 1e-12);

  const auto big = write_file(dir, "big.cfg", R"(
experiment { kind: oracle }
model { M: 2
        bins: 128 }
network { N_list: 3
          rates: 1 }
output { prefix: big }
)");
  std::ostringstream o, e;
  CHECK(run_command("oracle", big.string(), (dir / "out").string(), std::nullopt, o, e) == 3);
  CHECK(e.str().find("exceeds budget") != std::string::npos);
}

TEST_CASE("montecarlo subcommand validates the analytic error", "[cli]") {
  const auto dir = fresh_dir("mc");
  const auto cfg = write_file(dir, "mc.cfg", R"(
experiment { kind: montecarlo
             trials: 100000 }
model { M: 2
        snr_db: -10
        bins: 32 }
network { N_list: 2,3
          rates: 1
          K: 2
          seed: 11 }
output { prefix: mc }
)");
  REQUIRE(run("montecarlo", cfg, dir / "out") == 0);
  const auto manifest = read_file(dir / "out" / "mc_manifest.txt");
  CHECK(manifest.find("montecarlo:") != std::string::npos);
  CHECK(manifest.find("analytic_inside_ci: yes") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "mc_mc-rate-1.csv"));
}

TEST_CASE("bad configs exit with code 2", "[cli]") {
  const auto dir = fresh_dir("bad");
  std::ostringstream o, e;
  CHECK(run_command("design", (dir / "missing.cfg").string(), std::nullopt, std::nullopt, o, e) == 2);

  const auto mismatch = write_file(dir, "mismatch.cfg", R"(
experiment { kind: baseline }
model { M: 2 }
network { N_list: 1 }
output { prefix: x }
)");
  CHECK(run_command("design", mismatch.string(), (dir / "out").string(), std::nullopt, o, e) == 2);

  const auto badseries = write_file(dir, "badseries.cfg", R"(
experiment { kind: design
             series: rate-3 }
model { M: 2 }
network { N_list: 1
          rates: 1 }
output { prefix: x }
)");
  CHECK(run_command("design", badseries.string(), (dir / "out").string(), std::nullopt, o, e) == 2);

  const auto mary = write_file(dir, "mary.cfg", R"(
experiment { kind: baseline
             series: swaszek }
model { M: 3 }
network { N_list: 1 }
output { prefix: x }
)");
  CHECK(run_command("baseline", mary.string(), (dir / "out").string(), std::nullopt, o, e) == 2);
}

TEST_CASE("seed override changes the stream, same seed repeats it", "[cli]") {
  const auto dir = fresh_dir("seed");
  const auto cfg = write_file(dir, "demo.cfg", kDesignConfig);
  std::ostringstream o, e;
  REQUIRE(run_command("design", cfg.string(), (dir / "a").string(), 123u, o, e) == 0);
  REQUIRE(run_command("design", cfg.string(), (dir / "b").string(), 123u, o, e) == 0);
  const auto a = read_file(dir / "a" / "demo_rate-1.csv");
  const auto b = read_file(dir / "b" / "demo_rate-1.csv");
  CHECK(mask_timing(a) == mask_timing(b));
  const auto manifest = read_file(dir / "a" / "demo_manifest.txt");
  CHECK(manifest.find("root_seed: 123") != std::string::npos);
}
