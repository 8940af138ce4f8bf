#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("fbqo_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  static const struct Cleanup {
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(dir, ec);
    }
  } cleanup;
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args, const std::string& env = "") {
  const fs::path err = scratch() / "stderr.txt";
  const std::string cmd = env + " " + FBQO_CLI + " " + args + " 2>" + err.string();
  Run r;
  FILE* p = ::popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err);
  return r;
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  FAIL("missing column " << name);
  return 0;
}

const std::string kLoclen = "loclen --model sawtooth --site a:50 --g 1e-3 --scan-delta 1e-3:1e-1:log:7";

}  // namespace

TEST_CASE("bands writes two bands per k point") {
  const fs::path out = scratch() / "bands.csv";
  const Run r = run("bands --model sawtooth --N 256 --J 1 --out " + out.string());
  REQUIRE(r.code == 0);
  const auto rows = csv(slurp(out));
  REQUIRE(rows.size() == 1 + 2 * 256);
  CHECK(rows[0] == std::vector<std::string>{"k_1", "band_index", "energy"});
  const std::size_t e = column(rows[0], "energy");
  for (std::size_t i = 1; i < rows.size(); i += 2) CHECK(std::stod(rows[i][e]) == doctest::Approx(-2.0));

  const auto cb = csv(run("bands --model checkerboard --N 6,4").out);
  REQUIRE(cb.size() == 1 + 2 * 24);
  CHECK(cb[0] == std::vector<std::string>{"k_1", "k_2", "band_index", "energy"});
}

TEST_CASE("sawtooth localization-length scan") {
  const Run r = run(kLoclen);
  REQUIRE(r.code == 0);
  const auto rows = csv(r.out);
  REQUIRE(rows.size() == 8);
  const std::size_t l = column(rows[0], "lambda");
  const std::size_t res = column(rows[0], "pole_residual");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::stod(rows[i][l]) == doctest::Approx(0.759).epsilon(0.03));
    CHECK(std::stod(rows[i][res]) < 1e-12);
  }
}

TEST_CASE("xi comparison against the closed form") {
  const Run r = run("xi --alpha 0.25 --dim 1 --max-dist 10 --compare");
  REQUIRE(r.code == 0);
  const auto rows = csv(r.out);
  REQUIRE(rows.size() == 12);
  const std::size_t d = column(rows[0], "abs_diff");
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][d]) < 1e-8);
}

TEST_CASE("reruns and worker counts give identical bytes") {
  const Run a = run(kLoclen, "FBQO_WORKERS=1");
  const Run b = run(kLoclen, "FBQO_WORKERS=3");
  const Run c = run(kLoclen, "FBQO_WORKERS=3");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(b.out == c.out);
  const std::string dis = "disorder --model stub --N 20 --kind diagonal --strength 0.1 --seeds 4 --seed 11";
  CHECK(run(dis, "FBQO_WORKERS=1").out == run(dis, "FBQO_WORKERS=4").out);
}

TEST_CASE("json output mirrors csv") {
  const Run c = run(kLoclen);
  const Run j = run(kLoclen + " --format json");
  REQUIRE(j.code == 0);
  const auto rows = csv(c.out);
  const nlohmann::json doc = nlohmann::json::parse(j.out);
  REQUIRE(doc.is_array());
  REQUIRE(doc.size() == rows.size() - 1);
  for (std::size_t i = 0; i < doc.size(); ++i)
    for (std::size_t k = 0; k < rows[0].size(); ++k) {
      REQUIRE(doc[i].contains(rows[0][k]));
      CHECK(doc[i][rows[0][k]].get<double>() == std::stod(rows[i + 1][k]));
    }
}

TEST_CASE("config file is equivalent to flags") {
  const fs::path cfg = scratch() / "loclen.json";
  std::ofstream(cfg) << R"({"model": "sawtooth", "site": "a:50", "g": 1e-3, "scan-delta": "1e-3:1e-1:log:7"})";
  const Run r = run("loclen --config " + cfg.string());
  REQUIRE(r.code == 0);
  CHECK(r.out == run(kLoclen).out);

  const fs::path lat = scratch() / "lattice.json";
  std::ofstream(lat) << R"({"model": "stub", "N": 30, "params": {"Delta": 2.0}})";
  const Run a = run("boundstate --lattice " + lat.string() + " --site a:15 --delta 0.01");
  const Run b = run("boundstate --model stub --N 30 --Delta 2 --site a:15 --delta 0.01");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("amplitude export columns") {
  const auto one = csv(run("boundstate --model sawtooth --N 30 --site a:15 --delta 0.01 --amplitudes").out);
  REQUIRE(one.size() == 1 + 60);
  CHECK(one[0] == std::vector<std::string>{"cell_index", "sublattice", "re", "im", "abs"});
  const auto two = csv(run("boundstate --model checkerboard --N 6,6 --site a:3,3 --delta 0.01 --amplitudes").out);
  REQUIRE(two.size() == 1 + 72);
  CHECK(two[0] == std::vector<std::string>{"cell_index", "cell_index_2", "sublattice", "re", "im", "abs"});
  for (std::size_t i = 1; i < two.size(); ++i)
    for (const std::string& cell : two[i]) CHECK(cell != "-0");
}

TEST_CASE("other subcommands") {
  const auto k = csv(run("interactions --model sawtooth --N 40 --site a:10 --site a:11 --site a:13 --delta 1e-3").out);
  CHECK(k.size() == 1 + 9);
  const auto gi = csv(run("giants --model stub --Delta 2 --N 20 --cell 5 --cell 6 --delta 1e-3").out);
  REQUIRE(gi.size() == 5);
  const std::size_t re = column(gi[0], "re");
  CHECK(std::stod(gi[2][re]) / std::stod(gi[1][re]) == doctest::Approx(0.25).epsilon(1e-6));
  const auto dy = csv(run("dynamics --model sawtooth --N 60 --site a:30 --g 1e-3 --rabi").out);
  REQUIRE(dy.size() == 2);
  CHECK(std::stod(dy[1][column(dy[0], "rel_error")]) < 1e-3);
  const auto di = csv(run("disorder --model stub --N 20 --kind off-diagonal --strength 0.5 --seeds 3").out);
  REQUIRE(di.size() == 4);
  for (std::size_t i = 1; i < di.size(); ++i) CHECK(di[i][column(di[0], "zero_modes")] == "20");
  const auto sd = csv(
      run("interactions --model sawtooth --N 64 --site a:10 --site a:11 --delta 1e-3 --spin-dynamics --nt 5").out);
  CHECK(sd.size() == 1 + 5 * 2);
}

TEST_CASE("exit codes") {
  for (const std::string args : {
           "",
           "nosuch",
           "bands",
           "bands --model hexagon",
           "bands --model sawtooth --N x",
           "bands --model sawtooth --nope",
           "loclen --model sawtooth --site a:50",
           "loclen --model sawtooth --site a:50 --scan-delta 1e-3:1e-1:log",
           "loclen --model sawtooth --site a:50 --scan-delta -1:1:lin:3",
           "loclen --model sawtooth --site a:50 --scan-delta 1e-3:1e-1:cubic:3",
           "loclen --config /nonexistent/config.json",
           "boundstate --model sawtooth --site q:3 --delta 0.01",
           "boundstate --model sawtooth --N 10 --site a:10 --delta 0.01",
           "boundstate --model sawtooth --site a:3 --delta 0.01 --omega0 1",
           "boundstate --model sawtooth --site a:3 --delta -0.01",
           "xi --dim 1",
           "xi --alpha 0.25 --dim 3",
           "dynamics --model sawtooth --site a:3 --nt 1",
           "giants --model sawtooth --delta 0.01",
       }) {
    const Run r = run(args);
    CAPTURE(args);
    CHECK(r.code == 2);
    CHECK(r.err.find("ConfigError") != std::string::npos);
    CHECK(r.out.empty());
  }
  const Run w = run(kLoclen, "FBQO_WORKERS=x");
  CHECK(w.code == 2);

  const Run inband = run("boundstate --model sawtooth --N 40 --site a:20 --omega0 1.0");
  CHECK(inband.code == 3);
  CHECK(inband.err.find("NoRootInGap") != std::string::npos);
  const Run pole = run("boundstate --model sawtooth --N 40 --site a:20 --omega0 -2");
  CHECK(pole.code == 3);
  CHECK(pole.err.find("NoRootInGap") != std::string::npos);
  const Run hub = run("dynamics --model stub --Delta 4 --N 30 --site b:15 --g 1e-3 --rabi");
  CHECK(hub.code == 3);

  const Run help = run("dynamics --help");
  CHECK(help.code == 0);
  CHECK(help.out.find("--tmax") != std::string::npos);
  CHECK(help.out.find("1001") != std::string::npos);
}
