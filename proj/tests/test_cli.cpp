#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args, const std::string& log = "cli.log") {
  const std::string cmd = std::string(KGL_CLI_PATH) + " " + args + " > " + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::vector<std::string>> rows(const fs::path& path) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(slurp(path));
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    out.push_back(cells);
  }
  return out;
}

}  // namespace

TEST_CASE("acceptance --list") {
  CHECK(run("acceptance --list") == 0);
  const std::string out = slurp("cli.log");
  for (int i = 1; i <= 10; ++i) CHECK(out.find(std::to_string(i) + ". ") != std::string::npos);
  CHECK(out.find("PASS") == std::string::npos);
}

TEST_CASE("configuration errors exit with 2") {
  CHECK(run("acceptance --lambda1 0") == 2);
  CHECK(run("geometry --omega -1") == 2);
  CHECK(run("kernels --m 3") == 2);
  CHECK(run("frobnicate") == 2);
  std::ofstream("bad.cfg") << "lambda1 = 0\n";
  CHECK(run("geometry --config bad.cfg") == 2);
  std::ofstream("typo.cfg") << "lamda1 = 2\n";
  CHECK(run("geometry --config typo.cfg") == 2);
}

TEST_CASE("resolution errors exit with 3") {
  CHECK(run("kernels --t 400 --window 2 --max-grid 64 --out cli_res") == 3);
}

TEST_CASE("geometry export") {
  fs::remove_all("cli_geo");
  CHECK(run("geometry --omega 0 --n-points 64 --raster 9 --out cli_geo") == 0);
  const auto v3 = rows("cli_geo/v3.csv");
  REQUIRE(v3.size() == 4);
  for (const auto& r : v3) {
    CHECK(std::abs(std::abs(std::stod(r[0])) - 0.5) < 1e-10);
    CHECK(std::abs(std::abs(std::stod(r[1])) - 0.5) < 1e-10);
  }
  CHECK(rows("cli_geo/psi1.csv").size() == 64);
  CHECK(rows("cli_geo/psi2.csv").size() == 64);
  CHECK(rows("cli_geo/phi1.csv").size() == 128);
  CHECK(rows("cli_geo/gamma1.csv").size() == 128);
  CHECK(rows("cli_geo/kstar.csv").size() == 4);
  CHECK(rows("cli_geo/regions.csv").size() == 81);
  CHECK(slurp("cli_geo/psi2.csv").rfind("label,index,c1,c2\n", 0) == 0);

  // Config file plus flag override.
  std::ofstream("sym.cfg") << "# symmetric couplings\nomega = 1\nlambda1 = 3\nlambda2 = 5\nn_points = 80\nraster = 3\n";
  CHECK(run("geometry --config sym.cfg --lambda2 3 --out cli_sym") == 0);
  for (const auto& r : rows("cli_sym/v3.csv")) {
    CHECK(std::abs(std::stod(r[0])) == doctest::Approx(std::abs(std::stod(r[1]))).epsilon(1e-12));
  }
  CHECK(rows("cli_sym/psi1.csv").size() == 80);
}

TEST_CASE("kernel export") {
  CHECK(run("kernels --t 0 --m 0 --window 3 --out cli_k0") == 0);
  const auto field = rows("cli_k0/kernel_m0.csv");
  REQUIRE(field.size() == 49);
  for (const auto& r : field) {
    const bool origin = r[0] == "0" && r[1] == "0";
    CHECK(std::abs(std::stod(r[2]) - (origin ? 1.0 : 0.0)) < 1e-14);
  }
  CHECK(fs::file_size("cli_k0/kernel_m0.kgf") == 32 + 8 * 49);
}

TEST_CASE("outputs are byte-identical across runs and worker counts") {
  CHECK(run("kernels --t 12.5 --m -1 --window 10 --out cli_d1 --workers 1") == 0);
  CHECK(run("kernels --t 12.5 --m -1 --window 10 --out cli_d2 --workers 3") == 0);
  CHECK(slurp("cli_d1/kernel_mneg1.csv") == slurp("cli_d2/kernel_mneg1.csv"));
  CHECK(slurp("cli_d1/kernel_mneg1.kgf") == slurp("cli_d2/kernel_mneg1.kgf"));
  CHECK(run("geometry --n-points 72 --raster 7 --out cli_g1 --workers 1") == 0);
  CHECK(run("geometry --n-points 72 --raster 7 --out cli_g2 --workers 2") == 0);
  for (const char* name : {"psi1.csv", "psi2.csv", "regions.csv", "astar.csv"}) {
    CHECK(slurp(fs::path("cli_g1") / name) == slurp(fs::path("cli_g2") / name));
  }
}

TEST_CASE("decay and quantum commands") {
  CHECK(run("decay --t-min 25 --t-max 400 --dt 0.25 --out cli_decay") == 0);
  const auto fits = rows("cli_decay/decay.csv");
  REQUIRE(fits.size() == 5);
  std::vector<std::string> labels;
  for (const auto& r : fits) labels.push_back(r[0]);
  CHECK(labels == std::vector<std::string>{"cusp", "psi2_arc", "psi1_arc", "interior", "exterior"});

  CHECK(run("quantum --t-min 10 --t-max 160 --dt 1 --out cli_q") == 0);
  const auto q = rows("cli_q/quantum.csv");
  CHECK(q.size() > 100);
  CHECK(q.front().size() == 4);
}
