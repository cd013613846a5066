#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace {

using json = nlohmann::json;

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + FREEPROD_CLI + std::string(" ") + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), "missing " << path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load(const std::string& path) { return json::parse(slurp(path)); }

std::vector<std::vector<double>> rows(const std::string& path) {
  std::stringstream in(slurp(path));
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> out;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream fields(line);
    std::string f;
    while (std::getline(fields, f, ',')) row.push_back(std::stod(f));
    out.push_back(row);
  }
  return out;
}

}  // namespace

TEST_CASE("density semicircle table peaks at 1/pi") {
  REQUIRE(run("density semicircle -o cli_semi") == 0);
  const auto table = rows("cli_semi.csv");
  REQUIRE(table.size() == 441);
  const auto& mid = table[220];
  CHECK(std::abs(mid[0]) < 1e-12);
  CHECK(mid[1] == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-10));
  CHECK(load("cli_semi.json")["support"][0][1].get<double>() == doctest::Approx(2.0));
}

TEST_CASE("density ginibre-product -n 3 matches the planar power law") {
  REQUIRE(run("density ginibre-product -n 3 --points 101 -o cli_gp") == 0);
  const auto side = load("cli_gp.json");
  CHECK(side["radial_cdf_exponent"].get<double>() == doctest::Approx(2.0 / 3.0));
  // rho(r) = (1/2 pi r) dF/dr with F = r^(2/3).
  const double expected = (2.0 / 3.0) * std::pow(0.5, -1.0 / 3.0) / (2.0 * std::numbers::pi * 0.5);
  bool seen = false;
  for (const auto& r : rows("cli_gp.csv"))
    if (std::abs(r[0] - 0.5) < 1e-9 && std::abs(r[1]) < 1e-9) {
      CHECK(r[2] == doctest::Approx(expected).epsilon(1e-8));
      seen = true;
    }
  CHECK(seen);
}

TEST_CASE("density wishart-product support ends at 27/4") {
  REQUIRE(run("density wishart-product -n 2 -o cli_ww") == 0);
  CHECK(load("cli_ww.json")["support"][0][1].get<double>() == doctest::Approx(6.75).epsilon(1e-8));
}

TEST_CASE("freeop add of two semicircles is recognised") {
  REQUIRE(run("freeop add semicircle gue -o cli_add") == 0);
  const auto side = load("cli_add.json");
  REQUIRE(side["catalog"].is_object());
  CHECK(side["catalog"]["law"] == "semicircle");
  CHECK(side["catalog"]["sigma"].get<double>() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("freeop mul of free Poisson laws uses the S route") {
  REQUIRE(run("freeop mul wishart wishart -o cli_mul") == 0);
  const auto side = load("cli_mul.json");
  CHECK(side["route"] == "S");
  // S = 1/(1+z)^2 = 1 - 2z + 3z^2 - ...
  const auto s = side["s_coefficients"].get<std::vector<double>>();
  REQUIRE(s.size() >= 4);
  CHECK(s[0] == doctest::Approx(1.0));
  CHECK(s[1] == doctest::Approx(-2.0));
  CHECK(s[2] == doctest::Approx(3.0));
  CHECK(s[3] == doctest::Approx(-4.0));
}

TEST_CASE("freeop mul of centred semicircles falls back to the R route") {
  REQUIRE(run("freeop mul gue gue -o cli_mulz") == 0);
  const auto side = load("cli_mulz.json");
  CHECK(side["route"] == "R");
  // phi((ab)^k) vanishes for free centred a, b.
  CHECK(side["all_moments_zero"] == true);
}

TEST_CASE("simulate is reproducible across runs and thread counts") {
  REQUIRE(run("--threads 1 simulate --ensemble gue --size 4 --samples 3 --seed 11 -o cli_sim_a") == 0);
  REQUIRE(run("--threads 1 simulate --ensemble gue --size 4 --samples 3 --seed 11 -o cli_sim_b") == 0);
  REQUIRE(run("--threads 3 simulate --ensemble gue --size 4 --samples 3 --seed 11 -o cli_sim_c") == 0);
  const auto a = slurp("cli_sim_a_spectrum.csv");
  CHECK(a == slurp("cli_sim_b_spectrum.csv"));
  CHECK(a == slurp("cli_sim_c_spectrum.csv"));
  CHECK(rows("cli_sim_a_spectrum.csv").size() == 12);

  REQUIRE(run("simulate --ensemble gue --size 4 --samples 3 -o cli_sim_env", "FREEPROD_SEED=11") == 0);
  CHECK(a == slurp("cli_sim_env_spectrum.csv"));
  REQUIRE(run("simulate --ensemble gue --size 4 --samples 3 -o cli_sim_other", "FREEPROD_SEED=12") == 0);
  CHECK(a != slurp("cli_sim_other_spectrum.csv"));
}

TEST_CASE("simulate reports a failed comparison with exit code 1") {
  CHECK(run("simulate --ensemble ginibre --size 40 --samples 2 --against analytic --ks-tolerance 0.5 -o cli_ok") == 0);
  CHECK(load("cli_ok_report.json")["pass"] == true);
  CHECK(run("simulate --ensemble ginibre --size 40 --samples 2 --against analytic --ks-tolerance 0 -o cli_bad") == 1);
  CHECK(load("cli_bad_report.json")["pass"] == false);
}

TEST_CASE("quat ginibre square finds the unit circle") {
  REQUIRE(run("quat --points 65 -o cli_quat") == 0);
  const auto side = load("cli_quat.json");
  CHECK(side["unresolved"] == 0);
  CHECK(side["loops"] == 1);
  double worst = 0.0;
  for (const auto& r : rows("cli_quat_contour.csv")) worst = std::max(worst, std::abs(std::hypot(r[1], r[2]) - 1.0));
  CHECK(worst < 0.05);
}

TEST_CASE("exit codes") {
  CHECK(run("quat --a nonsense -o cli_err") == 2);
  CHECK(run("density nonsense") == 2);
  CHECK(run("freeop add semicircle:0,-1 gue -o cli_err") == 2);
  // Window inside the support: the contour cannot close.
  CHECK(run("quat --points 21 --half-width 0.8 -o cli_err") == 3);
  CHECK(run("simulate --size 1") == 2);
  CHECK(run("") == 2);
  CHECK(run("--help") == 0);
}

TEST_CASE("config file drives a run and flags override it") {
  {
    std::ofstream cfg("cli_run.ini");
    cfg << "simulate.ensemble = gue\nsimulate.size = 4\nsimulate.samples = 3\nsimulate.seed = 12\nsimulate.out = cli_cfg\n";
  }
  REQUIRE(run("--config cli_run.ini simulate") == 0);
  CHECK(load("cli_cfg_report.json")["seed"] == 12);
  REQUIRE(run("--config cli_run.ini simulate --seed 11 -o cli_cfg_flag") == 0);
  REQUIRE(run("--threads 1 simulate --ensemble gue --size 4 --samples 3 --seed 11 -o cli_cfg_ref") == 0);
  CHECK(slurp("cli_cfg_flag_spectrum.csv") == slurp("cli_cfg_ref_spectrum.csv"));
}
