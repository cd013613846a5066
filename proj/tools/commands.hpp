#ifndef FREEPROD_TOOLS_COMMANDS_HPP
#define FREEPROD_TOOLS_COMMANDS_HPP

#include <cstdint>
#include <string>

namespace freeprod::cli {

struct DensityOptions {
  std::string law;
  double shift = 0.0;
  double scale = 1.0;
  double ratio = 1.0;
  int n = 2;
  int points = 0;  // 0: 441 on the line, 251 x 251 in the plane
  std::string out = "density";
};

struct FreeopOptions {
  std::string op;
  std::string a;
  std::string b;
  int order = 16;
  int points = 441;
  std::string out = "freeop";
};

struct SimulateOptions {
  std::string ensemble = "ginibre";
  std::string product;
  int n_factors = 1;
  int size = 1000;
  int samples = 10;
  std::uint64_t seed = 1;
  std::string against = "none";
  std::string contour = "none";
  std::string kind = "eigen";
  bool power = false;
  int grid_points = 257;
  double ks_tolerance = 0.02;
  double outlier_tolerance = 0.02;
  int threads = 1;
  std::string out = "simulate";
};

struct QuatOptions {
  std::string a = "ginibre";
  std::string b = "ginibre";
  int points = 257;
  double half_width = 0.0;  // 0: 1.25 R_e from a coarse solve
  std::string out = "quat";
};

void run_density(const DensityOptions& o);
void run_freeop(const FreeopOptions& o);
void run_simulate(const SimulateOptions& o);
void run_quat(const QuatOptions& o);

}  // namespace freeprod::cli

#endif  // FREEPROD_TOOLS_COMMANDS_HPP
