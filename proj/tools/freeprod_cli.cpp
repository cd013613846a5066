#include <cstdlib>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"

using namespace freeprod::cli;

int main(int argc, char** argv) {
  CLI::App app{"Free random matrix products: analytic laws, Monte Carlo checks and quaternionic solves"};
  app.set_config("--config", "", "Flat key = value run configuration");
  app.require_subcommand(1);
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  DensityOptions dens;
  auto* density = app.add_subcommand("density", "Tabulate an analytic spectral density");
  density->add_option("law", dens.law, "semicircle, free-poisson, wishart, quarter-circle, wishart-product, ginibre-product")
      ->required();
  density->add_option("--shift", dens.shift);
  density->add_option("--scale", dens.scale);
  density->add_option("--ratio", dens.ratio, "free Poisson ratio");
  density->add_option("-n", dens.n, "number of factors")->check(CLI::PositiveNumber);
  density->add_option("--points", dens.points);
  density->add_option("-o,--out", dens.out, "output prefix");

  FreeopOptions fo;
  auto* freeop = app.add_subcommand("freeop", "Free addition or multiplication of two laws");
  freeop->add_option("op", fo.op, "add or mul")->required()->check(CLI::IsMember({"add", "mul"}));
  freeop->add_option("a", fo.a)->required();
  freeop->add_option("b", fo.b)->required();
  freeop->add_option("--order", fo.order, "series order")->check(CLI::Range(2, 40));
  freeop->add_option("--points", fo.points)->check(CLI::Range(2, 1000000));
  freeop->add_option("-o,--out", fo.out, "output prefix");

  SimulateOptions so;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo spectra of matrix products");
  simulate->add_option("--ensemble", so.ensemble);
  simulate->add_option("--product", so.product, "comma-separated factors, e.g. 1+ginibre,1+gue");
  simulate->add_option("--n-factors", so.n_factors);
  simulate->add_option("--size", so.size)->check(CLI::Range(2, 100000));
  simulate->add_option("--samples", so.samples)->check(CLI::PositiveNumber);
  simulate->add_option("--seed", so.seed)->envname("FREEPROD_SEED");
  simulate->add_option("--against", so.against, "analytic or none");
  simulate->add_option("--contour", so.contour, "limacon, quat or none");
  simulate->add_option("--kind", so.kind, "eigen or singular");
  simulate->add_flag("--power", so.power, "reuse one matrix per sample (A^n instead of A1...An)");
  simulate->add_option("--grid-points", so.grid_points);
  simulate->add_option("--ks-tolerance", so.ks_tolerance);
  simulate->add_option("--outlier-tolerance", so.outlier_tolerance);
  simulate->add_option("-o,--out", so.out, "output prefix");

  QuatOptions qo;
  auto* quat = app.add_subcommand("quat", "Quaternionic solve for a product of two Gaussian factors");
  quat->add_option("--a", qo.a);
  quat->add_option("--b", qo.b);
  quat->add_option("--points", qo.points)->check(CLI::Range(5, 4097));
  quat->add_option("--half-width", qo.half_width);
  quat->add_option("-o,--out", qo.out, "output prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_pass : exit_usage;
  }

  try {
    if (*density) run_density(dens);
    if (*freeop) run_freeop(fo);
    if (*simulate) {
      so.threads = threads;
      run_simulate(so);
    }
    if (*quat) run_quat(qo);
  } catch (const CommandFailure& f) {
    std::cerr << f.message << '\n';
    return f.code;
  } catch (const freeprod::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  }
  return exit_pass;
}
