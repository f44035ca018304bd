#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "bresse/errors.hpp"
#include "bresse/io.hpp"
#include "bresse/parallel.hpp"

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

void print_simulate(const bresse::RunConfig& c, const bresse::SimulateOutcome& out) {
  const auto& s = out.result.series;
  std::cout << "config_id " << c.config_id << "\n"
            << "regime " << bresse::to_string(out.regime) << "\n"
            << "steps " << out.result.steps << " dt " << bresse::format_double(out.result.dt)
            << "\n"
            << "energy " << bresse::format_double(s.energy.front()) << " -> "
            << bresse::format_double(s.energy.back()) << "\n"
            << "decay " << bresse::to_string(out.classification.verdict) << "\n"
            << "wrote " << (std::filesystem::path(c.outputs) / "energy.csv").string() << ", "
            << (std::filesystem::path(c.outputs) / "report.json").string() << "\n";
}

void print_spectrum(const bresse::RunConfig& c, const bresse::SpectrumOutcome& out) {
  const auto& r = out.report;
  std::cout << "config_id " << c.config_id << "\n"
            << "regime " << bresse::to_string(out.regime) << "\n"
            << "abscissa " << bresse::format_double(r.spectral_abscissa) << " (resolved "
            << bresse::format_double(r.resolved_abscissa) << ")\n";
  if (r.growth) {
    std::cout << "alpha_fit " << bresse::format_double(r.growth->alpha) << " ["
              << bresse::format_double(r.growth->ci_low) << ", "
              << bresse::format_double(r.growth->ci_high) << "]\n";
  } else {
    std::cout << "alpha_fit unavailable: " << r.growth_error << "\n";
  }
  std::cout << "growth_ratio " << bresse::format_double(r.growth_ratio) << "\n";
  if (r.conservative) std::cout << "conservative: no decay expected\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Damped Bresse beam: simulation, spectra and decay fits"};
  app.require_subcommand(1);

  std::string config_path;
  bool dump = false;
  std::string plot_dir;

  auto* sim = app.add_subcommand("simulate", "Evolve the discrete system and fit the energy decay");
  sim->add_option("-c,--config", config_path, "Run configuration (JSON)")->required();
  sim->add_flag("--dump-operators", dump, "Also write A.mtx and M.mtx (Matrix Market)");

  auto* spec = app.add_subcommand("spectrum", "Eigenvalues, resolvent scan and growth exponent");
  spec->add_option("-c,--config", config_path, "Run configuration (JSON)")->required();
  spec->add_flag("--dump-operators", dump, "Also write A.mtx and M.mtx (Matrix Market)");

  auto* sweep = app.add_subcommand("sweep", "Run simulate and spectrum over a parameter grid");
  sweep->add_option("-c,--config", config_path, "Sweep specification (JSON)")->required();

  auto* plots = app.add_subcommand("plots", "Write gnuplot scripts for a run directory");
  plots->add_option("dir", plot_dir, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*sim) {
      const auto config = bresse::load_config(config_path);
      print_simulate(config, bresse::run_simulate(config, dump));
    } else if (*spec) {
      const auto config = bresse::load_config(config_path);
      print_spectrum(config, bresse::run_spectrum(config, bresse::worker_count(), dump));
    } else if (*sweep) {
      const auto rows = bresse::run_sweep(bresse::load_sweep(config_path), bresse::worker_count());
      std::size_t failed = 0;
      for (const auto& r : rows) failed += r.status != "ok";
      std::cout << rows.size() << " rows, " << failed << " with failures\n";
    } else if (*plots) {
      for (const auto& name : bresse::emit_plots(plot_dir)) std::cout << "wrote " << name << "\n";
    }
  } catch (const bresse::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const bresse::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
