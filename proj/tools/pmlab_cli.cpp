#include <CLI11.hpp>

#include <cmath>
#include <iostream>

#include "pmlab/errors.hpp"
#include "pmlab/experiments.hpp"
#include "pmlab/io.hpp"
#include "pmlab/plots.hpp"

namespace {

using nlohmann::json;

void print(const pmlab::ScenarioReport& r) {
  std::cout << r.scenario << "  ->  " << r.output_dir.string() << '\n';
  for (const auto& c : r.criteria) {
    std::cout << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name;
    if (std::isfinite(c.margin)) std::cout << "  margin=" << pmlab::format_double(c.margin);
    if (!c.detail.empty()) std::cout << "  (" << c.detail << ')';
    std::cout << '\n';
  }
}

int finish(const std::vector<pmlab::ScenarioReport>& reports) {
  bool ok = true;
  for (const auto& r : reports) {
    print(r);
    ok = ok && r.all_pass();
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perona-Malik forward-backward diffusion laboratory"};
  app.require_subcommand(1);

  std::string config_path, param, values, manifest;
  int n_max = 50, workers = 0;

  auto* sim = app.add_subcommand("simulate", "run the scenario described by a JSON config");
  sim->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);

  auto* sweep = app.add_subcommand("sweep", "run one scenario per parameter value");
  sweep->add_option("config", config_path, "base config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--param", param, "dotted parameter path, e.g. geometry.r2")->required();
  sweep->add_option("--values", values, "comma separated values")->required();
  sweep->add_option("--workers", workers, "worker threads (0 = hardware)");

  auto* vb = app.add_subcommand("verify-barrier", "verify a barrier from a barrier-verify config");
  vb->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);

  auto* ce = app.add_subcommand("counterexample", "search for the minimal counterexample datum");
  ce->add_option("--n-max", n_max, "largest n scanned")->check(CLI::PositiveNumber);

  auto* plot = app.add_subcommand("plot", "render SVG plots listed in a manifest");
  plot->add_option("manifest", manifest, "manifest.json")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return finish({pmlab::run_scenario(pmlab::read_json(config_path))});
    if (vb->parsed()) {
      const json cfg = pmlab::read_json(config_path);
      const std::string s = cfg.value("scenario", "");
      if (s != "barrier-verify-1" && s != "barrier-verify-2")
        throw pmlab::ConfigError("scenario", "verify-barrier expects barrier-verify-1 or barrier-verify-2");
      return finish({pmlab::run_scenario(cfg)});
    }
    if (ce->parsed()) {
      const json cfg{{"scenario", "counterexample"}, {"counterexample", {{"n_max", n_max}}}};
      const auto report = pmlab::run_scenario(cfg);
      std::cout << report.metrics.at("certificate").dump(2) << '\n';
      return finish({report});
    }
    if (sweep->parsed()) {
      const auto reports =
          pmlab::run_sweep(pmlab::read_json(config_path), param, pmlab::parse_value_list(values), workers);
      return finish(reports);
    }
    if (plot->parsed()) {
      for (const auto& p : pmlab::emit_plots(manifest)) std::cout << p.string() << '\n';
      return 0;
    }
  } catch (const pmlab::ConfigError& e) {
    std::cerr << "config error [" << e.field() << "]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
