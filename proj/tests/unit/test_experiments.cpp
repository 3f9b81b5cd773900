#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pmlab/errors.hpp"
#include "pmlab/experiments.hpp"
#include "pmlab/io.hpp"
#include "pmlab/plots.hpp"

using namespace pmlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto p = output_root() / name;
  fs::remove_all(p);
  return p;
}

json small_thm1(const fs::path& dir) {
  return {{"scenario", "thm1-1d"}, {"output_dir", dir.string()}, {"grid", {{"n_cells", 100}}}, {"run", {{"t_end", 0.1}}}};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(PMLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("registry and default configs") {
  CHECK(scenario_names().size() == 8);
  for (const auto& s : scenario_names()) {
    INFO(s);
    const auto cfg = default_config(s);
    CHECK(cfg.at("scenario") == s);
    CHECK_FALSE(criteria_for(s).empty());
    CHECK_NOTHROW(resolve_config({{"scenario", s}}));
  }
  CHECK_THROWS_AS(criteria_for("nope"), ConfigError);
  CHECK_THROWS_AS(resolve_config({{"scenario", "nope"}}), ConfigError);
}

TEST_CASE("E2: every scenario reports exactly its registered criteria") {
  // the long radial runs are shortened; criteria names do not depend on the horizon
  for (const auto& s : scenario_names()) {
    json cfg{{"scenario", s}, {"output_dir", scratch("e2_" + s).string()}, {"write_trajectory", false}};
    if (default_config(s).contains("grid")) cfg["grid"] = {{"n_cells", 120}};
    if (s == "thm2-radial" || s == "thm3-nonexistence") cfg["run"] = {{"t_end", 0.05}};
    const auto rep = run_scenario(cfg);
    INFO(s);
    REQUIRE(rep.criteria.size() == criteria_for(s).size());
    for (std::size_t i = 0; i < rep.criteria.size(); ++i) CHECK(rep.criteria[i].name == criteria_for(s)[i]);
    CHECK(fs::exists(rep.output_dir / "report.json"));
    CHECK(fs::exists(rep.output_dir / "manifest.json"));
    const auto j = read_json(rep.output_dir / "report.json");
    CHECK(j.at("criteria").size() == rep.criteria.size());
  }
}

TEST_CASE("config validation names the field") {
  json cfg{{"scenario", "thm1-1d"}, {"geometry", {{"x3", 0.8}, {"x4", 0.7}}}};
  try {
    resolve_config(cfg);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "geometry.x3");
  }
  CHECK_THROWS_AS(resolve_config({{"scenario", "thm2-radial"}, {"geometry", {{"r1", 0.0}}}}), ConfigError);
  CHECK_THROWS_AS(resolve_config({{"scenario", "thm1-1d"}, {"grid", {{"n_cells", 4}}}}), ConfigError);
  CHECK_THROWS_AS(resolve_config({{"scenario", "thm1-1d"}, {"run", {{"t_end", -1.0}}}}), ConfigError);
}

TEST_CASE("E1: identical configs give byte-identical outputs") {
  const auto a = run_scenario(small_thm1(scratch("e1_a")));
  const auto b = run_scenario(small_thm1(scratch("e1_b")));
  for (const char* f : {"trajectory.csv", "fronts.csv"}) {
    INFO(f);
    REQUIRE(fs::exists(a.output_dir / f));
    CHECK(slurp(a.output_dir / f) == slurp(b.output_dir / f));
  }
}

TEST_CASE("thm1 default run passes") {
  const auto rep = run_scenario({{"scenario", "thm1-1d"}, {"output_dir", scratch("thm1_default").string()}});
  CHECK(rep.all_pass());
  CHECK(rep.find("monotone_inclusion")->pass);
}

TEST_CASE("set_path and parse_value_list") {
  const json base{{"scenario", "thm2-radial"}};
  CHECK(set_path(base, "geometry.r2", 2.0).at("geometry").at("r2") == 2.0);
  CHECK_THROWS_AS(set_path(base, "geometry.r9", 2.0), ConfigError);
  CHECK(parse_value_list("1, 2.5,3") == std::vector<double>{1.0, 2.5, 3.0});
  CHECK_THROWS_AS(parse_value_list("1,x"), ConfigError);
}

TEST_CASE("sweeps") {
  CHECK(run_sweep({{"scenario", "counterexample"}}, "counterexample.n", {}).empty());

  const auto root = scratch("sweep_n");
  std::vector<double> ns;
  for (int n = 1; n <= 20; ++n) ns.push_back(n);
  const auto reps = run_sweep({{"scenario", "counterexample"}, {"output_dir", root.string()}}, "counterexample.n", ns, 4);
  REQUIRE(reps.size() == 20);
  for (int n = 1; n <= 20; ++n) {
    INFO("n = " << n);
    CHECK(reps[n - 1].metrics.at("certificate").at("n") == n);
    CHECK(reps[n - 1].all_pass() == (n >= 4));
  }
  CHECK(fs::exists(root / "sweep.csv"));
  CHECK(fs::exists(root / "sweep_19" / "certificate.json"));

  const json thm2{{"scenario", "thm2-radial"},
                  {"output_dir", scratch("sweep_r2").string()},
                  {"grid", {{"n_cells", 100}}},
                  {"run", {{"t_end", 0.05}}},
                  {"write_trajectory", false}};
  const auto r2 = run_sweep(thm2, "geometry.r2", {1.3, 1.5, 2.0}, 3);
  REQUIRE(r2.size() == 3);
  CHECK(r2[0].metrics.at("k0").get<double>() > r2[1].metrics.at("k0").get<double>());
  CHECK(r2[1].metrics.at("k0").get<double>() > r2[2].metrics.at("k0").get<double>());
  CHECK(r2[1].metrics.at("k0").get<double>() == doctest::Approx(0.47140).epsilon(1e-4));
}

TEST_CASE("plots") {
  const auto rep = run_scenario(small_thm1(scratch("plots")));
  const auto svgs = emit_plots(rep.output_dir / "manifest.json");
  REQUIRE_FALSE(svgs.empty());
  for (const auto& p : svgs) CHECK(slurp(p).find("<svg") != std::string::npos);

  const auto dir = scratch("plots_empty");
  fs::create_directories(dir);
  write_csv(dir / "fronts.csv", CsvTable{{"front", "t", "alpha", "measured_speed", "heuristic_speed"}, {}});
  write_json(dir / "manifest.json", {{"plots", {{{"kind", "fronts"}, {"csv", "fronts.csv"}, {"output", "f.svg"}}}}});
  const auto empty = emit_plots(dir / "manifest.json");
  REQUIRE(empty.size() == 1);
  CHECK(slurp(empty[0]).find("<svg") != std::string::npos);

  fs::remove(dir / "fronts.csv");
  CHECK_THROWS_AS(emit_plots(dir / "manifest.json"), FileError);
}

TEST_CASE("CLI exit codes") {
  const auto dir = scratch("cli");
  fs::create_directories(dir);
  write_json(dir / "ok.json", small_thm1(dir / "ok"));
  CHECK(run_cli("simulate " + (dir / "ok.json").string()) == 0);
  write_json(dir / "bad.json", {{"scenario", "thm1-1d"}, {"geometry", {{"x3", 0.9}, {"x4", 0.2}}}});
  CHECK(run_cli("simulate " + (dir / "bad.json").string()) == 2);
  CHECK(run_cli("verify-barrier " + (dir / "ok.json").string()) == 2);
  CHECK(run_cli("counterexample --n-max 3") == 1);
  CHECK(run_cli("counterexample") == 0);
}
