#include "pmlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "pmlab/barriers.hpp"
#include "pmlab/counterexample.hpp"
#include "pmlab/errors.hpp"
#include "pmlab/initial_data.hpp"
#include "pmlab/io.hpp"
#include "pmlab/nonlinearity.hpp"
#include "pmlab/region_tracker.hpp"
#include "pmlab/solvers.hpp"

namespace pmlab {

using nlohmann::json;
namespace fs = std::filesystem;

bool ScenarioReport::all_pass() const {
  if (criteria.empty()) return false;
  return std::all_of(criteria.begin(), criteria.end(), [](const auto& c) { return c.pass; });
}

const CriterionResult* ScenarioReport::find(const std::string& name) const {
  for (const auto& c : criteria)
    if (c.name == name) return &c;
  return nullptr;
}

json ScenarioReport::to_json() const {
  json crit = json::array();
  for (const auto& c : criteria) {
    json m = std::isfinite(c.margin) ? json(c.margin) : json(nullptr);
    crit.push_back({{"name", c.name}, {"pass", c.pass}, {"margin", m}, {"detail", c.detail}});
  }
  return {{"scenario", scenario}, {"all_pass", all_pass()}, {"criteria", crit}, {"metrics", metrics}, {"files", files}};
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"thm1-1d",          "thm2-radial",      "thm3-nonexistence",
                                              "thm5-fbp1",        "thm6-fbp2",        "barrier-verify-1",
                                              "barrier-verify-2", "counterexample"};
  return names;
}

const std::vector<std::string>& criteria_for(const std::string& scenario) {
  static const std::map<std::string, std::vector<std::string>> registry{
      {"thm1-1d", {"monotone_inclusion", "subcritical_on_x3_x4"}},
      {"thm2-radial", {"cone_containment", "front_speed", "invasion"}},
      {"thm3-nonexistence", {"supgrad_bound", "breakdown_before_bound"}},
      {"thm5-fbp1", {"support_monotone", "barrier_verified", "comparison"}},
      {"thm6-fbp2", {"barrier_verified", "comparison", "support_nonshrinking"}},
      {"barrier-verify-1", {"verify_w1"}},
      {"barrier-verify-2", {"endpoint_regime", "middle_regime", "all_checks"}},
      {"counterexample", {"min_n_found", "convexity", "vt_positive", "fd_crosscheck"}},
  };
  const auto it = registry.find(scenario);
  if (it == registry.end()) throw ConfigError("scenario", "unknown scenario '" + scenario + "'");
  return it->second;
}

json default_config(const std::string& scenario) {
  criteria_for(scenario);
  json c;
  c["scenario"] = scenario;
  c["profile"] = "pm";
  c["output_dir"] = "out/" + scenario;
  c["write_trajectory"] = true;
  json run{{"boundary", "neumann"}, {"cfl_safety", 0.4}, {"snapshot_dt", 0.01}, {"radial_dimension", 2}};

  if (scenario == "thm1-1d") {
    c["geometry"] = {{"x1", 0.0}, {"x2", 1.0}, {"x3", 0.3}, {"x4", 0.7}};
    c["grid"] = {{"n_cells", 400}};
    run["t_end"] = 0.5;
    c["initial"] = {{"preset", "sine"}, {"params", {{"mean", 0.7}, {"amplitude", 0.7}, {"center", 0.5}, {"period", 1.0}}}};
  } else if (scenario == "thm2-radial") {
    c["geometry"] = {{"r1", 0.5}, {"r2", 1.5}, {"r3", 0.9}, {"r4", 1.1}};
    c["grid"] = {{"n_cells", 600}};
    run["t_end"] = "auto";
    c["initial"] = {{"preset", "plateau"},
                    {"params", {{"base", 1.3}, {"peak", 0.5}, {"center", 1.0}, {"crossing_halfwidth", 0.1}}}};
  } else if (scenario == "thm3-nonexistence") {
    c["geometry"] = {{"r1", 0.5}, {"r2", 1.5}, {"r3", 0.7}, {"r4", 1.0}, {"r5", 1.3}};
    c["grid"] = {{"n_cells", 600}};
    run["t_end"] = "auto";
    c["initial"] = {{"preset", "plateau"}, {"params", {{"base", 0.5}, {"peak", 6.0}, {"center", 1.0}, {"width", 0.12}}}};
  } else if (scenario == "thm5-fbp1") {
    c["geometry"] = {{"x1", 0.0}, {"x2", 1.0}};
    c["grid"] = {{"n_cells", 400}};
    run["t_end"] = 0.5;
    c["initial"] = {{"preset", "bump"}, {"params", {{"left", 0.3}, {"right", 0.7}, {"amplitude", 0.2}}}};
    c["barrier"] = {{"x5", 0.35}, {"x6", 0.65}};
  } else if (scenario == "thm6-fbp2") {
    c["geometry"] = {{"r1", 0.5}, {"r2", 1.5}, {"r3", 0.9}, {"r4", 1.1}};
    c["grid"] = {{"n_cells", 600}};
    run["t_end"] = 0.4;
    c["initial"] = {{"preset", "bump"}, {"params", {{"left", 0.9}, {"right", 1.1}, {"amplitude", 0.2}}}};
    c["barrier"] = {{"r5", 0.95}, {"r6", 1.0}, {"k", "auto"}, {"k_fraction", 0.5}, {"t_star", "auto"}};
  } else if (scenario == "barrier-verify-1") {
    c["barrier"] = {{"x5", 0.0}, {"x6", 1.0}, {"horizon", 1.0}, {"resolution", 512}};
  } else if (scenario == "barrier-verify-2") {
    c["geometry"] = {{"r1", 0.5}, {"r2", 1.5}, {"r3", 0.85}, {"r4", 1.15}};
    c["barrier"] = {{"r5", 0.9},         {"r6", 1.1},        {"k", "auto"}, {"k_fraction", 0.5},
                    {"t_star", 0.2},     {"resolution", 1024}};
  } else if (scenario == "counterexample") {
    c["counterexample"] = {{"n_max", 50}, {"n", 0}, {"half_width", 1e-3}, {"patch_n", 64}};
  }
  if (scenario.rfind("barrier-verify", 0) != 0 && scenario != "counterexample") c["run"] = run;
  return c;
}

namespace {

const json& at_path(const json& cfg, const std::string& path) {
  const json* cur = &cfg;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!cur->is_object() || !cur->contains(part)) throw ConfigError(path, "missing field");
    cur = &cur->at(part);
  }
  return *cur;
}

double num(const json& cfg, const std::string& path) {
  const json& v = at_path(cfg, path);
  if (!v.is_number()) throw ConfigError(path, "must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(path, "must be finite");
  return d;
}

int integer(const json& cfg, const std::string& path) {
  const json& v = at_path(cfg, path);
  if (!v.is_number_integer()) throw ConfigError(path, "must be an integer");
  return v.get<int>();
}

bool is_auto(const json& cfg, const std::string& path) {
  const json& v = at_path(cfg, path);
  return v.is_string() && v.get<std::string>() == "auto";
}

void require_less(const json& cfg, const std::vector<std::string>& keys, const std::string& group) {
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    const double a = num(cfg, group + "." + keys[i]), b = num(cfg, group + "." + keys[i + 1]);
    if (!(a < b)) throw ConfigError(group + "." + keys[i], "must be less than " + keys[i + 1]);
  }
}

void validate(const json& c) {
  const std::string s = c.at("scenario").get<std::string>();
  if (!c.at("profile").is_string()) throw ConfigError("profile", "must be \"pm\" or a file path");
  if (c.contains("run")) {
    if (!is_auto(c, "run.t_end") && !(num(c, "run.t_end") >= 0.0)) throw ConfigError("run.t_end", "must be >= 0");
    if (!(num(c, "run.snapshot_dt") > 0.0)) throw ConfigError("run.snapshot_dt", "must be positive");
    const double cfl = num(c, "run.cfl_safety");
    if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("run.cfl_safety", "must lie in (0, 1]");
    if (integer(c, "run.radial_dimension") < 1) throw ConfigError("run.radial_dimension", "must be >= 1");
    boundary_from_string(at_path(c, "run.boundary").get<std::string>());
  }
  if (c.contains("grid") && integer(c, "grid.n_cells") < 8) throw ConfigError("grid.n_cells", "must be >= 8");
  if (s == "thm1-1d") require_less(c, {"x1", "x3", "x4", "x2"}, "geometry");
  if (s == "thm2-radial" || s == "thm6-fbp2") require_less(c, {"r1", "r3", "r4", "r2"}, "geometry");
  if (s == "thm3-nonexistence") require_less(c, {"r1", "r3", "r4", "r5", "r2"}, "geometry");
  if ((s == "thm2-radial" || s == "thm3-nonexistence" || s == "thm6-fbp2") && !(num(c, "geometry.r1") > 0.0))
    throw ConfigError("geometry.r1", "must be positive");
  if (s == "thm5-fbp1") {
    require_less(c, {"x1", "x2"}, "geometry");
    require_less(c, {"x5", "x6"}, "barrier");
  }
  if (s == "thm6-fbp2" || s == "barrier-verify-2") require_less(c, {"r5", "r6"}, "barrier");
  if (s == "barrier-verify-1") require_less(c, {"x5", "x6"}, "barrier");
  if (s == "counterexample") {
    if (integer(c, "counterexample.n_max") < 1) throw ConfigError("counterexample.n_max", "must be >= 1");
    if (integer(c, "counterexample.n") < 0) throw ConfigError("counterexample.n", "must be >= 0 (0 = minimal n)");
    if (integer(c, "counterexample.patch_n") < 3) throw ConfigError("counterexample.patch_n", "must be >= 3");
    const double hw = num(c, "counterexample.half_width");
    if (!(hw > 0.0 && hw <= 1e-2)) throw ConfigError("counterexample.half_width", "must lie in (0, 1e-2]");
  }
}

}  // namespace

json resolve_config(const json& user) {
  if (!user.is_object()) throw ConfigError("", "config must be a JSON object");
  if (!user.contains("scenario") || !user.at("scenario").is_string())
    throw ConfigError("scenario", "missing scenario name");
  json c = default_config(user.at("scenario").get<std::string>());
  c.merge_patch(user);
  validate(c);
  return c;
}

fs::path output_root() {
  if (const char* r = std::getenv("PMLAB_OUTPUT_ROOT"); r && *r) return fs::path(r);
  return fs::current_path();
}

fs::path resolve_output_dir(const json& config) {
  const fs::path dir = config.value("output_dir", std::string("out"));
  return dir.is_absolute() ? dir : output_root() / dir;
}

namespace {

struct Context {
  json cfg;
  fs::path dir;
  NonlinearityProfile profile = NonlinearityProfile::perona_malik();
  ScenarioReport report;
  json manifest = {{"plots", json::array()}};

  void criterion(const std::string& name, bool pass, double margin, const std::string& detail = {}) {
    report.criteria.push_back({name, pass, margin + 0.0, detail});
  }
  void file(const std::string& name) { report.files.push_back(name); }
  void csv(const std::string& name, const CsvTable& t) {
    write_csv(dir / name, t);
    file(name);
  }
  void json_file(const std::string& name, const json& j) {
    write_json(dir / name, j);
    file(name);
  }
};

RunConfig run_config(const json& c, Model model, double t_end) {
  RunConfig rc;
  rc.model = model;
  rc.boundary = boundary_from_string(at_path(c, "run.boundary").get<std::string>());
  rc.cfl_safety = num(c, "run.cfl_safety");
  rc.snapshot_dt = num(c, "run.snapshot_dt");
  rc.radial_dimension = integer(c, "run.radial_dimension");
  rc.t_end = t_end;
  return rc;
}

double t_end_or(const json& c, double fallback) { return is_auto(c, "run.t_end") ? fallback : num(c, "run.t_end"); }

Field1D initial_field(const json& c, const Grid1D& grid) { return build_initial(at_path(c, "initial"), grid); }

Trajectory simulate(Context& ctx, const Field1D& u0, const RunConfig& rc, const StepObserver& obs = {}) {
  Trajectory traj = integrate(u0, rc, ctx.profile, obs);
  if (ctx.cfg.value("write_trajectory", true)) ctx.csv("trajectory.csv", trajectory_table(traj));
  ctx.json_file("run_summary.json", run_summary(traj));
  ctx.report.metrics["breakdown"] = traj.breakdown;
  ctx.report.metrics["total_steps"] = traj.total_steps;
  ctx.report.metrics["t_final"] = traj.snapshots.back().time;
  return traj;
}

// fronts.csv rows: front id, t, alpha, measured speed, heuristic speed
void write_fronts(Context& ctx, const Trajectory& traj, double anchor, Model model, double window) {
  CsvTable t{{"front", "t", "alpha", "measured_speed", "heuristic_speed"}, {}};
  json status = json::array();
  for (int side = 0; side < 2; ++side) {
    FrontTrajectory ft;
    try {
      ft = track_front(traj, ctx.profile, FrontSelector{anchor, side == 1});
    } catch (const TrackingError& e) {
      status.push_back({{"front", side}, {"status", "absent"}, {"detail", e.what()}});
      continue;
    }
    status.push_back({{"front", side}, {"status", to_string(ft.status)}, {"end_time", ft.end_time}});
    const auto speeds = measured_speed(ft, window);
    std::map<double, double> by_t;
    for (const auto& s : speeds) by_t[s.t] = s.speed;
    std::size_t k = 0;
    for (std::size_t i = 0; i < ft.times.size(); ++i) {
      while (k < traj.snapshots.size() && traj.snapshots[k].time < ft.times[i]) ++k;
      const double heur = k < traj.snapshots.size() ? heuristic_speed(traj.snapshots[k], ctx.profile, ft.positions[i], model)
                                                     : std::nan("");
      const auto it = by_t.find(ft.times[i]);
      t.rows.push_back({static_cast<double>(side), ft.times[i], ft.positions[i],
                        it == by_t.end() ? std::nan("") : it->second, heur});
    }
  }
  ctx.csv("fronts.csv", t);
  ctx.report.metrics["fronts"] = status;
}

void scenario_thm1(Context& ctx) {
  const json& c = ctx.cfg;
  const double x1 = num(c, "geometry.x1"), x2 = num(c, "geometry.x2"), x3 = num(c, "geometry.x3"),
               x4 = num(c, "geometry.x4");
  const Grid1D grid = Grid1D::make(x1, x2, integer(c, "grid.n_cells"));
  const Field1D u0 = initial_field(c, grid);
  const RunConfig rc = run_config(c, Model::PM1D, t_end_or(c, 0.5));
  const Trajectory traj = simulate(ctx, u0, rc);

  const auto incl = check_monotone_inclusion(traj, ctx.profile, 2);
  ctx.report.metrics["monotone_inclusion"] = to_json(incl);
  ctx.criterion("monotone_inclusion", incl.holds, -incl.worst_violation);

  const double slack = 2.0 * u0.grid.spacing();
  double worst = 0.0;
  for (const auto& s : traj.snapshots) {
    const auto reg = subcritical_intervals(s, ctx.profile);
    double covered = 0.0;
    const double lo = x3 + slack, hi = x4 - slack;
    for (const auto& iv : reg.intervals) covered += std::max(0.0, std::min(hi, iv.right) - std::max(lo, iv.left));
    worst = std::max(worst, (hi - lo) - covered);
  }
  ctx.criterion("subcritical_on_x3_x4", worst <= 1e-12, -worst);
  ctx.report.metrics["initial_regions"] = to_json(subcritical_intervals(traj.snapshots.front(), ctx.profile));
  ctx.report.metrics["final_regions"] = to_json(subcritical_intervals(traj.snapshots.back(), ctx.profile));
  write_fronts(ctx, traj, 0.5 * (x3 + x4), Model::PM1D, 5.0 * rc.snapshot_dt);
  ctx.manifest["plots"].push_back({{"kind", "fronts"}, {"csv", "fronts.csv"}, {"output", "fronts.svg"}});
}

void scenario_thm2(Context& ctx) {
  const json& c = ctx.cfg;
  const double r1 = num(c, "geometry.r1"), r2 = num(c, "geometry.r2"), r3 = num(c, "geometry.r3"),
               r4 = num(c, "geometry.r4");
  const auto k = constants(ctx.profile, r2);
  const double t_bound = 1.25 * (r2 - r1) / k.k0;
  const Grid1D grid = Grid1D::make(r1, r2, integer(c, "grid.n_cells"), true);
  const Field1D u0 = initial_field(c, grid);
  const RunConfig rc = run_config(c, Model::PMRadial, t_end_or(c, t_bound));
  const Trajectory traj = simulate(ctx, u0, rc);

  const auto rep = check_expansion_rate(traj, ctx.profile, ExpansionSet{r3, r4, k.k0, rc.t_end},
                                        2.0 * grid.spacing() / (r2 - r1));
  ctx.report.metrics["k0"] = k.k0;
  ctx.report.metrics["G"] = k.G;
  ctx.report.metrics["A"] = k.A;
  ctx.report.metrics["invasion_bound"] = t_bound;
  ctx.report.metrics["expansion"] = to_json(rep);
  const auto sup = check_monotone_inclusion(traj, ctx.profile, 2, RegionKind::Supercritical);
  ctx.report.metrics["supercritical_non_expansion"] = to_json(sup);
  ctx.report.metrics["final_regions"] = to_json(subcritical_intervals(traj.snapshots.back(), ctx.profile));

  ctx.criterion("cone_containment", !rep.vacuous && rep.containment_holds, -rep.worst_violation);
  ctx.criterion("front_speed", rep.mean_outward_speed >= 0.85 * k.k0, rep.mean_outward_speed - 0.85 * k.k0);
  const bool invaded = rep.invaded && rep.invasion_time <= t_bound;
  ctx.criterion("invasion", invaded, rep.invaded ? t_bound - rep.invasion_time : std::nan(""));

  write_fronts(ctx, traj, 0.5 * (r3 + r4), Model::PMRadial, 5.0 * rc.snapshot_dt);
  ctx.manifest["plots"].push_back({{"kind", "fronts"},
                                   {"csv", "fronts.csv"},
                                   {"output", "fronts.svg"},
                                   {"cone", {{"r1", r1}, {"r2", r2}, {"r3", r3}, {"r4", r4}, {"k0", k.k0}}}});
}

void scenario_thm3(Context& ctx) {
  const json& c = ctx.cfg;
  const double r1 = num(c, "geometry.r1"), r2 = num(c, "geometry.r2"), r3 = num(c, "geometry.r3"),
               r4 = num(c, "geometry.r4"), r5 = num(c, "geometry.r5");
  const auto cert = nonexistence_certificate(r1, r2, r3, r4, r5, ctx.profile);
  const double t_bound = 1.25 * cert.T0;
  const Grid1D grid = Grid1D::make(r1, r2, integer(c, "grid.n_cells"), true);
  const Field1D u0 = initial_field(c, grid);
  const RunConfig rc = run_config(c, Model::PMRadial, t_end_or(c, t_bound));

  const double h = u0.grid.spacing();
  const int i4 = std::clamp(static_cast<int>(std::lround((r4 - u0.grid.a) / h)), 1, u0.grid.n_cells - 1);
  const auto ui = static_cast<std::size_t>(i4);
  const double grad4 = (u0.values[ui + 1] - u0.values[ui - 1]) / (2.0 * h);
  ctx.report.metrics["gradient_threshold"] = cert.gradient_threshold;
  ctx.report.metrics["T0"] = cert.T0;
  ctx.report.metrics["breakdown_bound"] = t_bound;
  ctx.report.metrics["initial_gradient_at_r4"] = grad4;
  ctx.report.metrics["datum_above_threshold"] = grad4 > cert.gradient_threshold;

  const Trajectory traj = simulate(ctx, u0, rc);
  const auto sg = check_supgrad_bound(traj, r3, r5, ctx.profile, 1e-3);
  ctx.report.metrics["supgrad"] = to_json(sg);
  ctx.report.metrics["breakdown_time"] = traj.breakdown ? json(traj.breakdown_time) : json(nullptr);
  ctx.report.metrics["breakdown_reason"] = traj.breakdown_reason;
  double max_grad = 0.0;
  for (double p : midpoint_gradients(traj.snapshots.back())) max_grad = std::max(max_grad, std::abs(p));
  ctx.report.metrics["final_max_gradient"] = max_grad;

  ctx.criterion("supgrad_bound", sg.holds, sg.worst_margin);
  const bool bd = traj.breakdown && traj.breakdown_time <= t_bound;
  ctx.criterion("breakdown_before_bound", bd, traj.breakdown ? t_bound - traj.breakdown_time : std::nan(""),
                traj.breakdown ? traj.breakdown_reason : "no breakdown detected");

  CsvTable t{{"t", "M", "bound"}, {}};
  for (const auto& s : sg.samples) t.rows.push_back({s.t, s.M, s.bound});
  ctx.csv("supgrad.csv", t);
  ctx.manifest["plots"].push_back({{"kind", "supgrad"}, {"csv", "supgrad.csv"}, {"output", "supgrad.svg"}});
}

CsvTable w1_margin_table(const BarrierFBP1& b, const NonlinearityProfile& profile, double horizon) {
  CsvTable t{{"x", "t", "margin"}, {}};
  for (int j = 0; j <= 4; ++j) {
    const double tt = horizon * j / 4.0;
    for (int i = 1; i < 64; ++i) {
      const double x = b.x5 + (b.x6 - b.x5) * i / 64.0;
      const auto v = eval_w1(b, x, tt);
      const double m = v.w > 0.0 && v.w < profile.dphi_critical() ? coeff_g(profile, v.w) * v.w_xx - v.w_t : std::nan("");
      t.rows.push_back({x, tt, m});
    }
  }
  return t;
}

CsvTable w2_margin_table(const BarrierFBP2& b, const NonlinearityProfile& profile, double A) {
  CsvTable t{{"x", "t", "margin"}, {}};
  const auto f = radial_forcing();
  const double hb = (b.r6 - b.r5) / 1024.0;
  for (int j = 0; j <= 4; ++j) {
    const double tt = b.t_star * j / 4.0;
    for (int i = 0; i <= 64; ++i) {
      const double y = b.r5 + hb + (b.r6 - b.r5 - 2.0 * hb) * i / 64.0;
      const double r = y + b.k * tt;
      const auto v = eval_w2(b, r, tt);
      const double m = v.w > 0.0 && v.w < profile.dphi_critical()
                           ? coeff_g(profile, v.w) * (v.w_xx + f(r, tt, v.w, v.w_x) + A) - v.w_t
                           : std::nan("");
      t.rows.push_back({y, tt, m});
    }
  }
  return t;
}

void scenario_thm5(Context& ctx) {
  const json& c = ctx.cfg;
  const Grid1D grid = Grid1D::make(num(c, "geometry.x1"), num(c, "geometry.x2"), integer(c, "grid.n_cells"));
  const Field1D v0 = initial_field(c, grid);
  const RunConfig rc = run_config(c, Model::FBP1, t_end_or(c, 0.5));

  std::vector<char> positive;
  long long lost = 0, steps = 0;
  std::size_t min_count = 0, max_count = 0;
  const auto observer = [&](double, std::span<const double> v) {
    std::size_t count = 0;
    if (positive.empty()) positive.assign(v.size(), 0);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const char p = v[i] > 0.0;
      if (steps > 0 && positive[i] && !p) ++lost;
      positive[i] = p;
      count += static_cast<std::size_t>(p);
    }
    if (steps == 0) min_count = count;
    max_count = std::max(max_count, count);
    ++steps;
  };
  const Trajectory traj = simulate(ctx, v0, rc, observer);
  ctx.report.metrics["support_nodes_initial"] = min_count;
  ctx.report.metrics["support_nodes_max"] = max_count;
  ctx.report.metrics["support_nodes_lost"] = lost;
  ctx.criterion("support_monotone", lost == 0, -static_cast<double>(lost));

  const double x5 = num(c, "barrier.x5"), x6 = num(c, "barrier.x6");
  const BarrierFBP1 b = auto_barrier_fbp1(x5, x6, ctx.profile, &v0, rc.t_end);
  const auto lam = select_lambda_detail(b, ctx.profile, rc.t_end);
  auto vr = verify_w1(b, ctx.profile, 512, rc.t_end, &v0);
  if (lam.t_sample_exceeds) vr.notes.push_back("lambda supremand larger at t = T than at t = 0");
  ctx.report.metrics["barrier"] = to_json(vr);
  ctx.json_file("barrier_report.json", to_json(vr));
  ctx.criterion("barrier_verified", vr.all_pass(), vr.min_margin());

  const auto cmp = check_comparison(traj, b);
  ctx.report.metrics["comparison"] = to_json(cmp);
  ctx.criterion("comparison", cmp.holds, cmp.worst_margin + cmp.tolerance,
                cmp.setup_ok ? "" : "initial datum not above barrier");

  ctx.csv("barrier_margin.csv", w1_margin_table(b, ctx.profile, rc.t_end));
  ctx.manifest["plots"].push_back(
      {{"kind", "barrier_heatmap"}, {"csv", "barrier_margin.csv"}, {"output", "barrier_margin.svg"}});
}

double resolve_k(const json& c, double G, double A) {
  if (is_auto(c, "barrier.k")) return num(c, "barrier.k_fraction") * G * std::sqrt(A);
  return num(c, "barrier.k");
}

void scenario_thm6(Context& ctx) {
  const json& c = ctx.cfg;
  const double r1 = num(c, "geometry.r1"), r2 = num(c, "geometry.r2"), r3 = num(c, "geometry.r3"),
               r4 = num(c, "geometry.r4");
  const Grid1D grid = Grid1D::make(r1, r2, integer(c, "grid.n_cells"), true);
  const Field1D v0 = initial_field(c, grid);
  const RunConfig rc = run_config(c, Model::FBP2, t_end_or(c, 0.4));
  const auto k = constants(ctx.profile, r2);

  std::vector<char> positive;
  long long lost = 0, steps = 0;
  double cone_miss = 0.0;
  const double h = v0.grid.spacing();
  const auto observer = [&](double t, std::span<const double> v) {
    if (positive.empty()) positive.assign(v.size(), 0);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const char p = v[i] > 0.0;
      if (steps > 0 && positive[i] && !p) ++lost;
      positive[i] = p;
    }
    // expansion cone, 2-cell slack
    const double lo = std::max(r1, r3 - k.k0 * t) + 2.0 * h, hi = std::min(r2, r4 + k.k0 * t) - 2.0 * h;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double r = v0.grid.node(static_cast<int>(i));
      if (r > lo && r < hi && !(v[i] > 0.0)) {
        cone_miss = std::max(cone_miss, std::min(r - lo, hi - r));
      }
    }
    ++steps;
  };
  const Trajectory traj = simulate(ctx, v0, rc, observer);
  ctx.criterion("support_nonshrinking", lost == 0, -static_cast<double>(lost));
  ctx.report.metrics["support_cone_containment"] = cone_miss == 0.0;
  ctx.report.metrics["support_cone_depth_missed"] = cone_miss;
  ctx.report.metrics["k0"] = k.k0;

  const double k_b = resolve_k(c, k.G, k.A);
  const double t_star = is_auto(c, "barrier.t_star") ? rc.t_end : num(c, "barrier.t_star");
  const BarrierFBP2 b = auto_barrier_fbp2(num(c, "barrier.r5"), num(c, "barrier.r6"), k_b, t_star, ctx.profile, k.A,
                                          radial_forcing(), &v0);
  const auto vr = verify_w2(b, ctx.profile, k.A, radial_forcing(), 1024, &v0);
  ctx.report.metrics["barrier"] = to_json(vr);
  ctx.json_file("barrier_report.json", to_json(vr));
  ctx.criterion("barrier_verified", vr.all_pass(), vr.min_margin());

  const auto cmp = check_comparison(traj, b);
  ctx.report.metrics["comparison"] = to_json(cmp);
  ctx.criterion("comparison", cmp.holds, cmp.worst_margin + cmp.tolerance,
                cmp.setup_ok ? "" : "initial datum not above barrier");
  ctx.csv("barrier_margin.csv", w2_margin_table(b, ctx.profile, k.A));
  ctx.manifest["plots"].push_back(
      {{"kind", "barrier_heatmap"}, {"csv", "barrier_margin.csv"}, {"output", "barrier_margin.svg"}});
}

void scenario_bv1(Context& ctx) {
  const json& c = ctx.cfg;
  const double horizon = num(c, "barrier.horizon");
  const int res = integer(c, "barrier.resolution");
  const BarrierFBP1 b = auto_barrier_fbp1(num(c, "barrier.x5"), num(c, "barrier.x6"), ctx.profile, nullptr, horizon);
  const auto lam = select_lambda_detail(b, ctx.profile, horizon);
  auto vr = verify_w1(b, ctx.profile, res, horizon);
  if (lam.t_sample_exceeds) vr.notes.push_back("lambda supremand larger at t = T than at t = 0");
  ctx.report.metrics["barrier"] = to_json(vr);
  ctx.report.metrics["lambda_argmax"] = lam.argmax;
  ctx.json_file("barrier_report.json", to_json(vr));
  ctx.criterion("verify_w1", vr.all_pass(), vr.min_margin());
  ctx.csv("barrier_margin.csv", w1_margin_table(b, ctx.profile, horizon));
  ctx.manifest["plots"].push_back(
      {{"kind", "barrier_heatmap"}, {"csv", "barrier_margin.csv"}, {"output", "barrier_margin.svg"}});
}

void scenario_bv2(Context& ctx) {
  const json& c = ctx.cfg;
  const double r1 = num(c, "geometry.r1"), r2 = num(c, "geometry.r2");
  const auto k = constants(ctx.profile, r2);
  const double k_b = resolve_k(c, k.G, k.A);
  const double t_star = num(c, "barrier.t_star");
  const int res = integer(c, "barrier.resolution");
  const BarrierFBP2 b = auto_barrier_fbp2(num(c, "barrier.r5"), num(c, "barrier.r6"), k_b, t_star, ctx.profile, k.A,
                                          radial_forcing(), nullptr);
  const auto vr = verify_w2(b, ctx.profile, k.A, radial_forcing(), res);
  ctx.report.metrics["barrier"] = to_json(vr);
  ctx.json_file("barrier_report.json", to_json(vr));
  if (c.contains("geometry") && c.at("geometry").contains("r3")) {
    const ConeSet cs{r1, r2, num(c, "geometry.r3"), num(c, "geometry.r4"), k.k0, b.r5, b.r6, b.k, b.t_star};
    ctx.report.metrics["window_inside_cone"] = cs.window_inside_cone();
  }
  const auto* e = vr.find("true_inequality_endpoint_regime");
  const auto* m = vr.find("true_inequality_middle_regime");
  ctx.criterion("endpoint_regime", e->pass, e->margin);
  ctx.criterion("middle_regime", m->pass, m->margin);
  ctx.criterion("all_checks", vr.all_pass(), vr.min_margin());
  ctx.csv("barrier_margin.csv", w2_margin_table(b, ctx.profile, k.A));
  ctx.manifest["plots"].push_back(
      {{"kind", "barrier_heatmap"}, {"csv", "barrier_margin.csv"}, {"output", "barrier_margin.svg"}});
}

void scenario_counterexample(Context& ctx) {
  const json& c = ctx.cfg;
  const int n_max = integer(c, "counterexample.n_max");
  int n = integer(c, "counterexample.n");
  if (n == 0 && c.contains("initial") && c.at("initial").value("preset", "") == "taylor-counterexample")
    n = c.at("initial").value("params", json::object()).value("n", 0);
  const auto found = find_min_n(ctx.profile, n_max);
  ctx.criterion("min_n_found", found.has_value(), found ? n_max - *found : std::nan(""));
  if (n == 0) n = found.value_or(n_max);
  const TaylorDatum d = datum_from_n(n);
  const double conv = convexity_margin(d), vt = vt_origin(d, ctx.profile), dini = dini_condition(d);
  ctx.criterion("convexity", dini > 0.0 && conv < 0.0, -conv);
  ctx.criterion("vt_positive", vt > 0.0, vt);
  CrossCheck cc;
  try {
    cc = crosscheck_fd(d, ctx.profile, num(c, "counterexample.half_width"), integer(c, "counterexample.patch_n"));
    ctx.criterion("fd_crosscheck", cc.rel_err <= 1e-2, 1e-2 - cc.rel_err);
  } catch (const DegeneracyError& e) {
    ctx.criterion("fd_crosscheck", false, std::nan(""), e.what());
  }
  const json cert{{"n", n},           {"dini", dini},         {"convexity_margin", conv}, {"vt_closed_form", vt},
                  {"vt_fd", cc.fd_value}, {"rel_err", cc.rel_err}};
  ctx.report.metrics["certificate"] = cert;
  ctx.report.metrics["min_n"] = found ? json(*found) : json(nullptr);
  ctx.json_file("certificate.json", cert);
  CsvTable scan{{"n", "dini", "convexity_margin", "vt_origin", "both"}, {}};
  for (int m = 1; m <= n_max; ++m) {
    const auto dm = datum_from_n(m);
    scan.rows.push_back({static_cast<double>(m), dini_condition(dm), convexity_margin(dm), vt_origin(dm, ctx.profile),
                         both_conditions(dm, ctx.profile) ? 1.0 : 0.0});
  }
  ctx.csv("scan.csv", scan);
}

}  // namespace

ScenarioReport run_scenario(const json& config) {
  Context ctx;
  ctx.cfg = resolve_config(config);
  const std::string s = ctx.cfg.at("scenario").get<std::string>();
  ctx.report.scenario = s;
  ctx.dir = resolve_output_dir(ctx.cfg);
  ctx.report.output_dir = ctx.dir;
  fs::create_directories(ctx.dir);
  ctx.profile = NonlinearityProfile::from_spec(ctx.cfg.at("profile").get<std::string>());
  ctx.json_file("config.json", ctx.cfg);

  if (s == "thm1-1d")
    scenario_thm1(ctx);
  else if (s == "thm2-radial")
    scenario_thm2(ctx);
  else if (s == "thm3-nonexistence")
    scenario_thm3(ctx);
  else if (s == "thm5-fbp1")
    scenario_thm5(ctx);
  else if (s == "thm6-fbp2")
    scenario_thm6(ctx);
  else if (s == "barrier-verify-1")
    scenario_bv1(ctx);
  else if (s == "barrier-verify-2")
    scenario_bv2(ctx);
  else
    scenario_counterexample(ctx);

  const auto& order = criteria_for(s);
  auto rank = [&](const CriterionResult& cr) { return std::find(order.begin(), order.end(), cr.name) - order.begin(); };
  std::stable_sort(ctx.report.criteria.begin(), ctx.report.criteria.end(),
                   [&](const auto& a, const auto& b) { return rank(a) < rank(b); });
  std::vector<std::string> names;
  for (const auto& cr : ctx.report.criteria) names.push_back(cr.name);
  if (names != order) throw std::logic_error("scenario " + s + " does not match the criteria registry");

  ctx.file("report.json");
  ctx.file("manifest.json");
  write_json(ctx.dir / "report.json", ctx.report.to_json());
  ctx.manifest["scenario"] = s;
  ctx.manifest["files"] = ctx.report.files;
  write_json(ctx.dir / "manifest.json", ctx.manifest);
  return ctx.report;
}

json set_path(const json& config, const std::string& path, const json& value) {
  json out = resolve_config(config);
  json* cur = &out;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw ConfigError(path, "empty parameter path");
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!cur->is_object() || !cur->contains(parts[i])) throw ConfigError(path, "unresolvable parameter path");
    cur = &(*cur)[parts[i]];
  }
  *cur = value;
  return out;
}

std::vector<double> parse_value_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell.substr(first), &used);
    } catch (const std::exception&) {
      throw ConfigError("--values", "not a number: '" + cell + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<ScenarioReport> run_sweep(const json& base, const std::string& path, const std::vector<double>& values,
                                      int workers) {
  std::vector<ScenarioReport> reports(values.size());
  if (values.empty()) return reports;
  const json resolved = resolve_config(base);
  const fs::path root = resolve_output_dir(resolved);
  std::vector<json> configs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const bool as_int = at_path(resolved, path).is_number_integer();
    json v = as_int ? json(static_cast<long long>(std::llround(values[i]))) : json(values[i]);
    json c = set_path(resolved, path, v);
    c["output_dir"] = (root / ("sweep_" + std::to_string(i))).string();
    configs.push_back(std::move(c));
  }

  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const int nthreads = std::clamp(workers > 0 ? workers : hw, 1, static_cast<int>(values.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(values.size());
  auto work = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      try {
        reports[i] = run_scenario(configs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  // aggregate: numeric top-level metrics and criterion margins
  std::set<std::string> keys;
  for (const auto& r : reports)
    for (auto it = r.metrics.begin(); it != r.metrics.end(); ++it)
      if (it->is_number()) keys.insert(it.key());
  CsvTable agg;
  agg.header = {"value", "all_pass"};
  for (const auto& name : criteria_for(resolved.at("scenario").get<std::string>())) agg.header.push_back(name);
  for (const auto& k : keys) agg.header.push_back(k);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    std::vector<double> row{values[i], reports[i].all_pass() ? 1.0 : 0.0};
    for (const auto& cr : reports[i].criteria) row.push_back(cr.pass ? 1.0 : 0.0);
    for (const auto& k : keys) {
      const auto it = reports[i].metrics.find(k);
      row.push_back(it != reports[i].metrics.end() && it->is_number() ? it->get<double>() : std::nan(""));
    }
    agg.rows.push_back(std::move(row));
  }
  write_csv(root / "sweep.csv", agg);
  return reports;
}

}  // namespace pmlab
