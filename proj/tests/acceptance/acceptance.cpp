// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance               run every criterion
//   acceptance --criterion N run criterion N only

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "pmlab/counterexample.hpp"
#include "pmlab/experiments.hpp"
#include "pmlab/initial_data.hpp"
#include "pmlab/io.hpp"
#include "pmlab/nonlinearity.hpp"
#include "pmlab/solvers.hpp"

using namespace pmlab;
using nlohmann::json;

namespace {

const NonlinearityProfile pm = NonlinearityProfile::perona_malik();

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " !" << what;
    }
  }
};

std::string fmt(double v) { return format_double(v); }

double phi_ref(double s) { return 0.5 * std::log1p(s * s); }

double fd(double s, int order) {
  auto central = [&](double h) {
    switch (order) {
      case 1: return (phi_ref(s + h) - phi_ref(s - h)) / (2 * h);
      case 2: return (phi_ref(s + h) - 2 * phi_ref(s) + phi_ref(s - h)) / (h * h);
      default: return (phi_ref(s + 2 * h) - 2 * phi_ref(s + h) + 2 * phi_ref(s - h) - phi_ref(s - 2 * h)) / (2 * h * h * h);
    }
  };
  const double h = order == 3 ? 1e-2 : 1e-3;
  return (4.0 * central(h / 2) - central(h)) / 3.0;
}

ScenarioReport scenario(const std::string& name) { return run_scenario({{"scenario", name}}); }

void criteria(Outcome& o, const ScenarioReport& r, const std::vector<std::string>& names) {
  for (const auto& n : names) {
    const auto* c = r.find(n);
    const bool ok = c && c->pass;
    o.detail << ' ' << r.scenario << '.' << n << '=' << (ok ? "ok" : "fail");
    if (c && std::isfinite(c->margin)) o.detail << "(margin " << fmt(c->margin) << ')';
    if (!ok) o.pass = false;
  }
}

void c1(Outcome& o) {
  const double d1 = eval_phi(pm, 1.0, 1), d2 = eval_phi(pm, 1.0, 2), d3 = eval_phi(pm, 1.0, 3);
  o.require(std::abs(d1 - 0.5) <= 1e-9, "phi'(1)");
  o.require(std::abs(d2) <= 1e-9, "phi''(1)");
  o.require(std::abs(d3 + 0.5) <= 1e-9, "phi'''(1)");
  double fd_err = 0;
  for (int k = 1; k <= 3; ++k) fd_err = std::max(fd_err, std::abs(eval_phi(pm, 1.0, k) - fd(1.0, k)));
  o.require(fd_err <= 1e-6, "fd oracle");
  const double k0 = constants(pm, 1.5).k0;
  o.require(std::abs(k0 - 0.47140) <= 1e-5, "k0");
  o.detail << " phi'(1)=" << fmt(d1) << " phi''(1)=" << fmt(d2) << " phi'''(1)=" << fmt(d3) << " fd_err=" << fmt(fd_err)
           << " k0=" << fmt(k0);
}

void c2(Outcome& o) {
  double worst = 0;
  for (int i = 1; i <= 1000; ++i) {
    const double s = 0.5 * i / 1001.0;
    worst = std::max(worst, std::abs(coeff_g_generic(pm, s) - coeff_g_closed_pm(s)));
  }
  const double ratio = coeff_g_generic(pm, 1e-8) / std::sqrt(1e-8);
  o.require(worst <= 1e-8, "g equivalence");
  o.require(std::abs(ratio - 1.0) <= 1e-3, "g/sqrt(s)");
  o.detail << " max|g-g_closed|=" << fmt(worst) << " (tol 1e-8) g(1e-8)/sqrt(1e-8)=" << fmt(ratio) << " (tol 1e-3)";
}

void c3(Outcome& o) { criteria(o, scenario("thm1-1d"), {"monotone_inclusion"}); }

void c4(Outcome& o) {
  const auto r = scenario("thm2-radial");
  criteria(o, r, {"cone_containment", "front_speed", "invasion"});
  const auto& e = r.metrics.at("expansion");
  o.detail << " mean_outward_speed=" << fmt(e.value("mean_outward_speed", 0.0))
           << " needed=" << fmt(0.85 * r.metrics.at("k0").get<double>());
}

void c5(Outcome& o) {
  const auto r = scenario("thm3-nonexistence");
  criteria(o, r, {"supgrad_bound", "breakdown_before_bound"});
}

void c6(Outcome& o) { criteria(o, scenario("thm5-fbp1"), {"support_monotone"}); }

void c7(Outcome& o) {
  criteria(o, scenario("barrier-verify-1"), {"verify_w1"});
  criteria(o, scenario("barrier-verify-2"), {"endpoint_regime", "middle_regime", "all_checks"});
  criteria(o, scenario("thm5-fbp1"), {"comparison"});
  criteria(o, scenario("thm6-fbp2"), {"comparison"});
}

void c8(Outcome& o) {
  const auto r = scenario("counterexample");
  criteria(o, r, {"min_n_found", "convexity", "vt_positive", "fd_crosscheck"});
  const auto n = find_min_n(pm, 50);
  o.require(n && *n <= 50, "min n");
  const auto d10 = datum_from_n(10);
  const double conv = convexity_margin(d10), vt = vt_origin(d10, pm);
  o.require(std::abs(conv - (800 - 27000 * std::numbers::sqrt2)) <= 1e-9 * std::abs(conv), "n=10 convexity");
  o.require(std::abs(vt - 1505.1883092036785) <= 1e-9 * vt, "n=10 vt");
  const auto& cert = r.metrics.at("certificate");
  o.detail << " n=" << cert.at("n").get<int>() << " rel_err=" << fmt(cert.at("rel_err").get<double>())
           << " (tol 1e-2) n10.convexity=" << fmt(conv) << " n10.vt=" << fmt(vt);
}

void c9(Outcome& o) {
  auto u = [](double x) { return 0.4 * x + 0.05 * std::sin(2 * std::numbers::pi * x); };
  auto exact = [](double x) {
    const double ux = 0.4 + 0.1 * std::numbers::pi * std::cos(2 * std::numbers::pi * x);
    const double uxx = -0.2 * std::numbers::pi * std::numbers::pi * std::sin(2 * std::numbers::pi * x);
    return (1 - ux * ux) / ((1 + ux * ux) * (1 + ux * ux)) * uxx;
  };
  std::vector<double> err;
  for (int n : {50, 100, 200, 400}) {
    const auto f = field_from_values(Grid1D::make(0, 1, n), u);
    const auto d = rhs_pm1d(f, pm);
    double e = 0;
    for (int i = 1; i < n; ++i) e = std::max(e, std::abs(d[static_cast<std::size_t>(i)] - exact(f.grid.node(i))));
    err.push_back(e);
  }
  o.detail << " orders";
  for (std::size_t k = 1; k < err.size(); ++k) {
    const double p = std::log2(err[k - 1] / err[k]);
    o.detail << ' ' << fmt(p);
    o.require(p >= 1.8, "order");
  }
  o.detail << " (min 1.8)";
}

struct Criterion {
  const char* title;
  double budget_s;
  std::function<void(Outcome&)> run;
};

const std::vector<Criterion>& table() {
  static const std::vector<Criterion> t{
      {"hypotheses and constants", 1, c1},
      {"g equivalence", 1, c2},
      {"monotone inclusion (1D)", 30, c3},
      {"radial expansion cone", 60, c4},
      {"gradient bound and breakdown", 60, c5},
      {"FBP1 support monotonicity", 30, c6},
      {"barrier suites and comparison", 30, c7},
      {"counterexample certificate", 5, c8},
      {"consistency order", 10, c9},
  };
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--criterion N]\n";
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(table().size())) {
    std::cerr << "criterion must lie in 1.." << table().size() << '\n';
    return 2;
  }

  bool all = true;
  for (std::size_t i = 0; i < table().size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    const auto& c = table()[i];
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " error: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < c.budget_s, "runtime");
    char rt[64];
    std::snprintf(rt, sizeof rt, " runtime=%.2fs (limit %gs)", secs, c.budget_s);
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << c.title << " |" << o.detail.str() << rt
              << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
