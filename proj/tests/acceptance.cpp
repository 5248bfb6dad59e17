// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. argv[1] = path to the bench binary (for the determinism check).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mpta/games.hpp"
#include "mpta/oracle.hpp"
#include "mpta/refine.hpp"
#include "mpta/solve.hpp"
#include "mpta/transform.hpp"

using namespace mpta;
using efg::GameTree;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s — %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

efg::BehavioralProfile random_profile(const GameTree& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  efg::BehavioralProfile p;
  for (const auto& is : g.infosets()) {
    std::vector<double> d(is.actions.size());
    double s = 0;
    for (double& x : d) {
      x = u(rng);
      s += x;
    }
    for (double& x : d) x /= s;
    p.dist.emplace(is.id, std::move(d));
  }
  return p;
}

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::pair<std::string, std::int64_t>> golden = {
      {"21K3", 151},    {"21K4", 601},    {"21K6", 3001},
      {"31K6", 23401},  {"31K8", 109201}, {"41K6", 115921},
  };
  bool ok = true;
  std::ostringstream detail;
  for (const auto& [name, want] : golden) {
    const std::int64_t got = games::generate(name).num_nodes();
    if (got != want) {
      ok = false;
      detail << name << " got " << got << " want " << want << "; ";
    }
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 60.0;
  detail << "six original Kuhn totals exact, " << secs << " s";
  report(1, ok, detail.str());
}

void criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  struct Row {
    const char* name;
    std::int64_t total, team, adversary;
  };
  bool ok = true;
  std::ostringstream detail;
  for (const Row& r : {Row{"21K3", 583, 144, 72}, Row{"21K4", 3097, 768, 384},
                       Row{"21K6", 23161, 5760, 2880}}) {
    const GameTree g = refine::merge_infosets(
        transform::mpta(games::generate(r.name), transform::Prune::kDuringBuild));
    const auto c = efg::count_nodes(g);
    if (c.total != r.total || c.team != r.team || c.adversary != r.adversary) {
      ok = false;
      detail << r.name << " got " << c.total << "/" << c.team << "/" << c.adversary << "; ";
    }
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 120.0;
  detail << "pruned transformed counts exact, " << secs << " s";
  report(2, ok, detail.str());
}

void criterion3() {
  std::mt19937 rng(2024);
  double worst = 0;
  for (const char* name : {"21K3", "21K4"}) {
    const GameTree orig = games::generate(name);
    const GameTree trans = refine::merge_infosets(transform::mpta(orig));
    for (int i = 0; i < 100; ++i) {
      const auto prof = random_profile(orig, rng);
      const auto mapped = oracle::map_profile(orig, trans, prof);
      const double diff = std::abs(efg::expected_value(orig, prof).first -
                                   efg::expected_value(trans, mapped).first);
      if (diff > worst) worst = diff;
    }
  }
  std::ostringstream detail;
  detail << "200 random profiles, worst value diff " << worst;
  report(3, worst < 1e-9, detail.str());
}

void criterion4() {
  bool ok = true;
  std::ostringstream detail;
  const std::vector<std::pair<std::string, double>> cases = {{"21K3", 1e-3}, {"21K4", 5e-3}};
  for (const auto& [name, tol] : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    const GameTree orig = games::generate(name.c_str());
    oracle::TmecorOptions opts;
    opts.tol = 1e-6;
    const auto res = oracle::solve_tmecor(orig, opts);
    const GameTree trans = refine::prune(refine::merge_infosets(transform::mpta(orig)));
    solve::Solver s(trans, solve::Variant::kCfrPlus);
    double ex = 1;
    std::uint64_t t = 0;
    while (t < 50000 && ex >= 1e-3) {
      for (int k = 0; k < 250; ++k) s.iterate();
      t += 250;
      ex = solve::exploitability(trans, s.average_profile());
    }
    const double value = efg::expected_value(trans, s.average_profile()).first;
    const double diff = std::abs(value - res.value);
    const double secs = seconds_since(t0);
    const bool this_ok = res.gap < 1e-6 && ex < 1e-3 && diff < tol && secs < 600.0;
    ok = ok && this_ok;
    detail << name << ": oracle " << res.value << " (gap " << res.gap << "), cfr+ " << value
           << " after " << t << " iters (expl " << ex << "), diff " << diff << ", " << secs
           << " s; ";
  }
  report(4, ok, detail.str());
}

void criterion5() {
  bool ok = true;
  std::ostringstream detail;
  for (const auto& [name, r] : std::vector<std::pair<std::string, int>>{{"21K3", 3}, {"21K4", 4}}) {
    const GameTree g = transform::mpta(games::generate(name.c_str()), transform::Prune::kNone);
    if (!transform::check_pipb(g).ok()) ok = false;
    int branches = 0;
    for (std::int32_t i = 0; i < g.num_nodes(); ++i) {
      const auto& n = g.node(i);
      if (n.owner == efg::Kind::kCoordinator && !n.terminal()) {
        if (n.parent < 0 || g.node(n.parent).owner != efg::Kind::kTempChance) ok = false;
      }
      if (n.owner == efg::Kind::kTempChance && !n.terminal()) {
        ++branches;
        int pairs = 0;
        for (std::int32_t c : n.children) pairs += static_cast<int>(g.node(c).children.size());
        if (pairs != r * 2) ok = false;
      }
    }
    detail << name << ": " << branches << " pre-branches, all expose " << r << "x2 pairs; ";
  }
  report(5, ok, detail.str());
}

void criterion6() {
  const GameTree g = games::generate("11K3");
  solve::Solver s(g, solve::Variant::kCfrPlus);
  double ex = 1;
  std::uint64_t t = 0;
  while (t < 10000 && ex >= 1e-3) {
    for (int k = 0; k < 100; ++k) s.iterate();
    t += 100;
    ex = solve::exploitability(g, s.average_profile());
  }
  std::ostringstream detail;
  detail << "11K3 CFR+ exploitability " << ex << " after " << t << " iterations";
  report(6, ex < 1e-3 && t <= 10000, detail.str());
}

void criterion7() {
  const std::int64_t got = games::generate("21L33").num_nodes();
  std::ostringstream detail;
  detail << "21L33 generated total " << got << " vs reference 13183"
         << (got == 13183 ? " (exact match)" : " (MISMATCH — see README)");
  report(7, got == 13183, detail.str());
}

void criterion8(const std::string& bench) {
  auto run = [&](const std::string& out) {
    const std::string cmd = "\"" + bench + "\" --game 21K3 --mode solve --iters 1000 --seed 7 "
                            "--out \"" + out + "\"";
    return std::system(cmd.c_str());
  };
  const int rc1 = run("accept_run1.csv");
  const int rc2 = run("accept_run2.csv");
  auto slurp = [](const char* path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string a = slurp("accept_run1.csv");
  const std::string b = slurp("accept_run2.csv");
  const bool ok = rc1 == 0 && rc2 == 0 && !a.empty() && a == b;
  std::ostringstream detail;
  detail << "two solve runs, " << a.size() << " bytes each, byte-identical=" << (a == b ? 1 : 0);
  report(8, ok, detail.str());
}

}  // namespace

int main(int argc, char** argv) {
  const std::string bench = argc > 1 ? argv[1] : "./bench";
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8(bench);
  if (failures) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all 8 criteria passed\n");
  return 0;
}
