#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "doctest.h"
#include "mpta/games.hpp"
#include "mpta/matrix_game.hpp"
#include "mpta/oracle.hpp"
#include "mpta/refine.hpp"
#include "mpta/solve.hpp"
#include "mpta/transform.hpp"

using namespace mpta;
using efg::BehavioralProfile;
using efg::GameTree;

namespace {

GameTree merged(const char* name) {
  return refine::merge_infosets(transform::mpta(games::generate(name)));
}

BehavioralProfile random_profile(const GameTree& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  BehavioralProfile p;
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

struct Golden {
  double value = 0;
  double gap = 0;
  std::string method;
};

std::map<std::string, Golden> load_golden() {
  std::ifstream in(std::string(GOLDEN_DIR) + "/tmecor.txt");
  REQUIRE(in.good());
  std::map<std::string, Golden> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string name;
    Golden g;
    ls >> name >> g.value >> g.gap >> g.method;
    out.emplace(name, g);
  }
  return out;
}

}  // namespace

TEST_CASE("matrix solver: matching pennies and rock-paper-scissors are worth 0") {
  const std::vector<double> pennies = {1, -1, -1, 1};
  auto sol = oracle::solve_matrix(pennies, 2, 2, 1e-9);
  CHECK(std::abs(sol.value) < 1e-8);
  CHECK(sol.gap < 1e-9);
  CHECK(sol.row[0] == doctest::Approx(0.5).epsilon(1e-4));

  const std::vector<double> rps = {0, -1, 1, 1, 0, -1, -1, 1, 0};
  sol = oracle::solve_matrix(rps, 3, 3, 1e-9);
  CHECK(std::abs(sol.value) < 1e-8);
  for (double p : sol.col) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-3));
}

TEST_CASE("matrix solver: negated transpose flips the value") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(-1, 1);
  const int m = 5, n = 7;
  std::vector<double> a(m * n), bt(n * m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      a[i * n + j] = u(rng);
      bt[j * m + i] = -a[i * n + j];
    }
  }
  const auto sa = oracle::solve_matrix(a, m, n, 1e-10);
  const auto sb = oracle::solve_matrix(bt, n, m, 1e-10);
  CHECK(sa.value == doctest::Approx(-sb.value).epsilon(1e-7));
}

TEST_CASE("matrix solver rejects bad dimensions") {
  CHECK_THROWS_AS(oracle::solve_matrix({1, 2, 3}, 2, 2), std::invalid_argument);
}

TEST_CASE("reduced plan counts and enumeration agree") {
  const GameTree g = games::generate("11K3");
  CHECK(oracle::count_plans(g, 0) == 27);
  CHECK(oracle::count_plans(g, -1) == 64);
  CHECK(oracle::enumerate_plans(g, 0).size() == 27);
  CHECK(oracle::enumerate_plans(g, -1).size() == 64);

  const GameTree k3 = games::generate("21K3");
  CHECK(oracle::count_plans(k3, 0) == 729);
  CHECK(oracle::count_plans(k3, 1) == 1000);
  CHECK(oracle::count_plans(k3, -1) == 4096);
}

TEST_CASE("enumeration refuses to exceed its cap") {
  const GameTree g = games::generate("21K3");
  CHECK_THROWS_AS(oracle::enumerate_plans(g, -1, 100), std::length_error);
  CHECK_THROWS_AS(oracle::joint_team_plans(g, 1000), std::length_error);
}

TEST_CASE("plans cover exactly the reachable infosets") {
  const GameTree g = games::generate("11K3");
  for (const auto& plan : oracle::enumerate_plans(g, 0)) {
    for (const auto& is : g.infosets()) {
      if (is.owner == efg::Kind::kAdversary) {
        CHECK(plan[is.id] == -1);
      }
    }
    // Opening action fixed per card; the response infoset is assigned iff the
    // opener passed.
    for (const auto& is : g.infosets()) {
      if (is.owner != efg::Kind::kTeamMember) continue;
      if (is.key.back() != '|') continue;  // response infosets handled via opener
      const std::int16_t open = plan[is.id];
      REQUIRE(open >= 0);
      const std::string resp_key = is.key + "pb";
      for (const auto& is2 : g.infosets()) {
        if (is2.key == resp_key) CHECK((plan[is2.id] >= 0) == (open == 0));
      }
    }
  }
}

TEST_CASE("payoff matrix dimensions and cap") {
  const GameTree g = games::generate("11K3");
  const auto team = oracle::joint_team_plans(g);
  const auto adv = oracle::enumerate_plans(g, -1);
  const auto pm = oracle::payoff_matrix(g, team, adv);
  CHECK(pm.rows == 27);
  CHECK(pm.cols == 64);
  CHECK_THROWS_AS(oracle::payoff_matrix(g, team, adv, 100), std::length_error);
  // Every entry is a plausible chip amount for one-bet Kuhn.
  for (double v : pm.a) CHECK(std::abs(v) <= 2.0 + 1e-12);
}

TEST_CASE("TMECor oracle: 2-player Kuhn is worth -1/18") {
  const auto res = oracle::solve_tmecor(games::generate("11K3"));
  CHECK_FALSE(res.used_double_oracle);
  CHECK(res.gap < 1e-6);
  CHECK(std::abs(res.value - (-1.0 / 18.0)) < res.gap + 1e-9);
  double mass = 0;
  for (const auto& [plan, w] : res.team_support) {
    CHECK(w >= 0);
    mass += w;
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("TMECor oracle: 21K3 via double oracle matches the recorded value") {
  const auto golden = load_golden();
  const auto res = oracle::solve_tmecor(games::generate("21K3"));
  CHECK(res.used_double_oracle);
  CHECK(res.gap < 1e-6);
  const auto& ref = golden.at("21K3");
  CHECK(std::abs(res.value - ref.value) < 1e-6 + ref.gap);
}

TEST_CASE("golden fixture lists certified gaps for all recorded instances") {
  const auto golden = load_golden();
  REQUIRE(golden.size() == 3);
  for (const auto& [name, g] : golden) {
    CHECK(g.gap < 1e-6);
    CHECK((g.method == "dense" || g.method == "double-oracle"));
  }
  CHECK(golden.at("11K3").value == doctest::Approx(-1.0 / 18).epsilon(1e-6));
  CHECK(golden.at("21K4").value == doctest::Approx(-1.0 / 24).epsilon(1e-6));
}

TEST_CASE("profile mapping preserves expected value exactly") {
  const GameTree orig = games::generate("21K3");
  const GameTree trans = merged("21K3");
  std::mt19937 rng(11);
  for (int i = 0; i < 20; ++i) {
    const auto prof = random_profile(orig, rng);
    const auto mapped = oracle::map_profile(orig, trans, prof);
    const double a = efg::expected_value(orig, prof).first;
    const double b = efg::expected_value(trans, mapped).first;
    CHECK(std::abs(a - b) < 1e-9);
    // Round trip restores the original distributions bit-for-bit.
    const auto back = oracle::map_profile(trans, orig, mapped);
    for (const auto& [id, d] : prof.dist) CHECK(back.dist.at(id) == d);
  }
}

TEST_CASE("profile mapping fails fast without merged infosets") {
  const GameTree orig = games::generate("21K3");
  const GameTree unmerged = transform::mpta(orig);  // per-node placeholder keys
  std::mt19937 rng(1);
  const auto prof = random_profile(orig, rng);
  CHECK_THROWS_AS(oracle::map_profile(orig, unmerged, prof), std::invalid_argument);
}

TEST_CASE("verify_equivalence certifies a converged CFR+ run on 21K3") {
  const GameTree orig = games::generate("21K3");
  const GameTree trans = refine::prune(merged("21K3"));
  solve::Solver s(trans, solve::Variant::kCfrPlus);
  for (int t = 0; t < 2000; ++t) s.iterate();
  const auto prof = s.average_profile();
  const auto res = oracle::solve_tmecor(orig);
  const auto rep = oracle::verify_equivalence(orig, trans, prof, res, 1e-3);
  CHECK(rep.pass);
  CHECK(rep.value_diff < 1e-3);
  CHECK(rep.transformed_exploitability < 1e-3);
  CHECK(rep.guarantee_gap < 1e-3);
}
