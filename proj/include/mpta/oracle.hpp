#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "mpta/efg.hpp"
#include "mpta/matrix_game.hpp"
#include "mpta/solve.hpp"

namespace mpta::oracle {

using efg::BehavioralProfile;
using efg::GameTree;
using efg::InfoSet;
using efg::Kind;
using efg::Node;

// A reduced pure plan: one action index per information set, -1 for infosets
// of other players and for infosets the plan's own earlier choices make
// unreachable. A joint team plan overlays the members' plans.
using Plan = std::vector<std::int16_t>;

inline constexpr std::uint64_t kPlanCap = 10'000'000;

// Seat selector: team member index, or -1 for the adversary.
inline bool owns(const InfoSet& is, int member) {
  if (member < 0) return is.owner == Kind::kAdversary;
  return is.owner == Kind::kTeamMember && is.member == member;
}

namespace detail {

// Own-infoset forest of one player: for every infoset, the player's previous
// infoset on the path and the action that leads on. Well-defined under
// perfect recall (checked across infoset members).
struct Forest {
  std::vector<std::int32_t> order;  // infoset ids, parents before children
  std::vector<std::int32_t> parent;  // aligned with `order` domain via `slot`
  std::vector<int> paction;
  std::vector<std::int32_t> slot;  // infoset id -> index into order, -1 outside
};

inline Forest build_forest(const GameTree& g, int member) {
  Forest f;
  f.slot.assign(g.infosets().size(), -1);
  for (const auto& is : g.infosets()) {
    if (owns(is, member)) f.order.push_back(is.id);
  }
  std::stable_sort(f.order.begin(), f.order.end(), [&](std::int32_t a, std::int32_t b) {
    return g.public_depth(g.infoset(a).members.front()) <
           g.public_depth(g.infoset(b).members.front());
  });
  f.parent.assign(f.order.size(), -1);
  f.paction.assign(f.order.size(), -1);
  for (std::size_t i = 0; i < f.order.size(); ++i) f.slot[f.order[i]] = static_cast<std::int32_t>(i);
  for (std::size_t i = 0; i < f.order.size(); ++i) {
    const InfoSet& is = g.infoset(f.order[i]);
    bool first = true;
    for (std::int32_t m : is.members) {
      std::int32_t par = -1;
      int act = -1;
      for (std::int32_t cur = m, p = g.node(m).parent; p >= 0; cur = p, p = g.node(p).parent) {
        const Node& pn = g.node(p);
        if (efg::is_decision_kind(pn.owner) && pn.owner == is.owner && pn.member == is.member) {
          par = pn.infoset;
          act = static_cast<int>(g.node(cur).incoming);
          break;
        }
      }
      if (first) {
        f.parent[i] = par;
        f.paction[i] = act;
        first = false;
      } else if (f.parent[i] != par || f.paction[i] != act) {
        throw std::runtime_error("plan forest: imperfect recall for infoset " + is.key);
      }
    }
    if (f.parent[i] >= 0 && f.slot[f.parent[i]] < 0) {
      throw std::logic_error("plan forest: parent infoset outside the player's set");
    }
  }
  return f;
}

inline bool reachable(const Forest& f, const Plan& plan, std::size_t i) {
  return f.parent[i] < 0 || plan[f.parent[i]] == f.paction[i];
}

// Number of reduced plans, without materializing them.
inline double count_plans(const GameTree& g, const Forest& f) {
  // f(I) = sum over actions of the product of the counts of the child
  // infosets that require that action; multiply over roots.
  std::vector<double> cnt(f.order.size(), 0.0);
  std::vector<std::vector<std::size_t>> kids(f.order.size());
  for (std::size_t i = 0; i < f.order.size(); ++i) {
    if (f.parent[i] >= 0) kids[f.slot[f.parent[i]]].push_back(i);
  }
  for (std::size_t ri = f.order.size(); ri-- > 0;) {
    const InfoSet& is = g.infoset(f.order[ri]);
    double total = 0;
    for (std::size_t a = 0; a < is.actions.size(); ++a) {
      double prod = 1;
      for (std::size_t k : kids[ri]) {
        if (f.paction[k] == static_cast<int>(a)) prod *= cnt[k];
      }
      total += prod;
    }
    cnt[ri] = total;
  }
  double total = 1;
  for (std::size_t i = 0; i < f.order.size(); ++i) {
    if (f.parent[i] < 0) total *= cnt[i];
  }
  return total;
}

inline void enumerate_rec(const GameTree& g, const Forest& f, std::size_t i, Plan& plan,
                          std::vector<Plan>& out, std::uint64_t cap) {
  if (i == f.order.size()) {
    if (out.size() >= cap) {
      throw std::length_error("plan enumeration exceeds cap of " + std::to_string(cap));
    }
    out.push_back(plan);
    return;
  }
  const std::int32_t is_id = f.order[i];
  if (!reachable(f, plan, i)) {
    enumerate_rec(g, f, i + 1, plan, out, cap);
    return;
  }
  const std::size_t arity = g.infoset(is_id).actions.size();
  for (std::size_t a = 0; a < arity; ++a) {
    plan[is_id] = static_cast<std::int16_t>(a);
    enumerate_rec(g, f, i + 1, plan, out, cap);
  }
  plan[is_id] = -1;
}

// Reduced-plan canonical form of a full action assignment: unreachable
// infosets reset to -1 so equal behaviors compare equal.
inline Plan canonical_plan(const GameTree& g, const Forest& f, const std::vector<int>& chosen) {
  Plan plan(g.infosets().size(), -1);
  for (std::size_t i = 0; i < f.order.size(); ++i) {
    if (!reachable(f, plan, i)) continue;
    const int a = chosen[f.order[i]];
    if (a < 0) throw std::logic_error("canonical_plan: missing action");
    plan[f.order[i]] = static_cast<std::int16_t>(a);
  }
  return plan;
}

inline void overlay(Plan& base, const Plan& add) {
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (add[i] >= 0) base[i] = add[i];
  }
}

}  // namespace detail

// All reduced pure plans of one seat (team member index, or -1 for the
// adversary). Throws length_error beyond `cap`.
inline std::vector<Plan> enumerate_plans(const GameTree& g, int member,
                                         std::uint64_t cap = kPlanCap) {
  const detail::Forest f = detail::build_forest(g, member);
  std::vector<Plan> out;
  Plan plan(g.infosets().size(), -1);
  detail::enumerate_rec(g, f, 0, plan, out, cap);
  return out;
}

inline double count_plans(const GameTree& g, int member) {
  return detail::count_plans(g, detail::build_forest(g, member));
}

// Joint team plans: the cartesian product of the members' reduced plans.
inline std::vector<Plan> joint_team_plans(const GameTree& g, std::uint64_t cap = kPlanCap) {
  std::vector<Plan> joint{Plan(g.infosets().size(), -1)};
  for (int m = 0; m < g.num_team_members(); ++m) {
    const std::vector<Plan> mine = enumerate_plans(g, m, cap);
    std::vector<Plan> next;
    if (static_cast<std::uint64_t>(joint.size()) * mine.size() > cap) {
      throw std::length_error("joint plan enumeration exceeds cap of " + std::to_string(cap));
    }
    next.reserve(joint.size() * mine.size());
    for (const Plan& j : joint) {
      for (const Plan& p : mine) {
        next.push_back(j);
        detail::overlay(next.back(), p);
      }
    }
    joint = std::move(next);
  }
  return joint;
}

namespace detail {

// Expected team chips when both sides play pure plans (chance weighted).
inline double plan_value(const GameTree& g, const Plan& team, const Plan& adv, std::int32_t id) {
  const Node& n = g.node(id);
  if (n.terminal()) return static_cast<double>(n.pay_team);
  if (efg::is_chance_kind(n.owner)) {
    double v = 0;
    for (std::size_t c = 0; c < n.children.size(); ++c) {
      if (n.chance_probs[c] == 0.0) continue;
      v += n.chance_probs[c] * plan_value(g, team, adv, n.children[c]);
    }
    return v;
  }
  const Plan& pl = efg::side_of(n.owner) == 0 ? team : adv;
  const std::int16_t a = pl[n.infoset];
  if (a < 0) throw std::logic_error("plan_value: plan does not cover a reached infoset");
  return plan_value(g, team, adv, n.children[a]);
}

}  // namespace detail

struct PayoffMatrix {
  std::vector<double> a;  // row-major, team chips; rows = team plans
  int rows = 0;
  int cols = 0;
};

// Dense normal-form payoff matrix. Refuses to materialize more than
// `max_entries` cells.
inline PayoffMatrix payoff_matrix(const GameTree& g, const std::vector<Plan>& team_plans,
                                  const std::vector<Plan>& adv_plans,
                                  std::uint64_t max_entries = kPlanCap) {
  if (static_cast<std::uint64_t>(team_plans.size()) * adv_plans.size() > max_entries) {
    throw std::length_error("payoff matrix exceeds cap of " + std::to_string(max_entries) +
                            " entries");
  }
  PayoffMatrix m;
  m.rows = static_cast<int>(team_plans.size());
  m.cols = static_cast<int>(adv_plans.size());
  m.a.resize(static_cast<std::size_t>(m.rows) * m.cols);
  const double den = static_cast<double>(g.payoff_den());
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) {
      m.a[static_cast<std::size_t>(i) * m.cols + j] =
          detail::plan_value(g, team_plans[i], adv_plans[j], g.root()) / den;
    }
  }
  return m;
}

struct TmecorResult {
  double value = 0;  // team expected chips at the optimum
  double gap = 0;    // duality-gap certificate
  std::vector<std::pair<Plan, double>> team_support;  // joint plans, correlated
  std::vector<std::pair<Plan, double>> adv_support;
  bool used_double_oracle = false;
  int rounds = 0;  // double-oracle rounds (0 on the dense path)
};

struct TmecorOptions {
  double tol = 1e-6;
  std::uint64_t max_entries = kPlanCap;  // dense-matrix threshold and cap
  std::uint64_t plan_cap = kPlanCap;
  int max_rounds = 400;
};

namespace detail {

// Accumulates weight*chance reach under `fixed` plans into `reach`; decision
// nodes of the responder (and any other seat the plan leaves open) pass the
// weight through unchanged.
inline void add_plan_reach(const GameTree& g, const Plan& fixed, double weight,
                           std::vector<double>& reach, std::int32_t id) {
  reach[id] += weight;
  const Node& n = g.node(id);
  if (n.terminal()) return;
  if (efg::is_chance_kind(n.owner)) {
    for (std::size_t c = 0; c < n.children.size(); ++c) {
      if (n.chance_probs[c] == 0.0) continue;
      add_plan_reach(g, fixed, weight * n.chance_probs[c], reach, n.children[c]);
    }
    return;
  }
  const std::int16_t a = fixed[n.infoset];
  if (a >= 0) {
    add_plan_reach(g, fixed, weight, reach, n.children[a]);
    return;
  }
  for (std::int32_t ch : n.children) add_plan_reach(g, fixed, weight, reach, ch);
}

// reach := base masked to the subtrees consistent with `partial`; nodes cut
// off by the partial plan keep reach 0.
inline void mask_reach(const GameTree& g, const Plan& partial, const std::vector<double>& base,
                       std::vector<double>& reach, std::int32_t id) {
  reach[id] = base[id];
  const Node& n = g.node(id);
  if (n.terminal()) return;
  if (!efg::is_chance_kind(n.owner) && partial[n.infoset] >= 0) {
    mask_reach(g, partial, base, reach, n.children[partial[n.infoset]]);
    return;
  }
  for (std::size_t c = 0; c < n.children.size(); ++c) {
    if (efg::is_chance_kind(n.owner) && n.chance_probs[c] == 0.0) continue;
    mask_reach(g, partial, base, reach, n.children[c]);
  }
}

// Exact best response of the team (max over joint pure plans) against a
// mixture of adversary plans: enumerate the first M-1 members' reduced plans,
// solve the last member exactly by backward induction over its (perfect
// recall) infosets.
inline std::pair<double, Plan> team_best_response(
    const GameTree& g, const std::vector<std::vector<Plan>>& lead_plans, const Forest& last_forest,
    int last_member, const std::vector<std::pair<Plan, double>>& adv_mix) {
  std::vector<double> base(g.num_nodes(), 0.0);
  for (const auto& [plan, w] : adv_mix) {
    if (w > 0) add_plan_reach(g, plan, w, base, g.root());
  }
  auto responds = [&](const InfoSet& is) { return owns(is, last_member); };

  double best_v = 0;
  Plan best_plan;
  bool first = true;
  std::vector<double> reach(g.num_nodes(), 0.0);
  Plan partial(g.infosets().size(), -1);
  auto consider = [&]() {
    std::fill(reach.begin(), reach.end(), 0.0);
    mask_reach(g, partial, base, reach, g.root());
    const solve::BestResponse br = solve::detail::weighted_best_response(g, reach, 0, responds);
    if (first || br.value > best_v) {
      first = false;
      best_v = br.value;
      best_plan = partial;
      overlay(best_plan, canonical_plan(g, last_forest, br.chosen));
    }
  };
  auto rec = [&](auto&& self, std::size_t m) -> void {
    if (m == lead_plans.size()) {
      consider();
      return;
    }
    for (const Plan& p : lead_plans[m]) {
      Plan saved = partial;
      overlay(partial, p);
      self(self, m + 1);
      partial = std::move(saved);
    }
  };
  rec(rec, 0);
  return {best_v, best_plan};
}

// Exact adversary best response against a correlated mixture of joint team
// plans. Returns the TEAM's guaranteed value and the adversary plan.
inline std::pair<double, Plan> adversary_best_response(
    const GameTree& g, const Forest& adv_forest,
    const std::vector<std::pair<Plan, double>>& team_mix) {
  std::vector<double> reach(g.num_nodes(), 0.0);
  for (const auto& [plan, w] : team_mix) {
    if (w > 0) add_plan_reach(g, plan, w, reach, g.root());
  }
  const solve::BestResponse br = solve::detail::weighted_best_response(
      g, reach, 1, [](const InfoSet& is) { return is.owner == Kind::kAdversary; });
  return {-br.value, canonical_plan(g, adv_forest, br.chosen)};
}

inline std::vector<std::pair<Plan, double>> support_of(const std::vector<Plan>& plans,
                                                       const std::vector<double>& mix,
                                                       double eps = 1e-12) {
  std::vector<std::pair<Plan, double>> out;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    if (mix[i] > eps) out.emplace_back(plans[i], mix[i]);
  }
  return out;
}

}  // namespace detail

// Brute-force TMECor: the team's optimal correlated mixture of joint pure
// plans against a best-responding adversary. Solves the dense normal form
// when it fits under max_entries; otherwise runs a double-oracle loop whose
// best responses are exact, so the returned duality gap certifies the value
// either way.
inline TmecorResult solve_tmecor(const GameTree& g, const TmecorOptions& opts = {}) {
  const int m_count = g.num_team_members();
  if (m_count < 1) throw std::invalid_argument("solve_tmecor: no team members");

  double team_count = 1;
  for (int m = 0; m < m_count; ++m) team_count *= count_plans(g, m);
  const double adv_count = count_plans(g, -1);

  TmecorResult res;
  if (team_count * adv_count <= static_cast<double>(opts.max_entries)) {
    const std::vector<Plan> team_plans = joint_team_plans(g, opts.plan_cap);
    const std::vector<Plan> adv_plans = enumerate_plans(g, -1, opts.plan_cap);
    const PayoffMatrix pm = payoff_matrix(g, team_plans, adv_plans, opts.max_entries);
    const MatrixSolution sol = solve_matrix(pm.a, pm.rows, pm.cols, opts.tol);
    res.value = sol.value;
    res.gap = sol.gap;
    res.team_support = detail::support_of(team_plans, sol.row);
    res.adv_support = detail::support_of(adv_plans, sol.col);
    return res;
  }

  // Double oracle on restricted plan sets.
  res.used_double_oracle = true;
  std::vector<std::vector<Plan>> lead_plans;
  for (int m = 0; m + 1 < m_count; ++m) lead_plans.push_back(enumerate_plans(g, m, opts.plan_cap));
  double lead_total = 1;
  for (const auto& lp : lead_plans) lead_total *= static_cast<double>(lp.size());
  if (lead_total > static_cast<double>(opts.plan_cap)) {
    throw std::length_error("team best response exceeds plan cap");
  }
  const detail::Forest last_forest = detail::build_forest(g, m_count - 1);
  const detail::Forest adv_forest = detail::build_forest(g, -1);

  std::vector<Plan> team_plans, adv_plans;
  std::set<Plan> team_seen, adv_seen;
  auto add_team = [&](const Plan& p) {
    if (team_seen.insert(p).second) {
      team_plans.push_back(p);
      return true;
    }
    return false;
  };
  auto add_adv = [&](const Plan& p) {
    if (adv_seen.insert(p).second) {
      adv_plans.push_back(p);
      return true;
    }
    return false;
  };

  {
    // Seed: an arbitrary joint plan and the exact reply to it.
    Plan seed(g.infosets().size(), -1);
    const std::vector<int> zeros(g.infosets().size(), 0);
    for (int m = 0; m < m_count; ++m) {
      detail::overlay(seed, detail::canonical_plan(g, detail::build_forest(g, m), zeros));
    }
    add_team(seed);
    add_adv(detail::adversary_best_response(g, adv_forest, {{seed, 1.0}}).second);
  }

  double inner_tol = opts.tol * 1e-2;
  double lb = 0, ub = 0;
  bool have_bounds = false;
  for (int round = 1; round <= opts.max_rounds; ++round) {
    res.rounds = round;
    const PayoffMatrix pm = payoff_matrix(g, team_plans, adv_plans, opts.max_entries);
    const MatrixSolution sol = solve_matrix(pm.a, pm.rows, pm.cols, inner_tol);
    const auto team_mix = detail::support_of(team_plans, sol.row);
    const auto adv_mix = detail::support_of(adv_plans, sol.col);

    const auto [tbr_v, tbr_plan] =
        detail::team_best_response(g, lead_plans, last_forest, m_count - 1, adv_mix);
    const auto [abr_v, abr_plan] = detail::adversary_best_response(g, adv_forest, team_mix);
    // abr_v: the restricted team mixture guarantees this much against any
    // adversary. tbr_v: no team strategy beats the restricted adversary
    // mixture by more. Hence value in [abr_v, tbr_v].
    if (!have_bounds || abr_v > lb) {
      lb = abr_v;
      res.team_support = team_mix;
    }
    if (!have_bounds || tbr_v < ub) {
      ub = tbr_v;
      res.adv_support = adv_mix;
    }
    have_bounds = true;
    res.gap = ub - lb;
    res.value = 0.5 * (ub + lb);
    if (res.gap < opts.tol) return res;

    bool grew = add_team(tbr_plan);
    grew = add_adv(abr_plan) || grew;
    if (!grew) inner_tol = std::max(inner_tol * 0.1, 1e-13);
  }
  return res;
}

// Key-level translation between a team member's infoset in the original game
// and the coordinator's infoset for that member in the transformed game (and
// back). Adversary keys are shared verbatim.
inline std::string counterpart_key(const std::string& key) {
  if (key.empty()) throw std::invalid_argument("empty infoset key");
  if (key[0] == 't') return "c" + key.substr(1);
  if (key[0] == 'c') return "t" + key.substr(1);
  return key;
}

// Carries a behavioral profile across the transformation by infoset-key
// translation, in either direction. Throws if a distribution's counterpart
// infoset does not exist in the destination game.
inline BehavioralProfile map_profile(const GameTree& src, const GameTree& dst,
                                     const BehavioralProfile& prof) {
  std::unordered_map<std::string, std::int32_t> dst_by_key;
  for (const auto& is : dst.infosets()) dst_by_key.emplace(is.key, is.id);
  BehavioralProfile out;
  for (const auto& [src_id, dist] : prof.dist) {
    const std::string key = counterpart_key(src.infoset(src_id).key);
    auto it = dst_by_key.find(key);
    if (it == dst_by_key.end()) {
      throw std::invalid_argument("map_profile: no counterpart infoset for key '" + key + "'");
    }
    if (dst.infoset(it->second).actions.size() != dist.size()) {
      throw std::invalid_argument("map_profile: action arity differs at key '" + key + "'");
    }
    out.dist.emplace(it->second, dist);
  }
  return out;
}

struct EquivalenceReport {
  double oracle_value = 0;
  double oracle_gap = 0;
  double transformed_value = 0;        // team EV of the profile in the transformed game
  double value_diff = 0;               // |transformed_value - oracle_value|
  double transformed_exploitability = 0;
  double original_worst_case = 0;      // mapped team profile vs exact adversary reply
  double guarantee_gap = 0;            // oracle_value - original_worst_case
  bool pass = false;
};

// Cross-checks a solved transformed-game profile against the normal-form
// oracle: the profile's value must match the oracle value, it must be nearly
// unexploitable in the transformed game, and its image in the original game
// must guarantee the oracle value against an exact adversary best response.
inline EquivalenceReport verify_equivalence(const GameTree& orig, const GameTree& trans,
                                            const BehavioralProfile& prof,
                                            const TmecorResult& tmecor, double tol) {
  EquivalenceReport rep;
  rep.oracle_value = tmecor.value;
  rep.oracle_gap = tmecor.gap;
  rep.transformed_value = efg::expected_value(trans, prof).first;
  rep.value_diff = std::abs(rep.transformed_value - tmecor.value);
  rep.transformed_exploitability = solve::exploitability(trans, prof);
  const BehavioralProfile mapped = map_profile(trans, orig, prof);
  rep.original_worst_case = -solve::best_response_value(orig, mapped, 1);
  rep.guarantee_gap = tmecor.value - rep.original_worst_case;
  rep.pass = rep.value_diff <= tol && rep.transformed_exploitability <= tol &&
             rep.guarantee_gap <= tol;
  return rep;
}

}  // namespace mpta::oracle
