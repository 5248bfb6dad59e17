#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "mpta/efg.hpp"

namespace mpta::solve {

using efg::BehavioralProfile;
using efg::GameTree;
using efg::Kind;
using efg::Node;

enum class Variant { kCfr, kCfrPlus };

struct ExploitabilityPoint {
  std::uint64_t iter = 0;
  double seconds = 0;
  double exploitability = 0;
};

struct SolverState {
  struct Acc {
    std::vector<double> regret;
    std::vector<double> strategy;  // cumulative, linearly weighted for CFR+
  };
  std::vector<Acc> accs;  // indexed by infoset id
  std::uint64_t t = 0;
};

// Regret matching: probability proportional to positive cumulative regret,
// uniform when no regret is positive.
inline std::vector<double> current_policy(const SolverState::Acc& acc) {
  std::vector<double> pol(acc.regret.size());
  double sum = 0;
  for (std::size_t a = 0; a < pol.size(); ++a) {
    pol[a] = std::max(acc.regret[a], 0.0);
    sum += pol[a];
  }
  if (sum <= 0) {
    std::fill(pol.begin(), pol.end(), 1.0 / static_cast<double>(pol.size()));
  } else {
    for (double& p : pol) p /= sum;
  }
  return pol;
}

inline std::vector<double> current_policy(const SolverState& state, std::int32_t infoset) {
  return current_policy(state.accs.at(infoset));
}

namespace detail {

// External reach per node: chance reach times the non-responder's profile
// probabilities, ignoring the responder's own choices.
inline std::vector<double> external_reach(const GameTree& g, const BehavioralProfile& prof,
                                          int responder_side) {
  std::vector<double> reach(g.num_nodes(), 0.0);
  reach[g.root()] = 1.0;
  for (std::int32_t i = 0; i < g.num_nodes(); ++i) {
    const Node& n = g.node(i);
    if (n.terminal() || reach[i] == 0.0) continue;
    if (efg::is_chance_kind(n.owner)) {
      for (std::size_t c = 0; c < n.children.size(); ++c) {
        reach[n.children[c]] = reach[i] * n.chance_probs[c];
      }
      continue;
    }
    if (efg::side_of(n.owner) == responder_side) {
      for (std::int32_t ch : n.children) reach[ch] = reach[i];
      continue;
    }
    const std::vector<double>* d = prof.at(n.infoset);
    const double uniform = 1.0 / static_cast<double>(n.children.size());
    for (std::size_t c = 0; c < n.children.size(); ++c) {
      reach[n.children[c]] = reach[i] * (d ? (*d)[c] : uniform);
    }
  }
  return reach;
}

}  // namespace detail

struct BestResponse {
  double value = 0;                  // responder's expected utility, in chips
  std::vector<int> chosen;           // action index per infoset (-1 = not the responder's)
};

namespace detail {

// Bottom-up expectimax over a set of responder infosets, given per-node reach
// weights that already fold in chance and every non-responder probability.
// Infosets are resolved deepest-first, each to the action maximizing the
// reach-weighted value; `util_side` selects which terminal utility is
// maximized. Exact when the responder has perfect recall; for merged
// imperfect-recall infosets the result is an achievable pure strategy, hence
// a lower bound on the true best response.
template <class Pred>
BestResponse weighted_best_response(const GameTree& g, const std::vector<double>& reach,
                                    int util_side, Pred responds) {
  BestResponse br;
  br.chosen.assign(g.infosets().size(), -1);

  // Reach-weighted subtree value, linear in the per-path reach weights: leaf
  // contributions carry the full external reach, so summing children is exact
  // at chance and non-responder nodes alike.
  std::vector<double> memo(g.num_nodes(), 0.0);
  std::vector<bool> done(g.num_nodes(), false);
  auto value = [&](auto&& self, std::int32_t id) -> double {
    if (done[id]) return memo[id];
    const Node& n = g.node(id);
    double v = 0;
    if (n.terminal()) {
      const double u = util_side == 0 ? n.pay_team : n.pay_adv;
      v = reach[id] * u / static_cast<double>(g.payoff_den());
    } else if (!efg::is_chance_kind(n.owner) && responds(g.infoset(n.infoset))) {
      const int a = br.chosen[n.infoset];
      if (a < 0) throw std::logic_error("best_response: unresolved deeper infoset");
      v = self(self, n.children[a]);
    } else {
      for (std::int32_t ch : n.children) v += self(self, ch);
    }
    memo[id] = v;
    done[id] = true;
    return v;
  };

  std::vector<std::int32_t> order;
  for (const auto& is : g.infosets()) {
    if (responds(is)) order.push_back(is.id);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
    return g.public_depth(g.infoset(a).members.front()) >
           g.public_depth(g.infoset(b).members.front());
  });
  for (std::int32_t is_id : order) {
    const auto& is = g.infoset(is_id);
    int best = 0;
    double best_v = 0;
    for (std::size_t a = 0; a < is.actions.size(); ++a) {
      double cv = 0;
      for (std::int32_t m : is.members) cv += value(value, g.node(m).children[a]);
      if (a == 0 || cv > best_v) {
        best = static_cast<int>(a);
        best_v = cv;
      }
    }
    br.chosen[is_id] = best;
  }
  br.value = value(value, g.root());
  return br;
}

}  // namespace detail

// Best response of one strategic side against a behavioral profile of the
// other. Exact under perfect recall; for the coordinator's merged infosets it
// yields the best pure strategy reachable by the greedy deepest-first order,
// a lower bound on the supremum.
inline BestResponse best_response(const GameTree& g, const BehavioralProfile& prof,
                                  int responder_side) {
  efg::check_profile(g, prof);
  const std::vector<double> reach = detail::external_reach(g, prof, responder_side);
  return detail::weighted_best_response(
      g, reach, responder_side,
      [&](const efg::InfoSet& is) { return efg::side_of(is.owner) == responder_side; });
}

inline double best_response_value(const GameTree& g, const BehavioralProfile& prof,
                                  int responder_side) {
  return best_response(g, prof, responder_side).value;
}

// Sum of both players' best-response gains; zero exactly at an equilibrium of
// the 2-player zero-sum game, reported in chips.
inline double exploitability(const GameTree& g, const BehavioralProfile& prof) {
  return best_response_value(g, prof, 0) + best_response_value(g, prof, 1);
}

// CFR / CFR+ over a 2-player zero-sum tree (one team-side identity, one
// adversary). Alternating updates; CFR+ clamps regrets at zero and weights
// the average strategy linearly by iteration.
class Solver {
 public:
  Solver(const GameTree& g, Variant variant) : g_(g), variant_(variant) {
    bool seen_team = false;
    std::int16_t team_member = -1;
    for (const auto& is : g.infosets()) {
      if (is.owner != efg::Kind::kTeamMember) continue;
      if (seen_team && is.member != team_member) {
        throw std::invalid_argument(
            "solver needs a 2-player game: found more than one team-side player");
      }
      seen_team = true;
      team_member = is.member;
    }
    state_.accs.resize(g.infosets().size());
    pol_.resize(g.infosets().size());
    delta_.resize(g.infosets().size());
    for (const auto& is : g.infosets()) {
      state_.accs[is.id].regret.assign(is.actions.size(), 0.0);
      state_.accs[is.id].strategy.assign(is.actions.size(), 0.0);
      delta_[is.id].assign(is.actions.size(), 0.0);
    }
  }

  void iterate() {
    ++state_.t;
    for (int upd = 0; upd < 2; ++upd) {
      // Snapshot every policy for this traversal: all member nodes of an
      // infoset must see the same strategy within one update, so regret
      // deltas are buffered and applied afterwards.
      for (const auto& is : g_.infosets()) pol_[is.id] = current_policy(state_.accs[is.id]);
      walk(g_.root(), upd, 1.0, 1.0);
      for (const auto& is : g_.infosets()) {
        if (efg::side_of(is.owner) != upd) continue;
        SolverState::Acc& acc = state_.accs[is.id];
        for (std::size_t a = 0; a < acc.regret.size(); ++a) {
          if (variant_ == Variant::kCfrPlus) {
            acc.regret[a] = std::max(acc.regret[a] + delta_[is.id][a], 0.0);
          } else {
            acc.regret[a] += delta_[is.id][a];
          }
          delta_[is.id][a] = 0.0;
        }
      }
    }
  }

  const SolverState& state() const { return state_; }
  const GameTree& game() const { return g_; }
  std::uint64_t iterations() const { return state_.t; }
  std::uint64_t visited_nodes() const { return visited_; }

  BehavioralProfile average_profile() const {
    BehavioralProfile prof;
    for (const auto& is : g_.infosets()) {
      const auto& s = state_.accs[is.id].strategy;
      double sum = 0;
      for (double w : s) sum += w;
      std::vector<double> d(s.size());
      if (sum <= 0) {
        std::fill(d.begin(), d.end(), 1.0 / static_cast<double>(d.size()));
      } else {
        for (std::size_t a = 0; a < d.size(); ++a) d[a] = s[a] / sum;
      }
      prof.dist.emplace(is.id, std::move(d));
    }
    return prof;
  }

  BehavioralProfile current_profile() const {
    BehavioralProfile prof;
    for (const auto& is : g_.infosets()) {
      prof.dist.emplace(is.id, current_policy(state_.accs[is.id]));
    }
    return prof;
  }

 private:
  // Returns the updating player's expected utility below `id`, in payoff
  // units (chips x payoff_den).
  double walk(std::int32_t id, int upd, double reach_me, double reach_opp) {
    ++visited_;
    const Node& n = g_.node(id);
    if (n.terminal()) {
      return static_cast<double>(upd == 0 ? n.pay_team : n.pay_adv);
    }
    if (efg::is_chance_kind(n.owner)) {
      double v = 0;
      for (std::size_t c = 0; c < n.children.size(); ++c) {
        if (n.chance_probs[c] == 0.0) continue;  // pruned virtual branches
        v += n.chance_probs[c] * walk(n.children[c], upd, reach_me, reach_opp * n.chance_probs[c]);
      }
      return v;
    }
    const std::vector<double>& pol = pol_[n.infoset];
    if (efg::side_of(n.owner) != upd) {
      double v = 0;
      for (std::size_t c = 0; c < n.children.size(); ++c) {
        v += pol[c] * walk(n.children[c], upd, reach_me, reach_opp * pol[c]);
      }
      return v;
    }
    std::vector<double> av(n.children.size());
    double v = 0;
    for (std::size_t c = 0; c < n.children.size(); ++c) {
      av[c] = walk(n.children[c], upd, reach_me * pol[c], reach_opp);
      v += pol[c] * av[c];
    }
    SolverState::Acc& acc = state_.accs[n.infoset];
    const double w = (variant_ == Variant::kCfrPlus ? static_cast<double>(state_.t) : 1.0);
    for (std::size_t c = 0; c < n.children.size(); ++c) {
      delta_[n.infoset][c] += reach_opp * (av[c] - v);
      acc.strategy[c] += w * reach_me * pol[c];
    }
    return v;
  }

  const GameTree& g_;
  Variant variant_;
  SolverState state_;
  std::vector<std::vector<double>> pol_;    // per-traversal policy snapshot
  std::vector<std::vector<double>> delta_;  // buffered regret updates
  std::uint64_t visited_ = 0;
};

}  // namespace mpta::solve
