#pragma once

#include <string>
#include <vector>

#include "mpta/efg.hpp"

namespace mpta::transform {

using efg::GameTree;
using efg::Kind;
using efg::Node;
using efg::TreeBuilder;
using efg::ValidationReport;

// Whether the private-information pre-branches are collapsed while the
// transformed tree is built. kNone yields the full construction (every team
// decision gets all r virtual branches); kDuringBuild fuses the pruning pass
// into the rewrite, which avoids materializing the exponential un-pruned tree
// for the larger instances. The fused path produces exactly the same tree as
// refine::prune applied to the full construction.
enum class Prune { kNone, kDuringBuild };

namespace detail {

inline std::string card_label(int rank) { return std::string(1, static_cast<char>('0' + rank)); }

struct Ctx {
  const GameTree& g;
  TreeBuilder& b;
  bool prune;
};

inline void rec(Ctx& ctx, std::int32_t orig, std::int32_t neu, bool team_acted) {
  const Node& n = ctx.g.node(orig);
  if (n.terminal()) {
    // Leaf payoffs come from the original deal on this root branch.
    ctx.b.set_payoff(neu, n.pay_team, n.pay_adv);
    return;
  }
  if (n.owner == Kind::kChance) {
    ctx.b.node(neu).owner = Kind::kChance;
    for (std::size_t c = 0; c < n.children.size(); ++c) {
      const std::int32_t child = ctx.b.add_child(neu, ctx.g.label(n.actions[c]), Kind::kChance,
                                                 -1, n.chance_probs[c]);
      rec(ctx, n.children[c], child, team_acted);
    }
    return;
  }
  if (n.owner == Kind::kAdversary) {
    ctx.b.node(neu).owner = Kind::kAdversary;
    ctx.b.node(neu).member = -1;
    ctx.b.set_decision(neu, n.priv, ctx.g.obs(n.obs), "u" + std::to_string(neu));
    for (std::size_t c = 0; c < n.children.size(); ++c) {
      const std::int32_t child = ctx.b.add_child(neu, ctx.g.label(n.actions[c]), Kind::kChance);
      rec(ctx, n.children[c], child, team_acted);
    }
    return;
  }
  // Team member decision: insert a temporary chance node whose branches carry
  // the member's possible private cards; the branch matching the actually
  // dealt card has probability 1, the rest 0.
  ctx.b.node(neu).owner = Kind::kTempChance;
  ctx.b.node(neu).member = -1;
  for (int rank : ctx.g.ranks()) {
    if (ctx.prune && team_acted && rank != n.priv) continue;
    const double prob = rank == n.priv ? 1.0 : 0.0;
    const std::int32_t coord =
        ctx.b.add_child(neu, card_label(rank), Kind::kCoordinator, n.member, prob);
    ctx.b.node(coord).virtual_card = static_cast<std::int16_t>(rank);
    ctx.b.set_decision(coord, n.priv, ctx.g.obs(n.obs), "u" + std::to_string(coord));
    for (std::size_t c = 0; c < n.children.size(); ++c) {
      const std::int32_t child =
          ctx.b.add_child(coord, ctx.g.label(n.actions[c]), Kind::kChance);
      rec(ctx, n.children[c], child, true);
    }
  }
}

}  // namespace detail

// Rewrites an original adversarial team game into a 2-player tree where a
// single coordinator acts for every team member, each coordinator decision
// preceded by a temporary chance node enumerating the member's possible
// private cards. The output carries per-node information sets only
// (refine::merge_infosets assigns the shared ones) and, with Prune::kNone, is
// un-pruned.
inline GameTree mpta(const GameTree& g, Prune prune = Prune::kNone) {
  if (g.num_team_members() < 2) {
    throw std::invalid_argument("mpta needs at least two team members");
  }
  bool has_adversary = false;
  for (std::int32_t i = 0; i < g.num_nodes(); ++i) {
    const Kind k = g.node(i).owner;
    if (k == Kind::kCoordinator || k == Kind::kTempChance) {
      throw std::invalid_argument("mpta input is already transformed");
    }
    if (k == Kind::kAdversary && !g.node(i).terminal()) has_adversary = true;
  }
  if (!has_adversary) throw std::invalid_argument("mpta needs an adversary");
  if (g.ranks().empty()) throw std::invalid_argument("mpta needs the deck's rank list");

  TreeBuilder b(g.payoff_den(), g.ranks(), g.num_team_members());
  b.add_root(Kind::kChance);
  detail::Ctx ctx{g, b, prune == Prune::kDuringBuild};
  detail::rec(ctx, g.root(), 0, false);
  return b.finish();
}

// Structural check of the private-information pre-branches: every coordinator
// node hangs under a temporary chance node, and every full (un-collapsed)
// pre-branch exposes exactly r x |A| (virtual card, action) pairs. Collapsed
// single-branch temp-chance nodes are exempt.
inline ValidationReport check_pipb(const GameTree& g) {
  ValidationReport rep;
  const int r = static_cast<int>(g.ranks().size());
  for (std::int32_t i = 0; i < g.num_nodes(); ++i) {
    const Node& n = g.node(i);
    if (n.owner == Kind::kCoordinator && !n.terminal()) {
      if (n.parent < 0 || g.node(n.parent).owner != Kind::kTempChance) {
        rep.issues.push_back("node " + std::to_string(i) +
                             ": coordinator's parent is not a temporary chance node");
      }
    }
    if (n.owner == Kind::kTempChance && !n.terminal()) {
      int pairs = 0;
      std::size_t arity = 0;
      bool uniform_arity = true;
      for (std::size_t c = 0; c < n.children.size(); ++c) {
        const Node& ch = g.node(n.children[c]);
        if (ch.owner != Kind::kCoordinator) {
          rep.issues.push_back("node " + std::to_string(i) +
                               ": temp-chance child is not a coordinator node");
          continue;
        }
        if (c == 0) arity = ch.children.size();
        if (ch.children.size() != arity) uniform_arity = false;
        pairs += static_cast<int>(ch.children.size());
      }
      if (n.children.size() <= 1) continue;  // collapsed by pruning
      if (!uniform_arity) {
        rep.issues.push_back("node " + std::to_string(i) +
                             ": virtual branches disagree on the action set");
      } else if (pairs != r * static_cast<int>(arity)) {
        rep.issues.push_back("node " + std::to_string(i) + ": pre-branch exposes " +
                             std::to_string(pairs) + " pairs, expected " +
                             std::to_string(r * static_cast<int>(arity)));
      }
    }
  }
  return rep;
}

}  // namespace mpta::transform
