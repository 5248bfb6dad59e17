#pragma once

#include <string>
#include <vector>

#include "mpta/efg.hpp"

namespace mpta::refine {

using efg::GameTree;
using efg::Kind;
using efg::Node;
using efg::TreeBuilder;

// Per-path record of which team members' private cards count as resolved:
// a member is resolved once it has taken any action on the path. Flags are
// monotone from root to leaf.
struct InformationPool {
  std::vector<bool> resolved;

  explicit InformationPool(int num_members) : resolved(num_members, false) {}
  bool any() const {
    for (bool f : resolved) {
      if (f) return true;
    }
    return false;
  }
  void mark(int member) {
    if (member >= 0 && member < static_cast<int>(resolved.size())) resolved[member] = true;
  }
};

// Canonical information-set key. Team members and the adversary see their own
// dealt card plus the public action history; the coordinator sees the acting
// member, that member's virtual card from the pre-branch, and the public
// history. Two decision nodes share an infoset iff their keys are equal.
inline std::string info_key(const GameTree& g, const Node& n) {
  const std::string card(1, static_cast<char>('0' + (n.owner == Kind::kCoordinator
                                                         ? n.virtual_card
                                                         : n.priv)));
  switch (n.owner) {
    case Kind::kTeamMember:
      return "t" + std::to_string(n.member) + "|" + card + "|" + g.obs(n.obs);
    case Kind::kCoordinator:
      return "c" + std::to_string(n.member) + "|" + card + "|" + g.obs(n.obs);
    case Kind::kAdversary:
      return "a|" + card + "|" + g.obs(n.obs);
    default:
      throw std::logic_error("info_key on a chance node");
  }
}

namespace detail {

inline std::int32_t copy_node(const GameTree& g, TreeBuilder& b, std::int32_t orig,
                              std::int32_t neu, bool merge_keys) {
  const Node& n = g.node(orig);
  b.node(neu).owner = n.owner;
  b.node(neu).member = n.member;
  b.node(neu).virtual_card = n.virtual_card;
  if (n.terminal()) {
    b.set_payoff(neu, n.pay_team, n.pay_adv);
  } else if (efg::is_decision_kind(n.owner)) {
    const std::string key = merge_keys ? info_key(g, n) : g.infoset(n.infoset).key;
    b.set_decision(neu, n.priv, g.obs(n.obs), key);
    b.node(neu).virtual_card = n.virtual_card;
  }
  return neu;
}

inline void merge_rec(const GameTree& g, TreeBuilder& b, std::int32_t orig, std::int32_t neu) {
  const Node& n = g.node(orig);
  copy_node(g, b, orig, neu, /*merge_keys=*/true);
  for (std::size_t c = 0; c < n.children.size(); ++c) {
    const double prob = efg::is_chance_kind(n.owner) ? n.chance_probs[c] : -1.0;
    const std::int32_t child =
        b.add_child(neu, g.label(n.actions[c]), Kind::kChance, -1, prob);
    merge_rec(g, b, n.children[c], child);
  }
}

inline void prune_rec(const GameTree& g, TreeBuilder& b, std::int32_t orig, std::int32_t neu,
                      InformationPool pool) {
  const Node& n = g.node(orig);
  copy_node(g, b, orig, neu, /*merge_keys=*/false);
  if (n.owner == Kind::kCoordinator || n.owner == Kind::kTeamMember) {
    pool.mark(n.member);
  }
  if (n.owner == Kind::kTempChance && pool.any()) {
    // A team member already acted on this path: keep only the branch whose
    // virtual card matches the card actually dealt to the member about to
    // act. The collapsed single-branch node stays in the tree.
    for (std::size_t c = 0; c < n.children.size(); ++c) {
      const Node& ch = g.node(n.children[c]);
      if (ch.owner != Kind::kCoordinator || ch.priv < 0) {
        throw std::invalid_argument("prune: pre-branch without a deal annotation");
      }
      if (ch.virtual_card != ch.priv) continue;
      const std::int32_t child = b.add_child(neu, g.label(n.actions[c]), Kind::kChance, -1, 1.0);
      prune_rec(g, b, n.children[c], child, pool);
    }
    if (b.node(neu).children.empty()) {
      throw std::invalid_argument("prune: no virtual branch matches the dealt card");
    }
    return;
  }
  for (std::size_t c = 0; c < n.children.size(); ++c) {
    const double prob = efg::is_chance_kind(n.owner) ? n.chance_probs[c] : -1.0;
    const std::int32_t child =
        b.add_child(neu, g.label(n.actions[c]), Kind::kChance, -1, prob);
    prune_rec(g, b, n.children[c], child, pool);
  }
}

}  // namespace detail

// Reassigns information sets so that equal keys share one dense id. Original
// trees built by the generators already use these keys, so on them this is an
// identity re-partition.
inline GameTree merge_infosets(const GameTree& g) {
  TreeBuilder b(g.payoff_den(), g.ranks(), g.num_team_members());
  b.add_root(g.node(g.root()).owner, g.node(g.root()).member);
  detail::merge_rec(g, b, g.root(), 0);
  return b.finish();
}

// Collapses temporary-chance branches along every path on which some team
// member has already acted; the path's first pre-branch keeps all its virtual
// branches. Requires coordinator nodes annotated with the actually dealt card.
inline GameTree prune(const GameTree& g) {
  TreeBuilder b(g.payoff_den(), g.ranks(), g.num_team_members());
  b.add_root(g.node(g.root()).owner, g.node(g.root()).member);
  detail::prune_rec(g, b, g.root(), 0, InformationPool(g.num_team_members()));
  return b.finish();
}

}  // namespace mpta::refine
