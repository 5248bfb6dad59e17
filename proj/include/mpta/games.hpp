#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "mpta/efg.hpp"
#include "mpta/instance.hpp"

namespace mpta::games {

using efg::GameTree;
using efg::Kind;
using efg::TreeBuilder;

namespace detail {

// Betting-round grammar shared by Kuhn and both Leduc streets: in seat order
// each of the k players passes or bets; after the first bet the remaining k-1
// players respond (pass = fold, bet = call) in wrapping order.
//
// Returns the index (0..k-1) of the player to act, or -1 if the round is over.
inline int round_actor(const std::string& hist, int k) {
  const auto fb = hist.find('b');
  if (fb == std::string::npos) {
    return static_cast<int>(hist.size()) < k ? static_cast<int>(hist.size()) : -1;
  }
  const int responses = static_cast<int>(hist.size() - fb) - 1;
  if (responses >= k - 1) return -1;
  return (static_cast<int>(fb) + 1 + responses) % k;
}

struct RoundOutcome {
  int bettor = -1;           // index into the round order, -1 if nobody bet
  std::vector<int> callers;  // indexes into the round order
};

inline RoundOutcome round_outcome(const std::string& hist, int k) {
  RoundOutcome out;
  const auto fb = hist.find('b');
  if (fb == std::string::npos) return out;
  out.bettor = static_cast<int>(fb);
  for (int j = 0; j < k - 1; ++j) {
    if (hist[fb + 1 + j] == 'b') out.callers.push_back((out.bettor + 1 + j) % k);
  }
  return out;
}

inline std::string card_label(int rank) { return std::string(1, static_cast<char>('0' + rank)); }

inline std::string seat_prefix(const InstanceSpec& spec, int seat) {
  return seat < spec.team_size ? "t" + std::to_string(seat) : "a";
}

}  // namespace detail

namespace kuhn_detail {

inline void build(TreeBuilder& b, const InstanceSpec& spec, const std::vector<int>& deal,
                  const std::string& hist, std::int32_t node) {
  const int P = spec.num_players();
  const int actor = detail::round_actor(hist, P);
  if (actor < 0) {
    // Terminal: settle the pot.
    std::vector<std::int64_t> net(P, -1);  // antes
    const auto out = detail::round_outcome(hist, P);
    if (out.bettor < 0) {
      int winner = 0;
      for (int s = 1; s < P; ++s) {
        if (deal[s] > deal[winner]) winner = s;
      }
      net[winner] += P;
    } else {
      std::vector<std::int64_t> contrib(P, 1);
      contrib[out.bettor] = 2;
      for (int s : out.callers) contrib[s] = 2;
      std::int64_t pot = 0;
      for (int s = 0; s < P; ++s) pot += contrib[s];
      int winner = out.bettor;
      for (int s : out.callers) {
        if (deal[s] > deal[winner]) winner = s;
      }
      for (int s = 0; s < P; ++s) net[s] = -contrib[s];
      net[winner] += pot;
    }
    std::int64_t team = 0;
    for (int s = 0; s < spec.team_size; ++s) team += net[s];
    b.set_payoff(node, team, net[P - 1]);
    return;
  }

  const Kind kind = actor < spec.team_size ? Kind::kTeamMember : Kind::kAdversary;
  const int member = actor < spec.team_size ? actor : -1;
  b.node(node).owner = kind;
  b.node(node).member = static_cast<std::int16_t>(member);
  b.set_decision(node, deal[actor], hist,
                 detail::seat_prefix(spec, actor) + "|" + detail::card_label(deal[actor]) + "|" +
                     hist);
  for (char a : {'p', 'b'}) {
    const std::int32_t child = b.add_child(node, std::string(1, a), Kind::kChance);
    build(b, spec, deal, hist + a, child);
  }
}

}  // namespace kuhn_detail

// Multi-player Kuhn poker: every player antes 1 and receives one of r distinct
// ranks; a single betting round with bet size 1; highest rank among the
// non-folded players takes the pot. Team utility is the sum of the members'
// net chips.
inline GameTree generate_kuhn(const InstanceSpec& spec) {
  if (spec.family != InstanceSpec::Family::kKuhn) {
    throw std::invalid_argument("generate_kuhn needs a Kuhn spec");
  }
  if (spec.max_bets_per_round != 1) {
    throw std::invalid_argument("only one bet per round is supported");
  }
  const int P = spec.num_players();
  std::vector<int> ranks(spec.ranks);
  std::iota(ranks.begin(), ranks.end(), 0);
  TreeBuilder b(1, ranks, spec.team_size);
  const std::int32_t root = b.add_root(Kind::kChance);

  std::vector<std::vector<int>> deals;
  std::vector<int> deal;
  std::vector<bool> used(spec.ranks, false);
  auto enumerate = [&](auto&& self) -> void {
    if (static_cast<int>(deal.size()) == P) {
      deals.push_back(deal);
      return;
    }
    for (int r = 0; r < spec.ranks; ++r) {
      if (used[r]) continue;
      used[r] = true;
      deal.push_back(r);
      self(self);
      deal.pop_back();
      used[r] = false;
    }
  };
  enumerate(enumerate);

  const double p = 1.0 / static_cast<double>(deals.size());
  for (const auto& d : deals) {
    std::string label;
    for (int card : d) label += detail::card_label(card);
    const std::int32_t child = b.add_child(root, label, Kind::kChance, -1, p);
    kuhn_detail::build(b, spec, d, "", child);
  }
  return b.finish();
}

namespace leduc_detail {

struct State {
  int round = 1;
  std::vector<int> active;  // seats still in, ascending
  std::string hist;         // current round
  std::string hist1;        // completed round-1 history (round 2 only)
  std::vector<std::int64_t> contrib;
};

inline std::string obs_of(const InstanceSpec&, const State& st, int board) {
  if (st.round == 1) return st.hist;
  return st.hist1 + "|" + detail::card_label(board) + "|" + st.hist;
}

inline void settle(TreeBuilder& b, const InstanceSpec& spec, const std::vector<int>& deal,
                   int board, const State& st, const std::vector<int>& showdown,
                   std::int32_t node, std::int64_t den) {
  const int P = spec.num_players();
  std::int64_t pot = 0;
  for (int s = 0; s < P; ++s) pot += st.contrib[s];
  std::vector<std::int64_t> net(P);
  for (int s = 0; s < P; ++s) net[s] = -st.contrib[s] * den;

  auto strength = [&](int seat) { return deal[seat] == board ? 100 + deal[seat] : deal[seat]; };
  int best = strength(showdown.front());
  for (int s : showdown) best = std::max(best, strength(s));
  std::vector<int> winners;
  for (int s : showdown) {
    if (strength(s) == best) winners.push_back(s);
  }
  const std::int64_t share = pot * den / static_cast<std::int64_t>(winners.size());
  for (int s : winners) net[s] += share;

  std::int64_t team = 0;
  for (int s = 0; s < spec.team_size; ++s) team += net[s];
  b.set_payoff(node, team, net[P - 1]);
}

inline void build(TreeBuilder& b, const InstanceSpec& spec, const std::vector<int>& deal,
                  int board, State st, std::int32_t node, std::int64_t den) {
  const int k = static_cast<int>(st.active.size());
  const int actor_idx = detail::round_actor(st.hist, k);
  if (actor_idx < 0) {
    const auto out = detail::round_outcome(st.hist, k);
    std::vector<int> stayers;
    if (out.bettor < 0) {
      stayers = st.active;
    } else {
      const std::int64_t bet = st.round == 1 ? 2 : 4;
      st.contrib[st.active[out.bettor]] += bet;
      stayers.push_back(st.active[out.bettor]);
      for (int c : out.callers) {
        st.contrib[st.active[c]] += bet;
        stayers.push_back(st.active[c]);
      }
      std::sort(stayers.begin(), stayers.end());
      if (stayers.size() == 1) {
        settle(b, spec, deal, board, st, stayers, node, den);
        return;
      }
    }
    if (st.round == 2) {
      settle(b, spec, deal, board, st, stayers, node, den);
      return;
    }
    State next = st;
    next.round = 2;
    next.active = stayers;
    next.hist1 = st.hist;
    next.hist.clear();
    build(b, spec, deal, board, std::move(next), node, den);
    return;
  }

  const int seat = st.active[actor_idx];
  const Kind kind = seat < spec.team_size ? Kind::kTeamMember : Kind::kAdversary;
  const int member = seat < spec.team_size ? seat : -1;
  b.node(node).owner = kind;
  b.node(node).member = static_cast<std::int16_t>(member);
  const std::string obs = obs_of(spec, st, board);
  b.set_decision(node, deal[seat], obs,
                 detail::seat_prefix(spec, seat) + "|" + detail::card_label(deal[seat]) + "|" +
                     obs);
  for (char a : {'p', 'b'}) {
    const std::int32_t child = b.add_child(node, std::string(1, a), Kind::kChance);
    State next = st;
    next.hist += a;
    build(b, spec, deal, board, std::move(next), child, den);
  }
}

}  // namespace leduc_detail

// Multi-player Leduc poker over a deck of r ranks x c indistinguishable
// suits: ante 1, one private card each, a betting round with bet size 2, one
// public board card, a second betting round with bet size 4; a pair with the
// board beats a high card at showdown, ties split the pot. The board is drawn
// at the root chance node together with the private cards (it stays hidden
// from the information sets until the second round), so each root branch is a
// distinct ordered rank deal with every rank used at most c times.
inline GameTree generate_leduc(const InstanceSpec& spec) {
  if (spec.family != InstanceSpec::Family::kLeduc) {
    throw std::invalid_argument("generate_leduc needs a Leduc spec");
  }
  if (spec.max_bets_per_round != 1) {
    throw std::invalid_argument("only one bet per round is supported");
  }
  const int P = spec.num_players();
  std::int64_t den = 1;
  for (int k = 2; k <= P; ++k) den = std::lcm(den, static_cast<std::int64_t>(k));

  std::vector<int> ranks(spec.ranks);
  std::iota(ranks.begin(), ranks.end(), 0);
  TreeBuilder b(den, ranks, spec.team_size);
  const std::int32_t root = b.add_root(Kind::kChance);

  std::vector<std::vector<int>> deals;
  std::vector<int> deal;
  std::vector<int> used(spec.ranks, 0);
  auto enumerate = [&](auto&& self) -> void {
    if (static_cast<int>(deal.size()) == P + 1) {
      deals.push_back(deal);
      return;
    }
    for (int r = 0; r < spec.ranks; ++r) {
      if (used[r] == spec.suits) continue;
      ++used[r];
      deal.push_back(r);
      self(self);
      deal.pop_back();
      --used[r];
    }
  };
  enumerate(enumerate);

  const double p = 1.0 / static_cast<double>(deals.size());
  for (const auto& d : deals) {
    std::string label;
    for (int card : d) label += detail::card_label(card);
    const std::int32_t child = b.add_child(root, label, Kind::kChance, -1, p);
    leduc_detail::State st;
    st.active.resize(P);
    std::iota(st.active.begin(), st.active.end(), 0);
    st.contrib.assign(P, 1);  // antes
    leduc_detail::build(b, spec, d, d[P], std::move(st), child, den);
  }
  return b.finish();
}

inline GameTree generate(const InstanceSpec& spec) {
  return spec.family == InstanceSpec::Family::kKuhn ? generate_kuhn(spec) : generate_leduc(spec);
}

inline GameTree generate(const std::string& name) { return generate(parse_instance(name)); }

}  // namespace mpta::games
