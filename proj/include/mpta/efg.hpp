#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mpta::efg {

enum class Kind : std::uint8_t {
  kChance,
  kTempChance,
  kTeamMember,
  kCoordinator,
  kAdversary,
};

inline bool is_chance_kind(Kind k) {
  return k == Kind::kChance || k == Kind::kTempChance;
}
inline bool is_decision_kind(Kind k) { return !is_chance_kind(k); }

// Strategic side of a decision owner: 0 = team (members or the coordinator),
// 1 = adversary, -1 = chance kinds.
inline int side_of(Kind k) {
  switch (k) {
    case Kind::kTeamMember:
    case Kind::kCoordinator:
      return 0;
    case Kind::kAdversary:
      return 1;
    default:
      return -1;
  }
}

inline std::string owner_name(Kind k, int member = -1) {
  switch (k) {
    case Kind::kChance:
      return "chance";
    case Kind::kTempChance:
      return "tempchance";
    case Kind::kTeamMember:
      return "team" + std::to_string(member);
    case Kind::kCoordinator:
      return "coordinator";
    case Kind::kAdversary:
      return "adversary";
  }
  return "?";
}

struct Node {
  Kind owner = Kind::kChance;
  std::int32_t parent = -1;
  std::int32_t incoming = -1;  // action index at the parent
  std::vector<std::int32_t> children;
  std::vector<std::uint32_t> actions;  // label ids, one per child
  std::vector<double> chance_probs;    // chance kinds only
  std::int32_t infoset = -1;           // decision nodes only
  std::int64_t pay_team = 0;           // terminals, units of 1/payoff_den
  std::int64_t pay_adv = 0;
  std::int16_t priv = -1;          // acting player's dealt rank (decision nodes)
  std::int16_t member = -1;        // acting team member (team/coordinator nodes)
  std::int16_t virtual_card = -1;  // coordinator nodes: rank given by the pre-branch
  std::uint32_t obs = 0;           // public-observation id (decision nodes)

  bool terminal() const { return children.empty(); }
};

struct InfoSet {
  std::int32_t id = -1;
  Kind owner = Kind::kChance;
  std::int16_t member = -1;
  std::vector<std::uint32_t> actions;
  std::vector<std::int32_t> members;  // node ids
  std::string key;
};

class TreeBuilder;

// Immutable extensive-form game tree. Construct through TreeBuilder; after
// finish() the tree is read-only and safe to share across threads.
class GameTree {
 public:
  const Node& node(std::int32_t id) const { return nodes_[id]; }
  std::int32_t num_nodes() const { return static_cast<std::int32_t>(nodes_.size()); }
  std::int32_t root() const { return 0; }

  const std::string& label(std::uint32_t id) const { return labels_[id]; }
  const std::string& obs(std::uint32_t id) const { return obs_pool_[id]; }

  const std::vector<InfoSet>& infosets() const { return infosets_; }
  const InfoSet& infoset(std::int32_t id) const { return infosets_[id]; }

  std::int64_t payoff_den() const { return payoff_den_; }
  const std::vector<int>& ranks() const { return ranks_; }
  int num_team_members() const { return num_team_members_; }

  double team_chips(std::int32_t terminal_id) const {
    return static_cast<double>(nodes_[terminal_id].pay_team) / static_cast<double>(payoff_den_);
  }
  double adversary_chips(std::int32_t terminal_id) const {
    return static_cast<double>(nodes_[terminal_id].pay_adv) / static_cast<double>(payoff_den_);
  }

  // Number of decision-node ancestors (= length of the public action history).
  int public_depth(std::int32_t id) const {
    int d = 0;
    for (std::int32_t p = nodes_[id].parent; p >= 0; p = nodes_[p].parent) {
      if (is_decision_kind(nodes_[p].owner)) ++d;
    }
    return d;
  }

  // Sequence of (owner, action) pairs from the root to `id`.
  std::vector<std::pair<std::string, std::string>> history(std::int32_t id) const {
    std::vector<std::pair<std::string, std::string>> out;
    for (std::int32_t n = id; nodes_[n].parent >= 0; n = nodes_[n].parent) {
      const Node& par = nodes_[nodes_[n].parent];
      out.emplace_back(owner_name(par.owner, par.member), labels_[par.actions[nodes_[n].incoming]]);
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  std::string history_str(std::int32_t id) const {
    const auto h = history(id);
    if (h.empty()) return "-";
    std::string out;
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (i) out += '/';
      out += h[i].first;
      out += ':';
      out += h[i].second;
    }
    return out;
  }

 private:
  friend class TreeBuilder;
  std::vector<Node> nodes_;
  std::vector<std::string> labels_;
  std::vector<std::string> obs_pool_;
  std::vector<InfoSet> infosets_;
  std::int64_t payoff_den_ = 1;
  std::vector<int> ranks_;
  int num_team_members_ = 0;
};

class TreeBuilder {
 public:
  TreeBuilder(std::int64_t payoff_den, std::vector<int> ranks, int num_team_members)
      : payoff_den_(payoff_den), ranks_(std::move(ranks)), num_team_members_(num_team_members) {
    obs_id("");  // id 0 = empty observation
  }

  std::int32_t add_root(Kind kind, int member = -1) {
    if (!nodes_.empty()) throw std::logic_error("root already added");
    Node n;
    n.owner = kind;
    n.member = static_cast<std::int16_t>(member);
    nodes_.push_back(std::move(n));
    keys_.emplace_back();
    return 0;
  }

  // Adds a child reached from `parent` by `action`. For chance-kind parents a
  // probability must be supplied.
  std::int32_t add_child(std::int32_t parent, const std::string& action, Kind kind,
                         int member = -1, double prob = -1.0) {
    Node n;
    n.owner = kind;
    n.member = static_cast<std::int16_t>(member);
    n.parent = parent;
    n.incoming = static_cast<std::int32_t>(nodes_[parent].children.size());
    const std::int32_t id = static_cast<std::int32_t>(nodes_.size());
    nodes_[parent].children.push_back(id);
    nodes_[parent].actions.push_back(label_id(action));
    if (is_chance_kind(nodes_[parent].owner)) {
      if (prob < 0) throw std::logic_error("chance child needs a probability");
      nodes_[parent].chance_probs.push_back(prob);
    }
    nodes_.push_back(std::move(n));
    keys_.emplace_back();
    return id;
  }

  Node& node(std::int32_t id) { return nodes_[id]; }

  void set_decision(std::int32_t id, int priv, const std::string& obs,
                    const std::string& infoset_key) {
    nodes_[id].priv = static_cast<std::int16_t>(priv);
    nodes_[id].obs = obs_id(obs);
    keys_[id] = infoset_key;
  }

  void set_payoff(std::int32_t id, std::int64_t team, std::int64_t adv) {
    nodes_[id].pay_team = team;
    nodes_[id].pay_adv = adv;
  }

  std::uint32_t label_id(const std::string& s) { return intern(labels_, label_index_, s); }
  std::uint32_t obs_id(const std::string& s) { return intern(obs_, obs_index_, s); }
  const std::string& obs(std::uint32_t id) const { return obs_[id]; }

  // Freezes the tree. Decision nodes are grouped into information sets by
  // their key, in order of first appearance (ids are DFS-dense by
  // construction).
  GameTree finish() {
    GameTree g;
    g.payoff_den_ = payoff_den_;
    g.ranks_ = ranks_;
    g.num_team_members_ = num_team_members_;
    g.labels_ = labels_;
    g.obs_pool_ = obs_;
    std::unordered_map<std::string, std::int32_t> by_key;
    for (std::int32_t id = 0; id < static_cast<std::int32_t>(nodes_.size()); ++id) {
      Node& n = nodes_[id];
      if (n.terminal() || !is_decision_kind(n.owner)) continue;
      if (keys_[id].empty()) throw std::logic_error("decision node without an infoset key");
      auto [it, fresh] = by_key.emplace(keys_[id], static_cast<std::int32_t>(g.infosets_.size()));
      if (fresh) {
        InfoSet is;
        is.id = it->second;
        is.owner = n.owner;
        is.member = n.member;
        is.actions = n.actions;
        is.key = keys_[id];
        g.infosets_.push_back(std::move(is));
      }
      InfoSet& is = g.infosets_[it->second];
      if (is.actions != n.actions || is.owner != n.owner || is.member != n.member) {
        throw std::runtime_error("information set members disagree on owner or actions: " +
                                 keys_[id]);
      }
      is.members.push_back(id);
      n.infoset = it->second;
    }
    g.nodes_ = std::move(nodes_);
    return g;
  }

 private:
  static std::uint32_t intern(std::vector<std::string>& pool,
                              std::unordered_map<std::string, std::uint32_t>& index,
                              const std::string& s) {
    auto [it, fresh] = index.emplace(s, static_cast<std::uint32_t>(pool.size()));
    if (fresh) pool.push_back(s);
    return it->second;
  }

  std::vector<Node> nodes_;
  std::vector<std::string> keys_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::uint32_t> label_index_;
  std::vector<std::string> obs_;
  std::unordered_map<std::string, std::uint32_t> obs_index_;
  std::int64_t payoff_den_ = 1;
  std::vector<int> ranks_;
  int num_team_members_ = 0;
};

// Per-infoset action distributions. Infosets not present default to uniform.
struct BehavioralProfile {
  std::unordered_map<std::int32_t, std::vector<double>> dist;

  const std::vector<double>* at(std::int32_t infoset) const {
    auto it = dist.find(infoset);
    return it == dist.end() ? nullptr : &it->second;
  }
};

struct ValidationReport {
  std::vector<std::string> issues;
  bool coordinator_recall_skipped = false;
  bool ok() const { return issues.empty(); }
  std::string to_string() const {
    std::string out;
    for (const auto& s : issues) {
      out += s;
      out += '\n';
    }
    return out;
  }
};

struct CountSummary {
  std::int64_t total = 0;
  std::int64_t terminals = 0;
  std::int64_t chance = 0;
  std::int64_t temp_chance = 0;
  std::int64_t team = 0;  // team-member and coordinator decision nodes
  std::int64_t adversary = 0;
  std::int64_t infosets = 0;
};

inline CountSummary count_nodes(const GameTree& g) {
  CountSummary c;
  c.total = g.num_nodes();
  c.infosets = static_cast<std::int64_t>(g.infosets().size());
  for (std::int32_t i = 0; i < g.num_nodes(); ++i) {
    const Node& n = g.node(i);
    if (n.terminal()) {
      ++c.terminals;
      continue;
    }
    switch (n.owner) {
      case Kind::kChance:
        ++c.chance;
        break;
      case Kind::kTempChance:
        ++c.temp_chance;
        break;
      case Kind::kTeamMember:
      case Kind::kCoordinator:
        ++c.team;
        break;
      case Kind::kAdversary:
        ++c.adversary;
        break;
    }
  }
  return c;
}

namespace detail {
// Own-action subsequence of the infoset owner along the history of `id`.
inline std::vector<std::uint32_t> own_actions(const GameTree& g, std::int32_t id) {
  const Node& leaf = g.node(id);
  std::vector<std::uint32_t> seq;
  for (std::int32_t n = id; g.node(n).parent >= 0; n = g.node(n).parent) {
    const Node& par = g.node(g.node(n).parent);
    if (par.owner == leaf.owner && par.member == leaf.member) {
      seq.push_back(par.actions[g.node(n).incoming]);
    }
  }
  std::reverse(seq.begin(), seq.end());
  return seq;
}
}  // namespace detail

inline ValidationReport validate(const GameTree& g) {
  ValidationReport rep;
  auto issue = [&rep](const std::string& s) { rep.issues.push_back(s); };

  bool has_team_member = false, has_coordinator = false, has_temp_chance = false;
  for (std::int32_t i = 0; i < g.num_nodes(); ++i) {
    const Node& n = g.node(i);
    const std::string tag = "node " + std::to_string(i) + ": ";
    if (n.children.size() != n.actions.size()) issue(tag + "children/actions arity mismatch");
    if (is_chance_kind(n.owner) && !n.terminal()) {
      if (n.chance_probs.size() != n.children.size()) {
        issue(tag + "chance node without per-action probabilities");
      } else {
        double sum = 0;
        for (double p : n.chance_probs) {
          if (p < 0.0 || p > 1.0) issue(tag + "chance probability outside [0,1]");
          sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) issue(tag + "chance probabilities do not sum to 1");
      }
    }
    if (!is_chance_kind(n.owner) && !n.chance_probs.empty()) {
      issue(tag + "chance probabilities on a decision node");
    }
    if (n.terminal()) {
      if (n.pay_team != -n.pay_adv) {
        issue(tag + "zero-sum violation: team " + std::to_string(n.pay_team) + ", adversary " +
              std::to_string(n.pay_adv));
      }
    } else if (!n.terminal() && is_decision_kind(n.owner) && n.infoset < 0) {
      issue(tag + "decision node without an information set");
    }
    for (std::size_t c = 0; c < n.children.size(); ++c) {
      const Node& ch = g.node(n.children[c]);
      if (ch.parent != i || ch.incoming != static_cast<std::int32_t>(c)) {
        issue(tag + "child back-link broken");
      }
    }
    if (n.owner == Kind::kTeamMember) has_team_member = true;
    if (n.owner == Kind::kCoordinator) has_coordinator = true;
    if (n.owner == Kind::kTempChance) has_temp_chance = true;
  }
  if (has_team_member && (has_coordinator || has_temp_chance)) {
    issue("team-member nodes mixed with coordinator/temp-chance nodes");
  }

  for (const InfoSet& is : g.infosets()) {
    for (std::int32_t m : is.members) {
      const Node& n = g.node(m);
      if (n.owner != is.owner || n.member != is.member || n.actions != is.actions) {
        issue("infoset " + std::to_string(is.id) + ": member " + std::to_string(m) +
              " differs in owner or actions");
      }
    }
    // Perfect recall: identical own-action subsequences. Intentionally broken
    // for the coordinator, which forgets what it did for other members.
    if (is.owner == Kind::kCoordinator) {
      rep.coordinator_recall_skipped = true;
      continue;
    }
    if (is.members.size() > 1) {
      const auto ref = detail::own_actions(g, is.members.front());
      for (std::size_t k = 1; k < is.members.size(); ++k) {
        if (detail::own_actions(g, is.members[k]) != ref) {
          issue("infoset " + std::to_string(is.id) + ": perfect recall violated");
          break;
        }
      }
    }
  }
  return rep;
}

inline void check_profile(const GameTree& g, const BehavioralProfile& prof) {
  for (const auto& [is_id, d] : prof.dist) {
    if (is_id < 0 || is_id >= static_cast<std::int32_t>(g.infosets().size())) {
      throw std::invalid_argument("profile references unknown infoset " + std::to_string(is_id));
    }
    if (d.size() != g.infoset(is_id).actions.size()) {
      throw std::invalid_argument("profile arity mismatch at infoset " + std::to_string(is_id));
    }
    double sum = 0;
    for (double p : d) {
      if (p < 0) throw std::invalid_argument("negative probability in profile");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("profile distribution not normalized at infoset " +
                                  std::to_string(is_id));
    }
  }
}

namespace detail {
inline double expected_team(const GameTree& g, const BehavioralProfile& prof, std::int32_t id) {
  const Node& n = g.node(id);
  if (n.terminal()) return static_cast<double>(n.pay_team);
  double v = 0;
  if (is_chance_kind(n.owner)) {
    for (std::size_t c = 0; c < n.children.size(); ++c) {
      if (n.chance_probs[c] == 0.0) continue;
      v += n.chance_probs[c] * expected_team(g, prof, n.children[c]);
    }
    return v;
  }
  const std::vector<double>* d = prof.at(n.infoset);
  const double uniform = 1.0 / static_cast<double>(n.children.size());
  for (std::size_t c = 0; c < n.children.size(); ++c) {
    const double p = d ? (*d)[c] : uniform;
    if (p == 0.0) continue;
    v += p * expected_team(g, prof, n.children[c]);
  }
  return v;
}
}  // namespace detail

// Exact expectation by full tree walk; returns (team, adversary) in chips.
inline std::pair<double, double> expected_value(const GameTree& g,
                                                const BehavioralProfile& prof) {
  check_profile(g, prof);
  const double team = detail::expected_team(g, prof, g.root()) / static_cast<double>(g.payoff_den());
  return {team, -team};
}

inline std::string chips_to_string(std::int64_t num, std::int64_t den) {
  const std::int64_t d = std::gcd(num < 0 ? -num : num, den);
  const std::int64_t n2 = num / (d == 0 ? 1 : d);
  const std::int64_t d2 = den / (d == 0 ? 1 : d);
  if (d2 == 1) return std::to_string(n2);
  return std::to_string(n2) + "/" + std::to_string(d2);
}

// Line-oriented dump, one node per line in id (depth-first) order:
//   id<TAB>owner<TAB>infoset|-<TAB>history<TAB>actions|payoff
inline void dump(const GameTree& g, std::ostream& os) {
  for (std::int32_t i = 0; i < g.num_nodes(); ++i) {
    const Node& n = g.node(i);
    os << i << '\t' << owner_name(n.owner, n.member) << '\t';
    if (n.infoset >= 0) {
      os << n.infoset;
    } else {
      os << '-';
    }
    os << '\t' << g.history_str(i) << '\t';
    if (n.terminal()) {
      os << chips_to_string(n.pay_team, g.payoff_den()) << ','
         << chips_to_string(n.pay_adv, g.payoff_den());
    } else {
      for (std::size_t c = 0; c < n.actions.size(); ++c) {
        if (c) os << ',';
        os << g.label(n.actions[c]);
      }
    }
    os << '\n';
  }
}

}  // namespace mpta::efg
