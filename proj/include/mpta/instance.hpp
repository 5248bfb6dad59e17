#pragma once

#include <stdexcept>
#include <string>

namespace mpta::games {

// Scenario descriptor parsed from names like "21K3" (Kuhn) or "21L33" (Leduc):
// <team members><adversaries><family><ranks>[<suits>].
struct InstanceSpec {
  enum class Family { kKuhn, kLeduc };

  int team_size = 0;       // m
  int adversary_count = 1; // n, always 1
  Family family = Family::kKuhn;
  int ranks = 0;           // r
  int suits = 0;           // c, Leduc only
  int max_bets_per_round = 1;
  std::string name;

  int num_players() const { return team_size + adversary_count; }
};

inline InstanceSpec parse_instance(const std::string& name) {
  auto fail = [&name](const std::string& why) {
    throw std::invalid_argument("bad instance name '" + name + "': " + why);
  };
  if (name.size() < 4 || name.size() > 5) fail("expected <m><n>K<r> or <m><n>L<r><c>");
  for (std::size_t i = 0; i < name.size(); ++i) {
    if (i == 2) continue;
    if (name[i] < '0' || name[i] > '9') fail("non-digit field");
  }
  InstanceSpec spec;
  spec.name = name;
  spec.team_size = name[0] - '0';
  spec.adversary_count = name[1] - '0';
  spec.ranks = name[3] - '0';
  if (name[2] == 'K') {
    spec.family = InstanceSpec::Family::kKuhn;
    if (name.size() != 4) fail("Kuhn takes no suit count");
  } else if (name[2] == 'L') {
    spec.family = InstanceSpec::Family::kLeduc;
    if (name.size() != 5) fail("Leduc needs a suit count");
    spec.suits = name[4] - '0';
  } else {
    fail("family must be K or L");
  }
  if (spec.team_size < 1) fail("need at least one team member");
  if (spec.adversary_count != 1) fail("exactly one adversary is supported");
  if (spec.family == InstanceSpec::Family::kKuhn && spec.ranks < spec.num_players()) {
    fail("not enough cards: Kuhn needs ranks >= players");
  }
  if (spec.family == InstanceSpec::Family::kLeduc) {
    if (spec.suits < 1) fail("need at least one suit");
    if (spec.ranks * spec.suits < spec.num_players() + 1) {
      fail("not enough cards: Leduc needs ranks*suits >= players+1");
    }
  }
  return spec;
}

}  // namespace mpta::games
