#pragma once

// Independent game-solving oracles for the solver tests: a bottom-up
// depth-bounded AND-OR evaluation (value iteration, one round per depth), an
// exhaustive check that no Eve policy defeats a synthesized strategy, and a
// spoiling-policy construction for Eve-won games.

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "tgs/arena.hpp"
#include "tgs/solver.hpp"

namespace tgs::test {

// Charlie-wins set computed by iterating "wins within i steps" to the
// fixpoint (i bounded by |Q^a|); independent of the solver's worklist.
inline std::vector<bool> minimax_wins(const Arena& ar) {
  const std::size_t n = ar.size();
  std::vector<bool> win(n, false);
  for (Arena::NodeId i = 0; i < n; ++i) win[i] = ar.accepting(i);
  for (std::size_t round = 0; round < n; ++round) {
    bool changed = false;
    for (Arena::NodeId i = 0; i < n; ++i) {
      if (win[i]) continue;
      const auto& es = ar.edges(i);
      bool w;
      if (ar.owner(i) == Player::Charlie) {
        w = false;
        for (const auto& [m, t] : es) w = w || win[t];
      } else {
        w = !es.empty();
        for (const auto& [m, t] : es) w = w && win[t];
      }
      if (w) {
        win[i] = true;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return win;
}

// Every Eve choice against the strategy reaches F^a (memoized over states;
// sound because the strategy is positional).
inline bool strategy_unbeatable(const Arena& ar, const Strategy& st) {
  std::set<Arena::NodeId> proven;
  std::vector<Arena::NodeId> stack{ar.initial()};
  std::set<Arena::NodeId> onpath;
  struct Frame {
    Arena::NodeId n;
    std::size_t next_edge;
  };
  std::vector<Frame> frames{{ar.initial(), 0}};
  while (!frames.empty()) {
    Frame& f = frames.back();
    Arena::NodeId n = f.n;
    if (ar.accepting(n) || proven.count(n)) {
      proven.insert(n);
      frames.pop_back();
      continue;
    }
    if (ar.owner(n) == Player::Charlie) {
      auto it = st.moves.find(n);
      if (it == st.moves.end()) return false;  // stuck inside the winning region
      if (f.next_edge == 0) {
        bool found = false;
        for (const auto& [m, t] : ar.edges(n))
          if (move_encoding(m) == move_encoding(it->second)) {
            if (!st.attr.in_wc(t) || st.attr.level[t] >= st.attr.level[n]) return false;
            frames.push_back({t, 0});
            found = true;
            break;
          }
        if (!found) return false;
        f.next_edge = 1;
      } else {
        proven.insert(n);
        frames.pop_back();
      }
    } else {
      const auto& es = ar.edges(n);
      if (f.next_edge < es.size()) {
        Arena::NodeId t = es[f.next_edge].second;
        ++f.next_edge;
        if (!st.attr.in_wc(t) || st.attr.level[t] >= st.attr.level[n]) return false;
        if (!proven.count(t) && !ar.accepting(t)) frames.push_back({t, 0});
      } else {
        proven.insert(n);
        frames.pop_back();
      }
    }
  }
  return true;
}

// A positional spoiling policy for Eve when q0 is outside the winning region:
// at Eve nodes outside W_C pick any successor outside W_C. Returns false if
// construction or verification fails (i.e. Charlie can reach F^a anyway).
inline bool spoiling_policy_works(const Arena& ar, const std::vector<std::uint32_t>& level) {
  auto in_wc = [&](Arena::NodeId n) { return level[n] != kNoLevel; };
  if (in_wc(ar.initial())) return false;
  std::map<Arena::NodeId, Arena::NodeId> policy;
  for (Arena::NodeId i = 0; i < ar.size(); ++i) {
    if (ar.owner(i) != Player::Eve || in_wc(i)) continue;
    std::optional<Arena::NodeId> pick;
    for (const auto& [m, t] : ar.edges(i))
      if (!in_wc(t)) {
        pick = t;
        break;
      }
    if (!pick) return false;  // contradiction with the attractor
    policy[i] = *pick;
  }
  // under the policy, explore all Charlie choices: F^a must stay unreachable
  std::set<Arena::NodeId> seen{ar.initial()};
  std::deque<Arena::NodeId> q{ar.initial()};
  while (!q.empty()) {
    Arena::NodeId n = q.front();
    q.pop_front();
    if (ar.accepting(n)) return false;
    if (ar.owner(n) == Player::Eve) {
      auto it = policy.find(n);
      if (it == policy.end()) return false;  // reached an Eve node inside W_C
      if (seen.insert(it->second).second) q.push_back(it->second);
    } else {
      for (const auto& [m, t] : ar.edges(n))
        if (seen.insert(t).second) q.push_back(t);
    }
  }
  return true;
}

}  // namespace tgs::test
