#include "tgs/solver.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <iostream>
#include <sstream>

#include "tgs/parser.hpp"

namespace tgs {

AttractorResult attractor(const Arena& arena) {
  const std::size_t n = arena.size();
  AttractorResult res;
  res.level.assign(n, kNoLevel);
  std::vector<std::uint32_t> remaining(n, 0);
  std::vector<std::vector<Arena::NodeId>> rev(n);
  for (Arena::NodeId i = 0; i < n; ++i) {
    remaining[i] = static_cast<std::uint32_t>(arena.edges(i).size());
    for (const auto& [m, t] : arena.edges(i)) rev[t].push_back(i);
  }
  std::vector<Arena::NodeId> wave;
  for (Arena::NodeId i = 0; i < n; ++i)
    if (arena.accepting(i)) {
      res.level[i] = 0;
      wave.push_back(i);
    }
  std::uint32_t k = 0;
  while (!wave.empty()) {
    std::vector<Arena::NodeId> next;
    for (Arena::NodeId t : wave) {
      for (Arena::NodeId p : rev[t]) {
        if (res.level[p] != kNoLevel) continue;
        if (arena.owner(p) == Player::Charlie) {
          res.level[p] = k + 1;
          next.push_back(p);
        } else {
          // Eve node joins when all successors are attracted.
          if (--remaining[p] == 0) {
            res.level[p] = k + 1;
            next.push_back(p);
          }
        }
      }
    }
    if (!next.empty()) ++k;
    wave = std::move(next);
  }
  res.stationary_index = k;
  return res;
}

AttractorResult attractor_naive(const Arena& arena) {
  const std::size_t n = arena.size();
  AttractorResult res;
  res.level.assign(n, kNoLevel);
  for (Arena::NodeId i = 0; i < n; ++i)
    if (arena.accepting(i)) res.level[i] = 0;
  std::uint32_t k = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (Arena::NodeId i = 0; i < n; ++i) {
      if (res.level[i] != kNoLevel) continue;
      const auto& es = arena.edges(i);
      bool join = false;
      if (arena.owner(i) == Player::Charlie) {
        for (const auto& [m, t] : es)
          if (res.level[t] != kNoLevel && res.level[t] <= k) join = true;
      } else {
        join = !es.empty();
        for (const auto& [m, t] : es)
          if (res.level[t] == kNoLevel || res.level[t] > k) join = false;
      }
      if (join) {
        res.level[i] = k + 1;
        changed = true;
      }
    }
    if (changed) ++k;
  }
  res.stationary_index = k;
  return res;
}

std::optional<Strategy> positional_strategy(const Arena& arena, const AttractorResult& attr) {
  if (!attr.in_wc(arena.initial())) return std::nullopt;
  Strategy st;
  st.attr = attr;
  for (Arena::NodeId i = 0; i < arena.size(); ++i) {
    if (!attr.in_wc(i) || arena.owner(i) != Player::Charlie || arena.accepting(i)) continue;
    const Move* best = nullptr;
    std::uint32_t best_level = kNoLevel;
    std::string best_enc;
    for (const auto& [m, t] : arena.edges(i)) {
      if (!attr.in_wc(t)) continue;
      std::string enc = move_encoding(m);
      if (attr.level[t] < best_level || (attr.level[t] == best_level && enc < best_enc)) {
        best = &m;
        best_level = attr.level[t];
        best_enc = enc;
      }
    }
    assert(best && best_level < attr.level[i]);
    st.moves.emplace(i, *best);
  }
  return st;
}

std::uint64_t game_hash(const Game& g) {
  std::string s = pretty_print(g);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

SynthesisResult synthesize(const Game& g, Arena::Limits limits) {
  SynthesisResult res;
  Game d = desugar_goals(g);
  res.automaton = std::make_shared<GameAutomaton>(d);
  auto err = Arena::build(res.automaton, limits, res.arena);
  if (err) {
    res.verdict = SynthesisVerdict::BudgetExceeded;
    res.message = err->message;
    return res;
  }
  AttractorResult attr = attractor(*res.arena);
  auto st = positional_strategy(*res.arena, attr);
  if (!st) {
    res.verdict = SynthesisVerdict::EveWins;
    res.message = "a winning strategy for Charlie does not exist";
    return res;
  }
  st->game_hash = game_hash(d);
  st->d = res.automaton->d();
  st->window_s = res.automaton->window_s();
  st->window_d = res.automaton->window_d();
  res.verdict = SynthesisVerdict::CharlieWins;
  res.strategy = std::move(st);
  return res;
}

namespace {

// Rebuilds the outcome plan from completed chains: each base-to-base segment
// appends one event.
struct OutcomeTracker {
  EventSequence seq;
  std::vector<Action> pending;
  std::uint32_t pending_delta = 1;

  void feed(const Move& m) {
    if (m.kind == MoveKind::Wait) return;  // delta fixed by Eve's timed play
    if (m.kind == MoveKind::PlayTimed) pending_delta = m.delta;
    pending.insert(pending.end(), m.actions.begin(), m.actions.end());
  }
  void complete_event() {
    Event e;
    e.actions = pending;
    e.delay = seq.events.empty() ? 0 : pending_delta;
    e.sort_actions();
    seq.events.push_back(e);
    pending.clear();
    pending_delta = 1;
  }
};

std::string render_partial_plan(const Game& g, const EventSequence& seq,
                                const std::vector<Action>& pending) {
  std::ostringstream os;
  for (const auto& e : seq.events) os << event_to_string(g, e) << " ";
  if (!pending.empty()) {
    os << "| pending {";
    for (std::size_t i = 0; i < pending.size(); ++i)
      os << (i ? "," : "") << action_to_string(g, pending[i]);
    os << "}";
  }
  return os.str();
}

}  // namespace

SimResult simulate(const Arena& arena, const Strategy& strategy, const EvePolicy& policy,
                   std::size_t horizon, std::istream* in, std::ostream* out) {
  SimResult res;
  const Game& g = arena.automaton().game();
  Arena::NodeId cur = arena.initial();
  OutcomeTracker tracker;
  std::mt19937_64 rng(policy.seed);
  std::size_t script_pos = 0;

  auto finish = [&](SimVerdict v, std::string msg) {
    res.verdict = v;
    res.message = std::move(msg);
    res.outcome = tracker.seq;
    return res;
  };
  // Verdicts are read at complete-event positions only. An accepting state
  // whose acceptance rests solely on a definite domain violation is reported
  // as eve-inadmissible rather than success.
  auto terminal = [&]() -> std::optional<SimVerdict> {
    if (arena.node(cur).phase != ArenaPhase::Base) return std::nullopt;
    if (arena.automaton().acc_s(arena.node(cur).base)) return SimVerdict::Success;
    if (!arena.d_recoverable()[cur]) return SimVerdict::EveInadmissible;
    if (arena.accepting(cur)) return SimVerdict::Success;
    return std::nullopt;
  };

  for (std::size_t round = 0; round < horizon; ++round) {
    if (auto t = terminal()) {
      return finish(*t, *t == SimVerdict::Success
                            ? "accepting state reached"
                            : "domain rules definitely violated (no extension satisfies them)");
    }

    // Charlie's move from the strategy.
    assert(arena.owner(cur) == Player::Charlie);
    auto it = strategy.moves.find(cur);
    if (it == strategy.moves.end())
      return finish(SimVerdict::CharlieStuck, "no strategy move for the current state");
    SimRound r;
    r.charlie = it->second;
    tracker.feed(r.charlie);
    {
      const auto& es = arena.edges(cur);
      std::string enc = move_encoding(r.charlie);
      bool found = false;
      for (const auto& [m, t] : es)
        if (move_encoding(m) == enc) {
          cur = t;
          found = true;
          break;
        }
      if (!found) return finish(SimVerdict::CharlieStuck, "strategy move has no edge");
    }

    // Eve's move by policy.
    assert(arena.owner(cur) == Player::Eve);
    const auto& ev_edges = arena.edges(cur);
    assert(!ev_edges.empty());
    std::size_t pick = 0;
    switch (policy.kind) {
      case EvePolicy::Kind::Scripted: {
        if (script_pos >= policy.script.size())
          return finish(SimVerdict::AdmissibleButUnfinished,
                        "script exhausted after " + std::to_string(round) + " rounds");
        std::string enc = move_encoding(policy.script[script_pos]);
        bool found = false;
        for (std::size_t i = 0; i < ev_edges.size(); ++i)
          if (move_encoding(ev_edges[i].first) == enc) {
            pick = i;
            found = true;
            break;
          }
        if (!found)
          return finish(SimVerdict::ScriptedMoveInapplicable,
                        "scripted Eve move not applicable at round " + std::to_string(round));
        ++script_pos;
        break;
      }
      case EvePolicy::Kind::Random:
        pick = std::uniform_int_distribution<std::size_t>(0, ev_edges.size() - 1)(rng);
        break;
      case EvePolicy::Kind::Interactive: {
        if (!in || !out)
          return finish(SimVerdict::AdmissibleButUnfinished, "interactive mode needs streams");
        while (true) {
          (*out) << "legal Eve moves:\n";
          for (std::size_t i = 0; i < ev_edges.size(); ++i)
            (*out) << "  [" << i << "] " << move_to_string(g, ev_edges[i].first) << "\n";
          (*out) << "choice ('?' shows the partial plan)> " << std::flush;
          std::string line;
          if (!std::getline(*in, line))
            return finish(SimVerdict::AdmissibleButUnfinished, "input closed");
          if (line == "?") {
            (*out) << "partial plan: " << render_partial_plan(g, tracker.seq, tracker.pending)
                   << "\n";
            continue;
          }
          try {
            std::size_t v = std::stoul(line);
            if (v < ev_edges.size()) {
              pick = v;
              break;
            }
          } catch (...) {
          }
          (*out) << "invalid choice\n";
        }
        break;
      }
    }
    r.eve = ev_edges[pick].first;
    tracker.feed(r.eve);
    cur = ev_edges[pick].second;
    res.rounds.push_back(r);
    ++res.rounds_played;
    if (arena.node(cur).phase == ArenaPhase::Base) tracker.complete_event();
  }
  if (auto t = terminal())
    return finish(*t, *t == SimVerdict::Success
                          ? "accepting state reached"
                          : "domain rules definitely violated (no extension satisfies them)");
  return finish(SimVerdict::AdmissibleButUnfinished, "horizon reached without success");
}

}  // namespace tgs
