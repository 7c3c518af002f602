#include "tgs/model.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace tgs {

std::optional<ValId> StateVariable::value_id(const std::string& v) const {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] == v) return static_cast<ValId>(i);
  return std::nullopt;
}

void Event::sort_actions() {
  std::sort(actions.begin(), actions.end());
  actions.erase(std::unique(actions.begin(), actions.end()), actions.end());
}

std::optional<VarId> Game::var_id(const std::string& name) const {
  for (std::size_t i = 0; i < variables.size(); ++i)
    if (variables[i].name == name) return static_cast<VarId>(i);
  return std::nullopt;
}

bool Game::has_triggerless() const {
  for (const auto& r : system_rules)
    if (r.triggerless) return true;
  for (const auto& r : domain_rules)
    if (r.triggerless) return true;
  return false;
}

std::vector<Action> Game::all_actions() const {
  std::vector<Action> out;
  for (std::size_t v = 0; v < variables.size(); ++v)
    for (std::size_t val = 0; val < variables[v].values.size(); ++val) {
      out.push_back({ActionKind::Start, static_cast<VarId>(v), static_cast<ValId>(val)});
      out.push_back({ActionKind::End, static_cast<VarId>(v), static_cast<ValId>(val)});
    }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct VarScan {
  enum class St { Unseen, Open, Closed } st = St::Unseen;
  ValId open_value = -1;
  bool open_left = false;
  bool mentioned = false;
};

const Action* find_action(const Event& e, VarId var, ActionKind k, int* count) {
  const Action* found = nullptr;
  int n = 0;
  for (const auto& a : e.actions)
    if (a.var == var && a.kind == k) {
      ++n;
      found = &a;
    }
  if (count) *count = n;
  return found;
}

}  // namespace

ValidityReport validate_event_sequence(const EventSequence& seq,
                                       const std::vector<StateVariable>& vars) {
  ValidityReport rep;
  const std::size_t n = seq.events.size();
  // Non-initial events carry delay >= 1; the first stores 0.
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && seq.events[i].delay < 1) {
      rep.ok = false;
      rep.event_index = i + 1;
      rep.message = "non-initial event with delay 0";
      return rep;
    }
  }
  for (std::size_t v = 0; v < vars.size(); ++v) {
    VarScan s;
    for (std::size_t i = 0; i < n; ++i) {
      const Event& e = seq.events[i];
      int nstart = 0, nend = 0;
      const Action* st = find_action(e, static_cast<VarId>(v), ActionKind::Start, &nstart);
      const Action* en = find_action(e, static_cast<VarId>(v), ActionKind::End, &nend);
      if (nstart > 1 || nend > 1) {
        rep = {false, 0, static_cast<VarId>(v), i + 1,
               "more than one start or end for variable " + vars[v].name};
        return rep;
      }
      if (en) {
        if (s.st == VarScan::St::Open) {
          if (s.open_value != en->value) {
            rep = {false, 2, static_cast<VarId>(v), i + 1,
                   "end value does not match the open token of " + vars[v].name};
            return rep;
          }
          s.st = VarScan::St::Closed;
        } else if (s.st == VarScan::St::Unseen && !s.mentioned) {
          s.open_left = true;  // token open on the left
          s.st = VarScan::St::Closed;
        } else {
          rep = {false, 2, static_cast<VarId>(v), i + 1,
                 "end without a matching open token of " + vars[v].name};
          return rep;
        }
        s.mentioned = true;
      }
      if (st) {
        if (s.st == VarScan::St::Open) {
          rep = {false, 1, static_cast<VarId>(v), i + 1,
                 "restart of " + vars[v].name + " while a token is open"};
          return rep;
        }
        if (i > 0 && !en) {
          rep = {false, 4, static_cast<VarId>(v), i + 1,
                 "start of " + vars[v].name + " at a non-initial event without an end"};
          return rep;
        }
        s.st = VarScan::St::Open;
        s.open_value = st->value;
        s.mentioned = true;
      }
      if (en && !st && i + 1 < n) {
        rep = {false, 3, static_cast<VarId>(v), i + 1,
               "end of " + vars[v].name + " at a non-final event without a start"};
        return rep;
      }
    }
  }
  return rep;
}

Openness openness(const EventSequence& seq, VarId var) {
  bool open_left = false;
  bool open_right = false;
  enum class St { Unseen, Open, Closed } st = St::Unseen;
  bool mentioned = false;
  for (const Event& e : seq.events) {
    const Action* en = find_action(e, var, ActionKind::End, nullptr);
    const Action* s = find_action(e, var, ActionKind::Start, nullptr);
    if (en) {
      if (st == St::Unseen && !mentioned) open_left = true;
      st = St::Closed;
      mentioned = true;
    }
    if (s) {
      st = St::Open;
      mentioned = true;
    }
  }
  open_right = (st == St::Open);
  if (open_left && open_right) return Openness::OpenBoth;
  if (open_left) return Openness::OpenLeft;
  if (open_right) return Openness::OpenRight;
  return Openness::Closed;
}

bool open_for_all(const EventSequence& seq, std::size_t var_count) {
  for (std::size_t v = 0; v < var_count; ++v) {
    Openness o = openness(seq, static_cast<VarId>(v));
    if (o != Openness::OpenRight && o != Openness::OpenBoth) return false;
  }
  return true;
}

bool closed_for_all(const EventSequence& seq, std::size_t var_count) {
  for (std::size_t v = 0; v < var_count; ++v)
    if (openness(seq, static_cast<VarId>(v)) != Openness::Closed) return false;
  return true;
}

std::uint64_t elapsed(const EventSequence& seq, std::size_t i, std::size_t j) {
  if (i < 1 || j < i || j > seq.events.size())
    throw std::out_of_range("elapsed: index out of range");
  std::uint64_t sum = 0;
  for (std::size_t k = i; k < j; ++k) sum += seq.events[k].delay;
  return sum;
}

std::uint64_t total_duration(const EventSequence& seq) {
  if (seq.events.empty()) return 0;
  return elapsed(seq, 1, seq.events.size());
}

std::vector<std::uint64_t> event_times(const EventSequence& seq) {
  std::vector<std::uint64_t> t(seq.events.size());
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < seq.events.size(); ++i) {
    if (i > 0) acc += seq.events[i].delay;
    t[i] = acc;
  }
  return t;
}

ActionPartition partition_actions(const Game& g) {
  ActionPartition p;
  for (std::size_t v = 0; v < g.variables.size(); ++v) {
    const auto& sv = g.variables[v];
    for (std::size_t val = 0; val < sv.values.size(); ++val) {
      Action start{ActionKind::Start, static_cast<VarId>(v), static_cast<ValId>(val)};
      Action end{ActionKind::End, static_cast<VarId>(v), static_cast<ValId>(val)};
      (g.controlled[v] ? p.charlie : p.eve).push_back(start);
      (sv.tags[val] == Controllability::Controllable ? p.charlie : p.eve).push_back(end);
    }
  }
  std::sort(p.charlie.begin(), p.charlie.end());
  std::sort(p.eve.begin(), p.eve.end());
  return p;
}

bool charlie_action(const Game& g, const Action& a) {
  if (a.kind == ActionKind::Start) return g.controlled[a.var];
  return g.variables[a.var].tags[a.value] == Controllability::Controllable;
}

bool Move::starting(const Game& g) const {
  (void)g;
  if (kind == MoveKind::Wait) return false;
  for (const auto& a : actions)
    if (a.kind == ActionKind::End) return false;
  // wait-shaped ending moves aside, an empty play is classified by use site;
  // by Def. "Moves" Charlie's plays are nonempty and Eve's pair with Charlie's.
  return !actions.empty() || kind == MoveKind::Play;
}

Move make_play(std::vector<Action> actions) {
  Move m;
  m.kind = MoveKind::Play;
  m.actions = std::move(actions);
  std::sort(m.actions.begin(), m.actions.end());
  return m;
}

Move make_play_timed(std::uint32_t delta, std::vector<Action> actions) {
  Move m;
  m.kind = MoveKind::PlayTimed;
  m.delta = delta;
  m.actions = std::move(actions);
  std::sort(m.actions.begin(), m.actions.end());
  return m;
}

Move make_wait(std::uint32_t delta) {
  Move m;
  m.kind = MoveKind::Wait;
  m.delta = delta;
  return m;
}

namespace {

enum class Phase { Starting, Ending, Mixed };

Phase move_phase(const Move& m) {
  if (m.kind == MoveKind::Wait) return Phase::Ending;
  bool any_start = false, any_end = false;
  for (const auto& a : m.actions)
    (a.kind == ActionKind::Start ? any_start : any_end) = true;
  if (any_start && any_end) return Phase::Mixed;
  if (any_start) return Phase::Starting;
  if (any_end) return Phase::Ending;
  return Phase::Starting;  // empty play: phase fixed by the round partner
}

}  // namespace

std::optional<std::string> check_round(const Game& g, const Round& r) {
  // Charlie: wait(d>=1) or nonempty play of his own actions, one phase only.
  const Move& c = r.charlie;
  const Move& e = r.eve;
  if (c.kind == MoveKind::PlayTimed) return "Charlie cannot play timed moves";
  if (c.kind == MoveKind::Wait) {
    if (c.delta < 1) return "wait delta must be >= 1";
  } else {
    if (c.actions.empty()) return "Charlie cannot play an empty move";
    if (move_phase(c) == Phase::Mixed) return "Charlie move mixes starts and ends";
    for (const auto& a : c.actions)
      if (!charlie_action(g, a)) return "Charlie move contains an Eve action";
  }
  if (e.kind == MoveKind::Wait) return "Eve cannot wait";
  if (move_phase(e) == Phase::Mixed) return "Eve move mixes starts and ends";
  for (const auto& a : e.actions)
    if (charlie_action(g, a)) return "Eve move contains a Charlie action";
  if (e.kind == MoveKind::PlayTimed && e.delta < 1) return "play delta must be >= 1";

  // Pairing (Def. "Round" clause 2) and phase agreement (clause 1).
  if (c.kind == MoveKind::Wait) {
    if (e.kind != MoveKind::PlayTimed) return "wait pairs only with play(delta, A)";
    if (e.delta > c.delta) return "Eve delta exceeds Charlie wait";
    if (move_phase(e) == Phase::Starting && !e.actions.empty())
      return "wait is an ending move; Eve must play ending actions";
  } else {
    if (e.kind != MoveKind::Play) return "play pairs only with play";
    Phase pc = move_phase(c), pe = move_phase(e);
    if (!e.actions.empty() && pc != pe) return "round mixes a starting and an ending move";
  }
  return std::nullopt;
}

RoundOutcome apply_round(const Game& g, const EventSequence& seq, const Round& r) {
  RoundOutcome out;
  if (auto err = check_round(g, r)) {
    out.reason = "invalid round: " + *err;
    return out;
  }
  bool ending = (r.charlie.kind == MoveKind::Wait) || move_phase(r.charlie) == Phase::Ending ||
                (r.charlie.actions.empty() && move_phase(r.eve) == Phase::Ending);
  // Alternation: an ending round applies iff the plan is open for all variables.
  if (ending != open_for_all(seq, g.var_count())) {
    out.reason = ending ? "ending round on a plan that is not open for all variables"
                        : "starting round on a plan open for all variables";
    return out;
  }
  EventSequence next = seq;
  std::vector<Action> played = r.charlie.kind == MoveKind::Wait
                                   ? std::vector<Action>{}
                                   : r.charlie.actions;
  played.insert(played.end(), r.eve.actions.begin(), r.eve.actions.end());
  if (ending) {
    std::uint32_t delta = r.eve.kind == MoveKind::PlayTimed ? r.eve.delta : 1;
    Event ev;
    ev.actions = played;
    ev.delay = next.events.empty() ? 0 : delta;
    ev.sort_actions();
    next.events.push_back(ev);
  } else {
    if (next.events.empty()) next.events.push_back(Event{{}, 0});
    Event& last = next.events.back();
    last.actions.insert(last.actions.end(), played.begin(), played.end());
    last.sort_actions();
  }
  ValidityReport rep = validate_event_sequence(next, g.variables);
  if (!rep.ok) {
    out.reason = "outcome invalid: " + rep.message;
    return out;
  }
  out.applicable = true;
  out.result = std::move(next);
  return out;
}

EventSequence normalize_gaps(const EventSequence& seq, std::uint32_t d) {
  if (d < 1) throw std::invalid_argument("normalize_gaps: d must be >= 1");
  EventSequence out;
  for (std::size_t i = 0; i < seq.events.size(); ++i) {
    Event e = seq.events[i];
    if (i > 0) {
      std::uint32_t rest = e.delay;
      while (rest > d) {
        out.events.push_back(Event{{}, d});
        rest -= d;
      }
      e.delay = rest;
    }
    out.events.push_back(e);
  }
  return out;
}

EventSequence denormalize_gaps(const EventSequence& seq) {
  EventSequence out;
  std::uint32_t carry = 0;
  for (std::size_t i = 0; i < seq.events.size(); ++i) {
    Event e = seq.events[i];
    if (i > 0 && e.actions.empty()) {
      carry += e.delay;
      continue;
    }
    e.delay += carry;
    carry = 0;
    out.events.push_back(e);
  }
  return out;
}

std::string action_to_string(const Game& g, const Action& a) {
  const auto& sv = g.variables[a.var];
  return std::string(a.kind == ActionKind::Start ? "start(" : "end(") + sv.name + "," +
         sv.values[a.value] + ")";
}

std::string event_to_string(const Game& g, const Event& e) {
  std::string s = "({";
  for (std::size_t i = 0; i < e.actions.size(); ++i) {
    if (i) s += ",";
    s += action_to_string(g, e.actions[i]);
  }
  s += "}," + std::to_string(e.delay) + ")";
  return s;
}

std::string move_to_string(const Game& g, const Move& m) {
  switch (m.kind) {
    case MoveKind::Wait:
      return "wait(" + std::to_string(m.delta) + ")";
    case MoveKind::PlayTimed: {
      std::string s = "play(" + std::to_string(m.delta) + ",{";
      for (std::size_t i = 0; i < m.actions.size(); ++i) {
        if (i) s += ",";
        s += action_to_string(g, m.actions[i]);
      }
      return s + "})";
    }
    case MoveKind::Play: {
      std::string s = "play({";
      for (std::size_t i = 0; i < m.actions.size(); ++i) {
        if (i) s += ",";
        s += action_to_string(g, m.actions[i]);
      }
      return s + "})";
    }
  }
  return "?";
}

std::string move_encoding(const Move& m) {
  std::string s;
  s.push_back(static_cast<char>(m.kind));
  std::uint32_t d = m.delta;
  for (int i = 3; i >= 0; --i) s.push_back(static_cast<char>((d >> (8 * i)) & 0xff));
  for (const auto& a : m.actions) {
    s.push_back(static_cast<char>(a.kind));
    s.push_back(static_cast<char>(a.var));
    s.push_back(static_cast<char>(a.value));
  }
  return s;
}

}  // namespace tgs
