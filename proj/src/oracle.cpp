#include "tgs/oracle.hpp"

#include <algorithm>
#include <stdexcept>

namespace tgs {

namespace {

std::vector<TokenInterval> tokens_impl(const EventSequence& seq,
                                       const std::vector<StateVariable>& vars,
                                       bool require_closed) {
  ValidityReport rep = validate_event_sequence(seq, vars);
  if (!rep.ok) throw std::invalid_argument("invalid event sequence: " + rep.message);
  std::vector<std::uint64_t> times = event_times(seq);
  std::vector<TokenInterval> out;
  for (std::size_t v = 0; v < vars.size(); ++v) {
    std::optional<TokenInterval> open;
    for (std::size_t i = 0; i < seq.events.size(); ++i) {
      for (const Action& a : seq.events[i].actions) {
        if (a.var != static_cast<VarId>(v)) continue;
        if (a.kind == ActionKind::End) {
          if (!open) {
            if (require_closed)
              throw std::invalid_argument("sequence open on the left for variable " +
                                          vars[v].name);
            continue;  // open-left token: not a completed token
          }
          open->end_time = times[i];
          open->end_index = i + 1;
          out.push_back(*open);
          open.reset();
        }
      }
      for (const Action& a : seq.events[i].actions) {
        if (a.var != static_cast<VarId>(v) || a.kind != ActionKind::Start) continue;
        open = TokenInterval{static_cast<VarId>(v), a.value, times[i], 0, i + 1, 0};
      }
    }
    if (open && require_closed)
      throw std::invalid_argument("sequence open on the right for variable " + vars[v].name);
  }
  std::sort(out.begin(), out.end(), [](const TokenInterval& a, const TokenInterval& b) {
    return std::tie(a.var, a.start_index) < std::tie(b.var, b.start_index);
  });
  return out;
}

std::int64_t term_time(const TokenInterval& tok, TermEndpoint ep) {
  return static_cast<std::int64_t>(ep == TermEndpoint::Start ? tok.start_time : tok.end_time);
}

// Backtracking search over quantifier-to-token assignments; non-injective
// assignments allowed.
bool search_assignment(const ExistentialStatement& st,
                       const std::vector<TokenInterval>& tokens,
                       const std::string& trigger_name, std::optional<std::size_t> trigger_tok,
                       std::size_t next, Assignment& asg) {
  if (next == st.quantifiers.size()) {
    for (const Atom& a : st.clause) {
      auto tok_of = [&](const Term& t) -> const TokenInterval& {
        if (t.token == trigger_name) return tokens[*trigger_tok];
        return tokens[asg.at(t.token)];
      };
      std::int64_t diff = term_time(tok_of(a.rhs), a.rhs.endpoint) -
                          term_time(tok_of(a.lhs), a.lhs.endpoint);
      if (diff < static_cast<std::int64_t>(a.lower)) return false;
      if (!a.upper_unbounded() && diff > static_cast<std::int64_t>(a.upper)) return false;
    }
    return true;
  }
  const Quantifier& q = st.quantifiers[next];
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].var != q.var || tokens[i].value != q.value) continue;
    asg[q.token] = i;
    if (search_assignment(st, tokens, trigger_name, trigger_tok, next + 1, asg)) return true;
  }
  asg.erase(q.token);
  return false;
}

RuleCheck check_rule_tokens(const Game& g, const std::vector<TokenInterval>& tokens,
                            const Rule& rule) {
  (void)g;
  RuleCheck rc;
  if (rule.triggerless) {
    TriggerWitness w;
    for (std::size_t s = 0; s < rule.statements.size() && !w.witnessed; ++s) {
      Assignment asg;
      if (search_assignment(rule.statements[s], tokens, "", std::nullopt, 0, asg)) {
        w.witnessed = true;
        w.statement = static_cast<int>(s);
        w.assignment = asg;
      }
    }
    rc.satisfied = w.witnessed;
    rc.triggers.push_back(std::move(w));
    return rc;
  }
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].var != rule.trigger_var || tokens[i].value != rule.trigger_value) continue;
    TriggerWitness w;
    w.trigger_token = i;
    for (std::size_t s = 0; s < rule.statements.size() && !w.witnessed; ++s) {
      Assignment asg;
      if (search_assignment(rule.statements[s], tokens, rule.trigger_token, i, 0, asg)) {
        w.witnessed = true;
        w.statement = static_cast<int>(s);
        w.assignment = asg;
      }
    }
    if (!w.witnessed) rc.satisfied = false;
    rc.triggers.push_back(std::move(w));
  }
  return rc;
}

}  // namespace

std::vector<TokenInterval> extract_tokens(const EventSequence& seq,
                                          const std::vector<StateVariable>& vars) {
  return tokens_impl(seq, vars, true);
}

std::vector<TokenInterval> extract_completed_tokens(const EventSequence& seq,
                                                    const std::vector<StateVariable>& vars) {
  return tokens_impl(seq, vars, false);
}

RuleCheck check_rule(const Game& g, const EventSequence& seq, const Rule& rule) {
  return check_rule_tokens(g, extract_tokens(seq, g.variables), rule);
}

SolutionCheck is_solution(const Game& g, const EventSequence& seq, RuleSelection sel,
                          bool require_every_variable) {
  SolutionCheck sc;
  ValidityReport rep = validate_event_sequence(seq, g.variables);
  if (!rep.ok) {
    sc.reason = "invalid sequence: " + rep.message;
    return sc;
  }
  if (!closed_for_all(seq, g.var_count())) {
    sc.reason = "sequence is not closed";
    return sc;
  }
  std::vector<TokenInterval> tokens = extract_tokens(seq, g.variables);
  std::vector<bool> mentioned(g.var_count(), false);
  std::vector<std::vector<const TokenInterval*>> per_var(g.var_count());
  for (const auto& t : tokens) {
    mentioned[t.var] = true;
    per_var[t.var].push_back(&t);
  }
  if (require_every_variable) {
    for (std::size_t v = 0; v < g.var_count(); ++v)
      if (!mentioned[v]) {
        sc.reason = "variable " + g.variables[v].name + " has no timeline";
        return sc;
      }
  }
  for (std::size_t v = 0; v < g.var_count(); ++v) {
    const auto& sv = g.variables[v];
    for (std::size_t i = 0; i < per_var[v].size(); ++i) {
      const TokenInterval& t = *per_var[v][i];
      const Duration& d = sv.durations[t.value];
      std::uint64_t len = t.end_time - t.start_time;
      if (len < d.dmin || (!d.unbounded() && len > d.dmax)) {
        sc.reason = "token of " + sv.name + "=" + sv.values[t.value] + " violates its duration";
        return sc;
      }
      if (i > 0) {
        ValId prev = per_var[v][i - 1]->value;
        const auto& succ = sv.transitions[prev];
        if (!std::binary_search(succ.begin(), succ.end(), t.value)) {
          sc.reason = "transition " + sv.values[prev] + " -> " + sv.values[t.value] +
                      " not allowed for " + sv.name;
          return sc;
        }
      }
    }
  }
  auto run_rules = [&](const std::vector<Rule>& rules) {
    for (const Rule& r : rules) {
      RuleCheck rc = check_rule_tokens(g, tokens, r);
      if (!rc.satisfied) {
        sc.reason = "rule " + r.name + " unsatisfied";
        sc.failing_rule = &r;
        for (const auto& w : rc.triggers)
          if (!w.witnessed) {
            sc.failing_trigger = w.trigger_token;
            break;
          }
        return false;
      }
    }
    return true;
  };
  if (sel != RuleSelection::Domain && !run_rules(g.system_rules)) return sc;
  if (sel != RuleSelection::System && !run_rules(g.domain_rules)) return sc;
  sc.solution = true;
  return sc;
}

bool d_innocent(const Game& g, const EventSequence& seq) {
  std::vector<TokenInterval> completed = extract_completed_tokens(seq, g.variables);
  for (const Rule& r : g.domain_rules) {
    if (r.triggerless) {
      // A pending triggerless domain rule counts against innocence only when
      // unwitnessed; desugared games never reach here.
      RuleCheck rc = check_rule_tokens(g, completed, r);
      if (!rc.satisfied) return false;
      continue;
    }
    // Count trigger occurrences (starts of the trigger pair), open ones too.
    std::size_t occurrences = 0;
    for (const Event& e : seq.events)
      for (const Action& a : e.actions)
        if (a.kind == ActionKind::Start && a.var == r.trigger_var &&
            a.value == r.trigger_value)
          ++occurrences;
    if (occurrences == 0) continue;
    RuleCheck rc = check_rule_tokens(g, completed, r);
    std::size_t witnessed = 0;
    for (const auto& w : rc.triggers)
      if (w.witnessed) ++witnessed;
    // Every occurrence must be witnessed; occurrences with still-open trigger
    // tokens are not in `completed` and therefore unwitnessed by definition.
    if (witnessed < occurrences) return false;
    if (!rc.satisfied) return false;
  }
  return true;
}

namespace {

struct Enumerator {
  const std::vector<StateVariable>& vars;
  const EnumLimits& limits;
  const std::function<bool(const EventSequence&)>& fn;
  std::uint64_t nodes = 0;
  bool budget_ok = true;
  bool keep_going = true;

  bool tick() {
    if (++nodes > limits.budget) budget_ok = false;
    return budget_ok && keep_going;
  }

  // mentioned: indices of variables appearing in this sequence.
  void run(const std::vector<std::size_t>& mentioned) {
    if (mentioned.empty()) return;
    // First event: one start per mentioned variable.
    EventSequence seq;
    std::vector<ValId> current(mentioned.size(), 0);
    first_event(mentioned, 0, seq, current);
  }

  void first_event(const std::vector<std::size_t>& m, std::size_t i, EventSequence& seq,
                   std::vector<ValId>& current) {
    if (!tick()) return;
    if (i == m.size()) {
      Event e;
      for (std::size_t k = 0; k < m.size(); ++k)
        e.actions.push_back({ActionKind::Start, static_cast<VarId>(m[k]), current[k]});
      e.sort_actions();
      e.delay = 0;
      seq.events.push_back(e);
      extend(m, seq, current, 2);
      seq.events.pop_back();
      return;
    }
    for (std::size_t v = 0; v < vars[m[i]].values.size(); ++v) {
      current[i] = static_cast<ValId>(v);
      first_event(m, i + 1, seq, current);
    }
  }

  void extend(const std::vector<std::size_t>& m, EventSequence& seq,
              std::vector<ValId>& current, std::size_t next_len) {
    if (!tick()) return;
    if (next_len > limits.max_events) return;
    // Option A: close everything now (final event).
    for (std::uint32_t d = 1; d <= limits.max_delta && keep_going && budget_ok; ++d) {
      Event e;
      for (std::size_t k = 0; k < m.size(); ++k)
        e.actions.push_back({ActionKind::End, static_cast<VarId>(m[k]), current[k]});
      e.sort_actions();
      e.delay = d;
      seq.events.push_back(e);
      if (!fn(seq)) keep_going = false;
      seq.events.pop_back();
    }
    // Option B: a middle event (at least one switch) then recurse.
    if (next_len + 1 > limits.max_events) return;
    std::vector<int> choice(m.size());  // -1 idle, else new value
    middle_event(m, seq, current, next_len, 0, choice);
  }

  void middle_event(const std::vector<std::size_t>& m, EventSequence& seq,
                    std::vector<ValId>& current, std::size_t next_len, std::size_t i,
                    std::vector<int>& choice) {
    if (!tick()) return;
    if (i == m.size()) {
      bool any = false;
      for (int c : choice)
        if (c >= 0) any = true;
      if (!any) return;  // events are non-empty
      for (std::uint32_t d = 1; d <= limits.max_delta && keep_going && budget_ok; ++d) {
        Event e;
        std::vector<ValId> saved = current;
        for (std::size_t k = 0; k < m.size(); ++k) {
          if (choice[k] < 0) continue;
          e.actions.push_back({ActionKind::End, static_cast<VarId>(m[k]), current[k]});
          e.actions.push_back({ActionKind::Start, static_cast<VarId>(m[k]),
                               static_cast<ValId>(choice[k])});
          current[k] = static_cast<ValId>(choice[k]);
        }
        e.sort_actions();
        e.delay = d;
        seq.events.push_back(e);
        extend(m, seq, current, next_len + 1);
        seq.events.pop_back();
        current = saved;
      }
      return;
    }
    choice[i] = -1;
    middle_event(m, seq, current, next_len, i + 1, choice);
    for (std::size_t v = 0; v < vars[m[i]].values.size(); ++v) {
      choice[i] = static_cast<int>(v);
      middle_event(m, seq, current, next_len, i + 1, choice);
    }
  }
};

}  // namespace

bool enumerate_closed_sequences(const std::vector<StateVariable>& vars,
                                const EnumLimits& limits,
                                const std::function<bool(const EventSequence&)>& fn) {
  // All non-empty subsets of variables as the mentioned set.
  std::size_t n = vars.size();
  Enumerator en{vars, limits, fn};
  for (std::size_t mask = 1; mask < (1u << n) && en.keep_going && en.budget_ok; ++mask) {
    std::vector<std::size_t> mentioned;
    for (std::size_t v = 0; v < n; ++v)
      if ((mask >> v) & 1u) mentioned.push_back(v);
    en.run(mentioned);
  }
  return en.budget_ok;
}

}  // namespace tgs
