#include "tgs/dbm.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace tgs {

std::string MatchingStructure::encode() const {
  std::string s;
  s.reserve(16 + static_cast<std::size_t>(dbm.terms()) * dbm.terms() * 8);
  auto put32 = [&s](std::uint32_t v) {
    for (int i = 3; i >= 0; --i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  put32(static_cast<std::uint32_t>(stmt));
  put32(matched);
  put32(age);
  for (int t = 0; t < dbm.terms(); ++t)
    for (int u = 0; u < dbm.terms(); ++u) {
      std::uint64_t v = static_cast<std::uint64_t>(dbm.at(t, u));
      for (int i = 7; i >= 0; --i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
  return s;
}

namespace {

int term_index_of(const CompiledStatement& cs, const Term& t) {
  for (std::size_t slot = 0; slot < cs.slots.size(); ++slot)
    if (cs.slots[slot].token == t.token)
      return t.endpoint == TermEndpoint::Start ? start_term(static_cast<int>(slot))
                                               : end_term(static_cast<int>(slot));
  throw std::invalid_argument("atom references unknown token " + t.token);
}

}  // namespace

CompiledStatement compile_statement(const Rule& rule, const ExistentialStatement& st,
                                    const DurationMap& durations) {
  if (rule.triggerless)
    throw std::invalid_argument("cannot compile a triggerless rule; desugar first");
  CompiledStatement cs;
  cs.slots.push_back({rule.trigger_token, rule.trigger_var, rule.trigger_value});
  for (const auto& q : st.quantifiers) cs.slots.push_back(q);
  cs.base = Dbm(cs.term_count());

  for (const Atom& a : st.clause) {
    int lhs = term_index_of(cs, a.lhs);
    int rhs = term_index_of(cs, a.rhs);
    // lhs <=[l,u] rhs: rhs - lhs <= u and lhs - rhs <= -l.
    if (!a.upper_unbounded()) cs.base.tighten(rhs, lhs, static_cast<std::int64_t>(a.upper));
    cs.base.tighten(lhs, rhs, -static_cast<std::int64_t>(a.lower));
  }
  // Durations of the statement's quantified tokens (not the trigger).
  for (std::size_t slot = 1; slot < cs.slots.size(); ++slot) {
    const Quantifier& q = cs.slots[slot];
    auto it = durations.find({q.var, q.value});
    if (it == durations.end())
      throw std::invalid_argument("unknown duration for quantified pair of token " + q.token);
    const Duration& d = it->second;
    int s = start_term(static_cast<int>(slot)), e = end_term(static_cast<int>(slot));
    if (d.dmin > 0) cs.base.tighten(s, e, -static_cast<std::int64_t>(d.dmin));
    if (!d.unbounded()) cs.base.tighten(e, s, static_cast<std::int64_t>(d.dmax));
  }
  // Pairwise feasibility: a pair with D[t,u] + D[u,t] < 0 (or a negative
  // diagonal from a self-atom) can never be realized; the statement is
  // unsatisfiable and takes no part in the automaton.
  for (int t = 0; t < cs.term_count() && cs.feasible; ++t) {
    if (cs.base.at(t, t) < 0) cs.feasible = false;
    for (int u = t + 1; u < cs.term_count(); ++u) {
      std::int64_t a = cs.base.at(t, u), b = cs.base.at(u, t);
      if (a != kDbmInf && b != kDbmInf && a + b < 0) {
        cs.feasible = false;
        break;
      }
    }
  }
  return cs;
}

MatchingStructure initial_structure(const CompiledStatement& cs) {
  MatchingStructure m;
  m.stmt = cs.id;
  m.dbm = cs.base;
  m.matched = 0;
  m.age = 0;
  return m;
}

std::uint64_t window_of(const std::vector<const Rule*>& rules) {
  std::uint64_t w = 1;
  for (const Rule* r : rules)
    for (const auto& st : r->statements)
      for (const auto& a : st.clause)
        if (!a.upper_unbounded() && a.upper != 0) w *= a.upper;
  return w;
}

std::uint32_t alphabet_bound(const std::vector<const Rule*>& rules) {
  std::uint32_t best = 0;
  bool any = false;
  for (const Rule* r : rules)
    for (const auto& st : r->statements)
      for (const auto& a : st.clause) {
        any = true;
        best = std::max(best, a.lower);
        if (!a.upper_unbounded()) best = std::max(best, a.upper);
      }
  return any ? best + 1 : 1;
}

MatchingStructure shift(const MatchingStructure& m, std::uint32_t delta,
                        std::uint64_t window) {
  MatchingStructure out = m;
  const int n = m.dbm.terms();
  for (int t = 0; t < n; ++t)
    for (int u = 0; u < n; ++u) {
      std::int64_t v = m.dbm.at(t, u);
      if (v == kDbmInf) continue;
      bool tm = m.is_matched(t), um = m.is_matched(u);
      if (tm && !um)
        out.dbm.set(t, u, v + delta);
      else if (!tm && um)
        out.dbm.set(t, u, v - delta);
    }
  if (m.active()) {
    std::uint64_t a = static_cast<std::uint64_t>(m.age) + delta;
    out.age = static_cast<std::uint32_t>(std::min<std::uint64_t>(a, window));
  }
  return out;
}

bool admissible(const MatchingStructure& m, std::uint32_t delta) {
  const int n = m.dbm.terms();
  for (int t = 0; t < n; ++t) {
    if (!m.is_matched(t)) continue;
    for (int u = 0; u < n; ++u) {
      if (m.is_matched(u)) continue;
      std::int64_t bound = m.dbm.at(u, t);
      if (bound != kDbmInf && static_cast<std::int64_t>(delta) > bound) return false;
    }
  }
  return true;
}

namespace {

bool has_action(const std::vector<Action>& actions, ActionKind k, VarId var, ValId val) {
  return std::binary_search(actions.begin(), actions.end(), Action{k, var, val});
}

bool check_match_conditions(const MatchingStructure& m, std::uint32_t I,
                            std::uint32_t delta) {
  const Dbm& d = m.dbm;
  const int n = d.terms();
  for (int t = 0; t < n; ++t) {
    if (!((I >> t) & 1u)) continue;
    for (int u = 0; u < n; ++u) {
      if (u == t) continue;
      std::int64_t ut = d.at(u, t);
      // 2a: every term constrained to happen before-or-with t must be matched.
      if (ut != kDbmInf && ut <= 0 && !m.is_matched(u) && !((I >> u) & 1u)) return false;
      // 2b: lower bounds against already-matched terms.
      if (m.is_matched(u) && ut != kDbmInf &&
          static_cast<std::int64_t>(delta) < -ut)
        return false;
      // 2c: simultaneously matched terms must tolerate coincidence.
      if (((I >> u) & 1u) && u > t) {
        std::int64_t tu = d.at(t, u);
        if (!(ut == 0 || tu == 0 || (ut == kDbmInf && tu == kDbmInf))) return false;
      }
    }
  }
  return true;
}

}  // namespace

std::vector<MatchingStructure> match_events(const MatchingStructure& m,
                                            const CompiledStatement& cs,
                                            const std::vector<Action>& actions,
                                            std::uint32_t delta, std::uint64_t window) {
  std::vector<MatchingStructure> out;
  if (!admissible(m, delta)) return out;

  // 1b forces the end of every name whose start is matched when the matching
  // end action occurs; 1a makes starts optional candidates.
  std::uint32_t forced = 0;
  std::vector<int> optional_starts;
  for (std::size_t slot = 0; slot < cs.slots.size(); ++slot) {
    const Quantifier& q = cs.slots[slot];
    int s = start_term(static_cast<int>(slot)), e = end_term(static_cast<int>(slot));
    if (!m.is_matched(e) && m.is_matched(s) &&
        has_action(actions, ActionKind::End, q.var, q.value))
      forced |= 1u << e;
    if (!m.is_matched(s) && has_action(actions, ActionKind::Start, q.var, q.value))
      optional_starts.push_back(s);
  }

  MatchingStructure shifted = shift(m, delta, window);
  const std::size_t k = optional_starts.size();
  std::vector<std::uint32_t> candidates;
  for (std::uint32_t sub = 0; sub < (1u << k); ++sub) {
    std::uint32_t I = forced;
    for (std::size_t i = 0; i < k; ++i)
      if ((sub >> i) & 1u) I |= 1u << optional_starts[i];
    candidates.push_back(I);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  for (std::uint32_t I : candidates) {
    if (!check_match_conditions(m, I, delta)) continue;
    MatchingStructure succ = shifted;
    succ.matched |= I;
    out.push_back(std::move(succ));
  }
  return out;
}

MatchingStructure canonicalize(const MatchingStructure& m) {
  MatchingStructure out = m;
  const int n = m.dbm.terms();
  for (int t = 0; t < n; ++t) {
    if (!m.is_matched(t)) continue;
    for (int u = 0; u < n; ++u) {
      if (m.is_matched(u)) {
        out.dbm.set(t, u, 0);
      } else {
        std::int64_t v = out.dbm.at(t, u);
        if (v > 0) out.dbm.set(t, u, 0);
      }
    }
  }
  return out;
}

std::string dump_matrix(const MatchingStructure& m, const CompiledStatement& cs) {
  std::ostringstream os;
  auto term_name = [&cs](int t) {
    const auto& q = cs.slots[t / 2];
    return std::string(t % 2 == 0 ? "start(" : "end(") + q.token + ")";
  };
  const int n = m.dbm.terms();
  os << "          ";
  for (int u = 0; u < n; ++u) os << term_name(u) << " ";
  os << "\n";
  for (int t = 0; t < n; ++t) {
    os << term_name(t) << " ";
    for (int u = 0; u < n; ++u) {
      std::int64_t v = m.dbm.at(t, u);
      if (v == kDbmInf)
        os << ". ";
      else
        os << v << " ";
    }
    os << (m.is_matched(t) ? " [matched]" : "") << "\n";
  }
  os << "age=" << m.age << "\n";
  return os.str();
}

}  // namespace tgs
