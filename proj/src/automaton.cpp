#include "tgs/automaton.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

namespace tgs {

std::string Symbol::encode() const {
  std::string s;
  s.push_back(static_cast<char>(delta));
  for (const auto& a : actions) {
    s.push_back(static_cast<char>(a.kind));
    s.push_back(static_cast<char>(a.var));
    s.push_back(static_cast<char>(a.value));
  }
  return s;
}

std::vector<Symbol> encode_sequence(const EventSequence& seq) {
  std::vector<Symbol> out;
  out.reserve(seq.events.size());
  for (std::size_t i = 0; i < seq.events.size(); ++i) {
    Symbol s;
    s.actions = seq.events[i].actions;
    std::sort(s.actions.begin(), s.actions.end());
    s.delta = i == 0 ? 1 : seq.events[i].delay;
    out.push_back(std::move(s));
  }
  return out;
}

// --- TV automaton ---------------------------------------------------------------

std::string TvState::encode() const {
  std::string s;
  s.push_back(sink ? 1 : 0);
  s.push_back(first_pending ? 1 : 0);
  for (const auto& v : vars) {
    s.push_back(static_cast<char>(v.kind));
    s.push_back(static_cast<char>(v.value + 1));
    std::uint32_t e = v.elapsed;
    for (int i = 3; i >= 0; --i) s.push_back(static_cast<char>((e >> (8 * i)) & 0xff));
  }
  return s;
}

TvState tv_initial(const Game& g) {
  TvState s;
  s.vars.assign(g.var_count(), TvVarState{});
  return s;
}

namespace {

std::uint32_t elapsed_cap(const Duration& d) {
  return d.unbounded() ? d.dmin : d.dmax + 1;
}

}  // namespace

TvState tv_transition(const Game& g, const TvState& s, const Symbol& sym) {
  if (s.sink) return s;
  TvState out = s;
  out.first_pending = false;
  auto die = [&out]() {
    out.sink = true;
    out.vars.clear();
    return out;
  };
  // time advances before the event's actions are applied
  for (std::size_t v = 0; v < out.vars.size(); ++v) {
    auto& vs = out.vars[v];
    if (vs.kind == TvVarState::Kind::Open) {
      const Duration& d = g.variables[v].durations[vs.value];
      std::uint64_t e = static_cast<std::uint64_t>(vs.elapsed) + sym.delta;
      vs.elapsed = static_cast<std::uint32_t>(std::min<std::uint64_t>(e, elapsed_cap(d)));
    }
  }
  for (const Action& a : sym.actions) {
    if (a.kind != ActionKind::End) continue;
    auto& vs = out.vars[a.var];
    if (vs.kind != TvVarState::Kind::Open || vs.value != a.value) return die();
    const Duration& d = g.variables[a.var].durations[a.value];
    if (vs.elapsed < d.dmin || (!d.unbounded() && vs.elapsed > d.dmax)) return die();
    vs.kind = TvVarState::Kind::Closed;
  }
  for (const Action& a : sym.actions) {
    if (a.kind != ActionKind::Start) continue;
    auto& vs = out.vars[a.var];
    if (vs.kind == TvVarState::Kind::Open) return die();
    if (vs.kind == TvVarState::Kind::NotStarted) {
      if (!s.first_pending) return die();
    } else {
      const auto& succ = g.variables[a.var].transitions[vs.value];
      if (!std::binary_search(succ.begin(), succ.end(), a.value)) return die();
    }
    vs.kind = TvVarState::Kind::Open;
    vs.value = a.value;
    vs.elapsed = 0;
  }
  if (s.first_pending) {
    // the first event must start every declared variable
    for (const auto& vs : out.vars)
      if (vs.kind == TvVarState::Kind::NotStarted) return die();
  }
  return out;
}

bool tv_accepting(const TvState& s, TvAcceptance mode) {
  if (s.sink) return false;
  if (mode == TvAcceptance::Tolerant) return true;
  for (const auto& v : s.vars)
    if (v.kind != TvVarState::Kind::Closed) return false;
  return true;
}

// --- compiled problems ------------------------------------------------------------

CompiledProblem compile_problem(const Game& g, RuleSelection sel, std::uint32_t d_override) {
  CompiledProblem cp;
  if (sel != RuleSelection::Domain)
    for (const Rule& r : g.system_rules) cp.rules.push_back(r);
  if (sel != RuleSelection::System)
    for (const Rule& r : g.domain_rules) cp.rules.push_back(r);
  for (const Rule& r : cp.rules)
    if (r.triggerless)
      throw std::invalid_argument("compile_problem: triggerless rule " + r.name +
                                  " (desugar first)");
  DurationMap durations;
  for (std::size_t v = 0; v < g.var_count(); ++v)
    for (std::size_t val = 0; val < g.variables[v].values.size(); ++val)
      durations[{static_cast<VarId>(v), static_cast<ValId>(val)}] =
          g.variables[v].durations[val];

  std::vector<const Rule*> rp;
  for (const Rule& r : cp.rules) rp.push_back(&r);
  cp.window = window_of(rp);
  cp.d = std::max(alphabet_bound(rp), d_override);

  cp.statements_of_rule.resize(cp.rules.size());
  for (std::size_t ri = 0; ri < cp.rules.size(); ++ri) {
    const Rule& r = cp.rules[ri];
    for (std::size_t si = 0; si < r.statements.size(); ++si) {
      CompiledStatement cs = compile_statement(r, r.statements[si], durations);
      cs.id = static_cast<int>(cp.statements.size());
      cs.rule = static_cast<int>(ri);
      cs.index_in_rule = static_cast<int>(si);
      cp.statements_of_rule[ri].push_back(cs.id);
      cp.statements.push_back(std::move(cs));
    }
  }
  return cp;
}

// --- rule automaton ----------------------------------------------------------------

std::string RuleState::encode() const {
  std::string s;
  s.push_back(sink ? 1 : 0);
  s += "U";
  for (const auto& m : upsilon) s += m.encode();
  for (const auto& c : clusters) {
    s += "C";
    s.push_back(static_cast<char>(c.rule));
    for (const auto& m : c.structs) s += m.encode();
  }
  return s;
}

std::vector<MatchingStructure> RuleState::delta(int stmt) const {
  std::vector<MatchingStructure> out;
  for (const auto& c : clusters)
    for (const auto& m : c.structs)
      if (m.stmt == stmt) out.push_back(m);
  return out;
}

std::set<int> RuleState::phi(const CompiledProblem& cp, int stmt) const {
  const int rule = cp.statements[stmt].rule;
  std::set<int> out;
  bool tracked = false;
  for (const auto& c : clusters) {
    if (c.rule != rule) continue;
    bool has = false;
    for (const auto& m : c.structs)
      if (m.stmt == stmt) has = true;
    if (!has) continue;
    tracked = true;
    for (const auto& m : c.structs) out.insert(m.stmt);
  }
  if (!tracked)
    for (int s : cp.statements_of_rule[rule]) out.insert(s);
  return out;
}

RuleState rule_initial(const CompiledProblem& cp) {
  RuleState q;
  for (const auto& cs : cp.statements)
    if (cs.feasible) q.upsilon.push_back(initial_structure(cs));
  std::sort(q.upsilon.begin(), q.upsilon.end(),
            [](const MatchingStructure& a, const MatchingStructure& b) {
              return a.encode() < b.encode();
            });
  return q;
}

bool rule_accepting(const RuleState& q) {
  if (q.sink) return false;
  for (const auto& m : q.upsilon)
    if (m.active()) return false;
  return q.clusters.empty();
}

namespace {

void sort_unique(std::vector<MatchingStructure>& v) {
  std::sort(v.begin(), v.end(), [](const MatchingStructure& a, const MatchingStructure& b) {
    return a.encode() < b.encode();
  });
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

RuleState rule_sink() {
  RuleState q;
  q.sink = true;
  return q;
}

}  // namespace

RuleState rule_transition(const CompiledProblem& cp, const RuleState& q, const Symbol& sym,
                          RuleStepStats* stats) {
  if (q.sink) return q;
  RuleState out;

  auto step_one = [&](const MatchingStructure& m, std::vector<MatchingStructure>& dst,
                      bool& any_closed) {
    auto succs = match_events(m, cp.statements[m.stmt], sym.actions, sym.delta, cp.window);
    for (auto& s : succs) {
      if (s.closed()) any_closed = true;
      dst.push_back(canonicalize(s));
    }
  };

  // partition upsilon into the non-active set and the active groups by
  // (rule, age); each group is one trigger occurrence of its rule
  std::map<std::pair<int, std::uint32_t>, std::vector<const MatchingStructure*>> groups;
  std::vector<const MatchingStructure*> nonactive;
  for (const auto& m : q.upsilon) {
    if (m.active())
      groups[{cp.statements[m.stmt].rule, m.age}].push_back(&m);
    else
      nonactive.push_back(&m);
  }

  for (const MatchingStructure* m : nonactive) {
    bool any_closed = false;
    step_one(*m, out.upsilon, any_closed);
    assert(!any_closed);  // a non-active structure cannot close in one step
  }

  std::map<int, int> promoted_per_rule;
  for (const auto& [key, members] : groups) {
    const auto [rule, age] = key;
    std::vector<MatchingStructure> stepped;
    bool any_closed = false;
    for (const MatchingStructure* m : members) step_one(*m, stepped, any_closed);
    if (stepped.empty()) {
      if (stats) ++stats->group_dooms;
      return rule_sink();  // condition (a): the occurrence is unwitnessable
    }
    if (any_closed) continue;  // occurrence witnessed; drop the whole group
    if (static_cast<std::uint64_t>(age) + sym.delta < cp.window) {
      for (auto& s : stepped) out.upsilon.push_back(std::move(s));
    } else {
      // promotion past the window: the group becomes a pending obligation
      sort_unique(stepped);
      out.clusters.push_back({rule, std::move(stepped)});
      if (stats) {
        ++stats->promotions;
        if (++promoted_per_rule[rule] == 2) ++stats->multi_promotions;
      }
    }
  }

  for (const auto& c : q.clusters) {
    std::vector<MatchingStructure> stepped;
    bool any_closed = false;
    for (const auto& m : c.structs) step_one(m, stepped, any_closed);
    if (any_closed) continue;  // obligation discharged
    if (stepped.empty()) {
      if (stats) ++stats->cluster_dooms;
      return rule_sink();  // obligation unwitnessable
    }
    sort_unique(stepped);
    out.clusters.push_back({c.rule, std::move(stepped)});
  }

  // condition (b): every rule triggered by this event must have captured it
  for (std::size_t ri = 0; ri < cp.rules.size(); ++ri) {
    const Rule& r = cp.rules[ri];
    if (!std::binary_search(sym.actions.begin(), sym.actions.end(),
                            Action{ActionKind::Start, r.trigger_var, r.trigger_value}))
      continue;
    bool captured = false;
    for (const auto& m : out.upsilon) {
      if (cp.statements[m.stmt].rule != static_cast<int>(ri)) continue;
      if (m.age == 0 && m.is_matched(start_term(0))) {
        captured = true;
        break;
      }
    }
    if (!captured) {
      if (stats) ++stats->capture_failures;
      return rule_sink();
    }
  }

  sort_unique(out.upsilon);
  auto cluster_key = [](const ObligationCluster& c) {
    std::string k(1, static_cast<char>(c.rule));
    for (const auto& m : c.structs) k += m.encode();
    return k;
  };
  std::sort(out.clusters.begin(), out.clusters.end(),
            [&](const ObligationCluster& a, const ObligationCluster& b) {
              return cluster_key(a) < cluster_key(b);
            });
  out.clusters.erase(std::unique(out.clusters.begin(), out.clusters.end()),
                     out.clusters.end());
  return out;
}

// --- DFA algebra -------------------------------------------------------------------

std::string Dfa::label(State) { return ""; }

namespace {

class TvDfa : public Dfa {
 public:
  TvDfa(Game g, TvAcceptance mode, AlphabetDesc alpha)
      : game_(std::move(g)), mode_(mode), alpha_(std::move(alpha)) {}

  State initial() override { return intern(tv_initial(game_)); }
  State next(State s, const Symbol& sym) override {
    std::string key = sym.encode();
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto it = trans_.find({s, key});
      if (it != trans_.end()) return it->second;
    }
    TvState n = tv_transition(game_, states_[s], sym);
    State id = intern(n);
    std::lock_guard<std::mutex> lk(mu_);
    trans_.emplace(std::make_pair(s, key), id);
    return id;
  }
  bool accepting(State s) override { return tv_accepting(states_[s], mode_); }
  const AlphabetDesc& alphabet() const override { return alpha_; }
  std::size_t explored_states() const override { return states_.size(); }

 private:
  State intern(const TvState& t) {
    std::string k = t.encode();
    std::lock_guard<std::mutex> lk(mu_);
    auto it = index_.find(k);
    if (it != index_.end()) return it->second;
    State id = static_cast<State>(states_.size());
    states_.push_back(t);
    index_.emplace(std::move(k), id);
    return id;
  }
  Game game_;
  TvAcceptance mode_;
  AlphabetDesc alpha_;
  std::vector<TvState> states_;
  std::map<std::string, State> index_;
  std::map<std::pair<State, std::string>, State> trans_;
  std::mutex mu_;
};

class RuleDfa : public Dfa {
 public:
  RuleDfa(std::shared_ptr<const CompiledProblem> cp, AlphabetDesc alpha)
      : cp_(std::move(cp)), alpha_(std::move(alpha)) {}

  State initial() override { return intern(rule_initial(*cp_)); }
  State next(State s, const Symbol& sym) override {
    std::string key = sym.encode();
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto it = trans_.find({s, key});
      if (it != trans_.end()) return it->second;
    }
    RuleState n = rule_transition(*cp_, states_[s], sym);
    State id = intern(n);
    std::lock_guard<std::mutex> lk(mu_);
    trans_.emplace(std::make_pair(s, key), id);
    return id;
  }
  bool accepting(State s) override { return rule_accepting(states_[s]); }
  const AlphabetDesc& alphabet() const override { return alpha_; }
  std::size_t explored_states() const override { return states_.size(); }

 private:
  State intern(const RuleState& r) {
    std::string k = r.encode();
    std::lock_guard<std::mutex> lk(mu_);
    auto it = index_.find(k);
    if (it != index_.end()) return it->second;
    State id = static_cast<State>(states_.size());
    states_.push_back(r);
    index_.emplace(std::move(k), id);
    return id;
  }
  std::shared_ptr<const CompiledProblem> cp_;
  AlphabetDesc alpha_;
  std::vector<RuleState> states_;
  std::map<std::string, State> index_;
  std::map<std::pair<State, std::string>, State> trans_;
  std::mutex mu_;
};

class ComplementDfa : public Dfa {
 public:
  explicit ComplementDfa(std::shared_ptr<Dfa> a) : a_(std::move(a)) {}
  State initial() override { return a_->initial(); }
  State next(State s, const Symbol& sym) override { return a_->next(s, sym); }
  bool accepting(State s) override { return !a_->accepting(s); }
  const AlphabetDesc& alphabet() const override { return a_->alphabet(); }
  std::size_t explored_states() const override { return a_->explored_states(); }

 private:
  std::shared_ptr<Dfa> a_;
};

class ProductDfa : public Dfa {
 public:
  ProductDfa(bool intersection, std::shared_ptr<Dfa> a, std::shared_ptr<Dfa> b)
      : and_(intersection), a_(std::move(a)), b_(std::move(b)) {
    if (!(a_->alphabet() == b_->alphabet()))
      throw std::invalid_argument("combine: alphabet mismatch");
  }
  State initial() override { return intern(a_->initial(), b_->initial()); }
  State next(State s, const Symbol& sym) override {
    auto [sa, sb] = states_[s];
    return intern(a_->next(sa, sym), b_->next(sb, sym));
  }
  bool accepting(State s) override {
    auto [sa, sb] = states_[s];
    return and_ ? (a_->accepting(sa) && b_->accepting(sb))
                : (a_->accepting(sa) || b_->accepting(sb));
  }
  const AlphabetDesc& alphabet() const override { return a_->alphabet(); }
  std::size_t explored_states() const override { return states_.size(); }

 private:
  State intern(State sa, State sb) {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = index_.find({sa, sb});
    if (it != index_.end()) return it->second;
    State id = static_cast<State>(states_.size());
    states_.push_back({sa, sb});
    index_.emplace(std::make_pair(sa, sb), id);
    return id;
  }
  bool and_;
  std::shared_ptr<Dfa> a_, b_;
  std::vector<std::pair<State, State>> states_;
  std::map<std::pair<State, State>, State> index_;
  std::mutex mu_;
};

}  // namespace

std::shared_ptr<Dfa> make_tv_dfa(const Game& g, TvAcceptance mode, AlphabetDesc alphabet) {
  return std::make_shared<TvDfa>(g, mode, std::move(alphabet));
}

std::shared_ptr<Dfa> make_rule_dfa(const Game& g, std::shared_ptr<const CompiledProblem> cp,
                                   AlphabetDesc alphabet) {
  (void)g;
  return std::make_shared<RuleDfa>(std::move(cp), std::move(alphabet));
}

std::shared_ptr<Dfa> combine(CombineOp op, std::vector<std::shared_ptr<Dfa>> args) {
  if (op == CombineOp::Complement) {
    if (args.size() != 1) throw std::invalid_argument("complement takes exactly one automaton");
    return std::make_shared<ComplementDfa>(args[0]);
  }
  if (args.empty()) throw std::invalid_argument("product of zero automata");
  std::shared_ptr<Dfa> acc = args[0];
  for (std::size_t i = 1; i < args.size(); ++i)
    acc = std::make_shared<ProductDfa>(op == CombineOp::ProductIntersection, acc, args[i]);
  return acc;
}

bool accepts(Dfa& a, const EventSequence& seq) {
  Dfa::State s = a.initial();
  for (const Symbol& sym : encode_sequence(seq)) {
    if (sym.delta > a.alphabet().d)
      throw std::out_of_range("symbol out of alphabet: delta exceeds d (normalize first)");
    s = a.next(s, sym);
  }
  return a.accepting(s);
}

// --- game automaton -----------------------------------------------------------------

GameAutomaton::GameAutomaton(Game desugared) : game_(std::move(desugared)) {
  if (game_.has_triggerless())
    throw std::invalid_argument("GameAutomaton requires a desugared game");
  CompiledProblem ps = compile_problem(game_, RuleSelection::System);
  CompiledProblem pd = compile_problem(game_, RuleSelection::Domain);
  std::uint32_t d = std::max(ps.d, pd.d);
  ps.d = pd.d = d;
  cp_s_ = std::make_shared<const CompiledProblem>(std::move(ps));
  cp_d_ = std::make_shared<const CompiledProblem>(std::move(pd));
  alphabet_ = {game_.all_actions(), d};
}

std::uint32_t GameAutomaton::intern_tv(const TvState& t) {
  std::string k = t.encode();
  auto it = tv_index_.find(k);
  if (it != tv_index_.end()) return it->second;
  std::uint32_t id = static_cast<std::uint32_t>(tv_states_.size());
  tv_states_.push_back(t);
  tv_index_.emplace(std::move(k), id);
  return id;
}

std::uint32_t GameAutomaton::intern_rs(std::vector<RuleState>& store,
                                       std::map<std::string, std::uint32_t>& ix,
                                       const RuleState& r) {
  std::string k = r.encode();
  auto it = ix.find(k);
  if (it != ix.end()) return it->second;
  std::uint32_t id = static_cast<std::uint32_t>(store.size());
  store.push_back(r);
  ix.emplace(std::move(k), id);
  return id;
}

GameAutomaton::State GameAutomaton::intern_state(const QData& q) {
  auto key = std::make_tuple(q.tv, q.s, q.d);
  auto it = state_index_.find(key);
  if (it != state_index_.end()) return it->second;
  State id = static_cast<State>(states_.size());
  states_.push_back(q);
  state_index_.emplace(key, id);
  return id;
}

GameAutomaton::State GameAutomaton::initial() {
  std::lock_guard<std::mutex> lk(mu_);
  QData q{intern_tv(tv_initial(game_)), intern_rs(s_states_, s_index_, rule_initial(*cp_s_)),
          intern_rs(d_states_, d_index_, rule_initial(*cp_d_))};
  return intern_state(q);
}

GameAutomaton::State GameAutomaton::next(State s, const Symbol& sym) {
  std::string key = sym.encode();
  std::lock_guard<std::mutex> lk(mu_);
  auto it = trans_.find({s, key});
  if (it != trans_.end()) return it->second;
  const QData q = states_[s];
  QData n;
  n.tv = intern_tv(tv_transition(game_, tv_states_[q.tv], sym));
  n.s = intern_rs(s_states_, s_index_, rule_transition(*cp_s_, s_states_[q.s], sym, &stats_));
  n.d = intern_rs(d_states_, d_index_, rule_transition(*cp_d_, d_states_[q.d], sym, &stats_));
  State id = intern_state(n);
  trans_.emplace(std::make_pair(s, key), id);
  return id;
}

bool GameAutomaton::pruned_out(const Game& g, const Symbol& sym) {
  if (sym.delta <= 1) return false;
  for (const Action& a : sym.actions)
    if (a.kind == ActionKind::End &&
        g.variables[a.var].tags[a.value] == Controllability::Controllable)
      return true;
  return false;
}

std::optional<GameAutomaton::State> GameAutomaton::next_pruned(State s, const Symbol& sym) {
  if (pruned_out(game_, sym)) return std::nullopt;
  return next(s, sym);
}

bool GameAutomaton::acc_s(State s) {
  const QData q = states_[s];
  return tv_accepting(tv_states_[q.tv], TvAcceptance::Strict) && rule_accepting(s_states_[q.s]);
}

bool GameAutomaton::acc_d(State s) {
  const QData q = states_[s];
  return tv_accepting(tv_states_[q.tv], TvAcceptance::Tolerant) &&
         rule_accepting(d_states_[q.d]);
}

const TvState& GameAutomaton::tv(State s) const { return tv_states_[states_[s].tv]; }
const RuleState& GameAutomaton::rules_s(State s) const { return s_states_[states_[s].s]; }
const RuleState& GameAutomaton::rules_d(State s) const { return d_states_[states_[s].d]; }

namespace {

// Per-variable move options inside one event.
struct VarOption {
  ValId end_value = -1;    // -1: no end
  ValId start_value = -1;  // -1: no start
};

void cross_product(const std::vector<std::vector<VarOption>>& opts, std::size_t i,
                   std::vector<VarOption>& pick,
                   const std::function<void(const std::vector<VarOption>&)>& fn) {
  if (i == opts.size()) {
    fn(pick);
    return;
  }
  for (const auto& o : opts[i]) {
    pick[i] = o;
    cross_product(opts, i + 1, pick, fn);
  }
}

}  // namespace

std::vector<Symbol> GameAutomaton::legal_events(State s, bool prune_controllable_ends) {
  const TvState& tv = tv_states_[states_[s].tv];
  std::vector<Symbol> out;
  if (tv.sink) return out;
  const std::size_t n = game_.var_count();
  if (n == 0) return out;

  if (tv.first_pending) {
    // first event: one start per declared variable, delta encoded as 1
    std::vector<std::vector<VarOption>> opts(n);
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t val = 0; val < game_.variables[v].values.size(); ++val)
        opts[v].push_back({-1, static_cast<ValId>(val)});
    for (const auto& o : opts)
      if (o.empty()) return out;  // a variable with no values: no legal start
    std::vector<VarOption> pick(n);
    cross_product(opts, 0, pick, [&](const std::vector<VarOption>& p) {
      Symbol sym;
      sym.delta = 1;
      for (std::size_t v = 0; v < n; ++v)
        sym.actions.push_back({ActionKind::Start, static_cast<VarId>(v), p[v].start_value});
      std::sort(sym.actions.begin(), sym.actions.end());
      out.push_back(std::move(sym));
    });
    std::sort(out.begin(), out.end());
    return out;
  }

  // positions with a closed variable are terminal (any further event would
  // retroactively violate the no-gaps conditions)
  for (const auto& vs : tv.vars)
    if (vs.kind != TvVarState::Kind::Open) return out;

  for (std::uint32_t delta = 1; delta <= alphabet_.d; ++delta) {
    // all-open-preserving events: per variable idle or switch
    std::vector<std::vector<VarOption>> opts(n);
    bool viable = true;
    bool full_close_ok = true;
    for (std::size_t v = 0; v < n; ++v) {
      const auto& vs = tv.vars[v];
      const auto& sv = game_.variables[v];
      const Duration& dur = sv.durations[vs.value];
      std::uint64_t reached = static_cast<std::uint64_t>(vs.elapsed) + delta;
      bool can_idle = dur.unbounded() || reached + 1 <= dur.dmax;
      bool can_end = reached >= dur.dmin && (dur.unbounded() || reached <= dur.dmax);
      if (can_idle) opts[v].push_back({-1, -1});
      if (can_end)
        for (ValId succ : sv.transitions[vs.value]) opts[v].push_back({vs.value, succ});
      if (!can_end) full_close_ok = false;
      if (opts[v].empty()) viable = false;
    }
    if (viable) {
      std::vector<VarOption> pick(n);
      cross_product(opts, 0, pick, [&](const std::vector<VarOption>& p) {
        Symbol sym;
        sym.delta = delta;
        for (std::size_t v = 0; v < n; ++v) {
          if (p[v].end_value >= 0)
            sym.actions.push_back({ActionKind::End, static_cast<VarId>(v), p[v].end_value});
          if (p[v].start_value >= 0)
            sym.actions.push_back({ActionKind::Start, static_cast<VarId>(v), p[v].start_value});
        }
        std::sort(sym.actions.begin(), sym.actions.end());
        if (prune_controllable_ends && pruned_out(game_, sym)) return;
        out.push_back(std::move(sym));
      });
    }
    if (full_close_ok) {
      Symbol sym;
      sym.delta = delta;
      for (std::size_t v = 0; v < n; ++v)
        sym.actions.push_back({ActionKind::End, static_cast<VarId>(v), tv.vars[v].value});
      std::sort(sym.actions.begin(), sym.actions.end());
      if (!(prune_controllable_ends && pruned_out(game_, sym))) out.push_back(std::move(sym));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string GameAutomaton::label(State s) {
  const QData q = states_[s];
  const TvState& tv = tv_states_[q.tv];
  const RuleState& rs = s_states_[q.s];
  const RuleState& rd = d_states_[q.d];
  std::ostringstream os;
  if (tv.sink)
    os << "tv=sink";
  else
    for (std::size_t v = 0; v < tv.vars.size(); ++v) {
      const auto& vs = tv.vars[v];
      if (v) os << ",";
      switch (vs.kind) {
        case TvVarState::Kind::NotStarted:
          os << "-";
          break;
        case TvVarState::Kind::Open:
          os << game_.variables[v].values[vs.value] << "@" << vs.elapsed;
          break;
        case TvVarState::Kind::Closed:
          os << game_.variables[v].values[vs.value] << "!";
          break;
      }
    }
  auto rs_label = [](const RuleState& r) {
    if (r.sink) return std::string("bot");
    std::size_t promoted = 0;
    for (const auto& c : r.clusters) promoted += c.structs.size();
    return "|Y|=" + std::to_string(r.upsilon.size()) + " D:" + std::to_string(r.clusters.size()) +
           "/" + std::to_string(promoted);
  };
  os << "\\nS: " << rs_label(rs) << "\\nD: " << rs_label(rd);
  if (accepting(s)) os << "\\nACC";
  return os.str();
}

ExploreStats explore(GameAutomaton& a, std::size_t max_states) {
  ExploreStats es;
  std::vector<GameAutomaton::State> frontier{a.initial()};
  std::set<GameAutomaton::State> seen{frontier.front()};
  while (!frontier.empty()) {
    GameAutomaton::State s = frontier.back();
    frontier.pop_back();
    for (const Symbol& sym : a.legal_events(s, false)) {
      GameAutomaton::State t = a.next(s, sym);
      ++es.transitions;
      if (seen.insert(t).second) {
        if (seen.size() > max_states) {
          es.budget_exceeded = true;
          es.states = seen.size();
          return es;
        }
        frontier.push_back(t);
      }
    }
  }
  es.states = seen.size();
  return es;
}

std::string automaton_dot(GameAutomaton& a, std::size_t max_states) {
  std::ostringstream os;
  os << "digraph automaton {\n  rankdir=LR;\n  node [shape=ellipse];\n";
  std::vector<GameAutomaton::State> frontier{a.initial()};
  std::set<GameAutomaton::State> seen{frontier.front()};
  std::vector<std::string> edges;
  while (!frontier.empty() && seen.size() <= max_states) {
    GameAutomaton::State s = frontier.back();
    frontier.pop_back();
    for (const Symbol& sym : a.legal_events(s, false)) {
      GameAutomaton::State t = a.next(s, sym);
      std::string lbl;
      for (const auto& act : sym.actions) {
        if (!lbl.empty()) lbl += ",";
        lbl += action_to_string(a.game(), act);
      }
      edges.push_back("  q" + std::to_string(s) + " -> q" + std::to_string(t) + " [label=\"{" +
                      lbl + "}," + std::to_string(sym.delta) + "\"];");
      if (seen.size() < max_states && seen.insert(t).second) frontier.push_back(t);
    }
  }
  for (GameAutomaton::State s : seen) {
    os << "  q" << s << " [label=\"" << a.label(s) << "\""
       << (a.accepting(s) ? ", peripheries=2" : "") << "];\n";
  }
  for (const auto& e : edges) os << e << "\n";
  os << "}\n";
  return os.str();
}

}  // namespace tgs
