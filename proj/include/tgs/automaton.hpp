#pragma once

// The deterministic automata of the construction: the variable-discipline
// automaton TV_P, the synchronization-rule automaton S_P over <Upsilon,
// Delta, Phi> states, a small lazy DFA algebra (product, union, complement),
// and the game automaton A_G = complement(A_D) ∪ A_S used as the arena core.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tgs/dbm.hpp"
#include "tgs/model.hpp"

namespace tgs {

// --- alphabet -----------------------------------------------------------------

struct Symbol {
  std::vector<Action> actions;  // sorted
  std::uint32_t delta = 1;      // in [1, d]

  std::string encode() const;
  bool operator==(const Symbol&) const = default;
  bool operator<(const Symbol& o) const {
    return std::tie(delta, actions) < std::tie(o.delta, o.actions);
  }
};

struct AlphabetDesc {
  std::vector<Action> actions;  // sorted, all actions of the game
  std::uint32_t d = 1;
  bool operator==(const AlphabetDesc&) const = default;
};

// Event-sequence encoding: the first event's stored delay 0 becomes delta 1.
std::vector<Symbol> encode_sequence(const EventSequence& seq);

// --- TV automaton ---------------------------------------------------------------

struct TvVarState {
  enum class Kind : std::uint8_t { NotStarted, Open, Closed };
  Kind kind = Kind::NotStarted;
  ValId value = -1;       // Open: current value; Closed: last value
  std::uint32_t elapsed = 0;  // Open only; saturates (dmax finite: dmax+1, else dmin)
  bool operator==(const TvVarState&) const = default;
};

struct TvState {
  bool sink = false;
  bool first_pending = true;  // true before the first symbol is read
  std::vector<TvVarState> vars;
  std::string encode() const;
  bool operator==(const TvState&) const = default;
};

TvState tv_initial(const Game& g);
TvState tv_transition(const Game& g, const TvState& s, const Symbol& sym);

enum class TvAcceptance {
  Strict,    // no violation, every variable completed and closed
  Tolerant,  // no violation so far (open / never-started variables fine)
};

bool tv_accepting(const TvState& s, TvAcceptance mode);

// --- compiled problems and the rule automaton -----------------------------------

struct CompiledProblem {
  std::vector<Rule> rules;  // triggered rules only (desugar first)
  std::vector<CompiledStatement> statements;         // all, feasibility flagged
  std::vector<std::vector<int>> statements_of_rule;  // per rule, statement ids
  std::uint64_t window = 1;
  std::uint32_t d = 1;
};

// Compiles the selected rule set of a (desugared) game; throws on triggerless
// rules. d_override, when nonzero, widens the alphabet bound (used to give
// A_S and A_D one common alphabet).
CompiledProblem compile_problem(const Game& g, RuleSelection sel,
                                std::uint32_t d_override = 0);

// One pending promoted obligation: the frontier of matching structures of a
// single rule-trigger occurrence whose age crossed the window.
struct ObligationCluster {
  int rule = -1;
  std::vector<MatchingStructure> structs;  // sorted by encoding, unique
  bool operator==(const ObligationCluster&) const = default;
};

struct RuleState {
  bool sink = false;
  std::vector<MatchingStructure> upsilon;  // sorted by encoding, unique
  std::vector<ObligationCluster> clusters;

  std::string encode() const;
  bool operator==(const RuleState&) const = default;

  // Views matching the paper's state shape: Delta(E) and Phi(E).
  std::vector<MatchingStructure> delta(int stmt) const;
  std::set<int> phi(const CompiledProblem& cp, int stmt) const;
};

struct RuleStepStats {
  std::uint64_t promotions = 0;
  std::uint64_t multi_promotions = 0;  // >1 group of one rule promoted in a step
  std::uint64_t group_dooms = 0;       // in-window group with empty step
  std::uint64_t cluster_dooms = 0;     // promoted cluster with empty step
  std::uint64_t capture_failures = 0;  // trigger occurred, no structure captured it
};

RuleState rule_initial(const CompiledProblem& cp);
RuleState rule_transition(const CompiledProblem& cp, const RuleState& q, const Symbol& sym,
                          RuleStepStats* stats = nullptr);
bool rule_accepting(const RuleState& q);

// --- lazy DFA algebra ------------------------------------------------------------

class Dfa {
 public:
  using State = std::uint32_t;
  virtual ~Dfa() = default;
  virtual State initial() = 0;
  virtual State next(State s, const Symbol& sym) = 0;
  virtual bool accepting(State s) = 0;
  virtual const AlphabetDesc& alphabet() const = 0;
  virtual std::string label(State s);
  virtual std::size_t explored_states() const = 0;
};

std::shared_ptr<Dfa> make_tv_dfa(const Game& g, TvAcceptance mode, AlphabetDesc alphabet);
std::shared_ptr<Dfa> make_rule_dfa(const Game& g, std::shared_ptr<const CompiledProblem> cp,
                                   AlphabetDesc alphabet);

enum class CombineOp { ProductIntersection, ProductUnion, Complement };

// Standard lazy operations on complete DFAs; throws std::invalid_argument on
// alphabet mismatch or a wrong argument count (complement takes exactly one).
std::shared_ptr<Dfa> combine(CombineOp op, std::vector<std::shared_ptr<Dfa>> args);

// Runs the encoded word; requires gaps <= d (normalize first) and throws
// std::out_of_range on a symbol with delta > d.
bool accepts(Dfa& a, const EventSequence& seq);

// --- the game automaton A_G --------------------------------------------------------

// Product state over one shared TV component and the two rule components.
// Acceptance: A_G = complement(A_D) ∪ A_S with A_S = TV(strict) ∩ S-rules and
// A_D = TV(tolerant) ∩ D-rules.
class GameAutomaton {
 public:
  using State = std::uint32_t;

  explicit GameAutomaton(Game desugared);

  State initial();
  State next(State s, const Symbol& sym);
  // A_G': undefined when delta > 1 and the event carries an end action of a
  // controllable value (an action playable by Charlie).
  std::optional<State> next_pruned(State s, const Symbol& sym);
  static bool pruned_out(const Game& g, const Symbol& sym);

  bool acc_s(State s);
  bool acc_d(State s);
  bool accepting(State s) { return !acc_d(s) || acc_s(s); }

  const TvState& tv(State s) const;
  const RuleState& rules_s(State s) const;
  const RuleState& rules_d(State s) const;

  // Arena-legal events from a state: complete events keeping the partial plan
  // a prefix of a well-formed plan (see ledger). Sorted canonically.
  std::vector<Symbol> legal_events(State s, bool prune_controllable_ends);

  const Game& game() const { return game_; }
  const AlphabetDesc& alphabet() const { return alphabet_; }
  std::uint32_t d() const { return alphabet_.d; }
  std::uint64_t window_s() const { return cp_s_->window; }
  std::uint64_t window_d() const { return cp_d_->window; }
  const RuleStepStats& step_stats() const { return stats_; }
  std::size_t explored_states() const { return states_.size(); }
  std::string label(State s);

  std::shared_ptr<const CompiledProblem> compiled_s() const { return cp_s_; }
  std::shared_ptr<const CompiledProblem> compiled_d() const { return cp_d_; }

 private:
  struct QData {
    std::uint32_t tv, s, d;
  };
  std::uint32_t intern_tv(const TvState& t);
  std::uint32_t intern_rs(std::vector<RuleState>& store, std::map<std::string, std::uint32_t>& ix,
                          const RuleState& r);
  State intern_state(const QData& q);

  Game game_;
  AlphabetDesc alphabet_;
  std::shared_ptr<const CompiledProblem> cp_s_, cp_d_;
  RuleStepStats stats_;

  std::vector<TvState> tv_states_;
  std::map<std::string, std::uint32_t> tv_index_;
  std::vector<RuleState> s_states_, d_states_;
  std::map<std::string, std::uint32_t> s_index_, d_index_;
  std::vector<QData> states_;
  std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>, State> state_index_;
  std::map<std::pair<State, std::string>, State> trans_;
  std::mutex mu_;
};

// BFS over legal events (unpruned); stops at max_states.
struct ExploreStats {
  std::size_t states = 0;
  std::size_t transitions = 0;
  bool budget_exceeded = false;
};
ExploreStats explore(GameAutomaton& a, std::size_t max_states);
std::string automaton_dot(GameAutomaton& a, std::size_t max_states);

}  // namespace tgs
