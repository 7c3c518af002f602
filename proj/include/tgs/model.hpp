#pragma once

// Core domain model for timeline-based games: state variables, events,
// event sequences, synchronization rules, moves and rounds.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tgs {

using VarId = int;
using ValId = int;

inline constexpr std::uint32_t kInfDuration = UINT32_MAX;

struct Duration {
  std::uint32_t dmin = 1;
  std::uint32_t dmax = kInfDuration;  // kInfDuration means +inf

  bool unbounded() const { return dmax == kInfDuration; }
  bool operator==(const Duration&) const = default;
};

enum class Controllability : std::uint8_t { Controllable, Uncontrollable };

struct StateVariable {
  std::string name;
  std::vector<std::string> values;                  // V_x
  std::vector<std::vector<ValId>> transitions;      // T_x, per value, sorted
  std::vector<Duration> durations;                  // D_x, per value
  std::vector<Controllability> tags;                // gamma, per value

  std::optional<ValId> value_id(const std::string& v) const;
};

enum class ActionKind : std::uint8_t { Start, End };

struct Action {
  ActionKind kind;
  VarId var;
  ValId value;

  auto operator<=>(const Action&) const = default;
};

struct Event {
  std::vector<Action> actions;  // kept sorted, unique
  std::uint32_t delay = 0;      // delta; first event of a sequence carries 0

  void sort_actions();
  bool operator==(const Event&) const = default;
};

// Ordered list of events. The first event stores delay 0 (Def. "Outcome of
// rounds" seeds the play with (∅,0)); encoders to the automaton alphabet
// substitute delay 1 for it.
struct EventSequence {
  std::vector<Event> events;

  bool empty() const { return events.empty(); }
  std::size_t size() const { return events.size(); }
  bool operator==(const EventSequence&) const = default;
};

enum class Openness : std::uint8_t { Closed, OpenLeft, OpenRight, OpenBoth };

// Synchronization rules.

enum class TermEndpoint : std::uint8_t { Start, End };

struct Term {
  TermEndpoint endpoint;
  std::string token;  // token name (trigger or quantifier)

  auto operator<=>(const Term&) const = default;
};

struct Atom {
  Term lhs, rhs;
  std::uint32_t lower = 0;
  std::uint32_t upper = kInfDuration;  // kInfDuration means +inf

  bool upper_unbounded() const { return upper == kInfDuration; }
  bool operator==(const Atom&) const = default;
};

struct Quantifier {
  std::string token;
  VarId var;
  ValId value;
  bool operator==(const Quantifier&) const = default;
};

struct ExistentialStatement {
  std::vector<Quantifier> quantifiers;  // not including the trigger
  std::vector<Atom> clause;
  bool operator==(const ExistentialStatement&) const = default;
};

enum class RuleKind : std::uint8_t { System, Domain };
enum class RuleSelection { System, Domain, Both };

struct Rule {
  RuleKind kind = RuleKind::System;
  std::string name;
  bool triggerless = false;       // goal rule, before desugaring
  std::string trigger_token;      // a0 (unset when triggerless)
  VarId trigger_var = -1;
  ValId trigger_value = -1;
  std::vector<ExistentialStatement> statements;
};

struct Game {
  std::vector<StateVariable> variables;  // SV_C ∪ SV_E
  std::vector<bool> controlled;          // per variable: SV_C membership
  std::vector<Rule> system_rules;
  std::vector<Rule> domain_rules;

  std::optional<VarId> var_id(const std::string& name) const;
  const StateVariable& var(VarId v) const { return variables[v]; }
  std::size_t var_count() const { return variables.size(); }
  bool has_triggerless() const;
  std::vector<Action> all_actions() const;  // sorted
};

// --- event sequence queries -------------------------------------------------

struct ValidityReport {
  bool ok = true;
  int condition = 0;       // Def. 2 condition (1..4), 0 when ok or shape error
  VarId var = -1;
  std::size_t event_index = 0;  // 1-based
  std::string message;
};

// Checks Def. 2 conditions 1-4 plus per-event action-set shape (at most one
// start and one end per variable). Values of end actions must match the open
// token (condition 2 covers re-ends and mismatched ends).
ValidityReport validate_event_sequence(const EventSequence& seq,
                                       const std::vector<StateVariable>& vars);

Openness openness(const EventSequence& seq, VarId var);
bool open_for_all(const EventSequence& seq, std::size_t var_count);
bool closed_for_all(const EventSequence& seq, std::size_t var_count);

// Sum of delays over events i+1..j (1-based, i <= j). Throws std::out_of_range.
std::uint64_t elapsed(const EventSequence& seq, std::size_t i, std::size_t j);
std::uint64_t total_duration(const EventSequence& seq);

// Absolute time of each event (prefix sums of delays).
std::vector<std::uint64_t> event_times(const EventSequence& seq);

// --- player actions, moves, rounds ------------------------------------------

struct ActionPartition {
  std::vector<Action> charlie;  // sorted
  std::vector<Action> eve;      // sorted
};

ActionPartition partition_actions(const Game& g);
bool charlie_action(const Game& g, const Action& a);

enum class MoveKind : std::uint8_t { Play, PlayTimed, Wait };

struct Move {
  MoveKind kind = MoveKind::Play;
  std::uint32_t delta = 0;         // Wait / PlayTimed
  std::vector<Action> actions;     // sorted; empty allowed for Eve

  bool starting(const Game& g) const;  // all-start (wait counts as ending)
  bool operator==(const Move&) const = default;
};

Move make_play(std::vector<Action> actions);
Move make_play_timed(std::uint32_t delta, std::vector<Action> actions);
Move make_wait(std::uint32_t delta);

struct Round {
  Move charlie;
  Move eve;
};

// Validates Def. "Moves" and Def. "Round"; returns an error message on
// failure.
std::optional<std::string> check_round(const Game& g, const Round& r);

struct RoundOutcome {
  bool applicable = false;
  std::string reason;         // violated clause when not applicable
  EventSequence result;
};

RoundOutcome apply_round(const Game& g, const EventSequence& seq, const Round& r);

// --- gap normalization --------------------------------------------------------

// Splits every delay > d by inserting empty events; elapsed() between original
// events is preserved. Throws std::invalid_argument when d < 1.
EventSequence normalize_gaps(const EventSequence& seq, std::uint32_t d);
// Removes empty non-first events, merging their delay into the successor.
EventSequence denormalize_gaps(const EventSequence& seq);

// --- misc ---------------------------------------------------------------------

std::string action_to_string(const Game& g, const Action& a);
std::string event_to_string(const Game& g, const Event& e);
std::string move_to_string(const Game& g, const Move& m);
// Canonical byte encoding of a move; lexicographic order on it is the solver's
// tie-break order.
std::string move_encoding(const Move& m);

}  // namespace tgs
