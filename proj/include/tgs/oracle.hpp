#pragma once

// Brute-force semantics of synchronization rules over event sequences — the
// independent ground truth the automaton is verified against, and the plan
// validator behind the CLI `validate` subcommand.

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tgs/model.hpp"

namespace tgs {

struct TokenInterval {
  VarId var = -1;
  ValId value = -1;
  std::uint64_t start_time = 0;
  std::uint64_t end_time = 0;
  std::size_t start_index = 0;  // 1-based event indices
  std::size_t end_index = 0;
};

// Maximal start/end pairs per variable, in order. Requires a valid sequence
// closed for every variable; throws std::invalid_argument otherwise.
std::vector<TokenInterval> extract_tokens(const EventSequence& seq,
                                          const std::vector<StateVariable>& vars);

// Completed tokens of a possibly-open sequence (open tail tokens skipped).
std::vector<TokenInterval> extract_completed_tokens(const EventSequence& seq,
                                                    const std::vector<StateVariable>& vars);

using Assignment = std::map<std::string, std::size_t>;  // token name -> token index

struct TriggerWitness {
  std::size_t trigger_token = 0;  // index into the token list
  bool witnessed = false;
  int statement = -1;             // witnessing statement index
  Assignment assignment;
};

struct RuleCheck {
  bool satisfied = true;
  std::vector<TriggerWitness> triggers;
};

// Exhaustive per-trigger assignment search. Quantifiers range over all tokens
// (past and future of the trigger); assignments need not be injective. For a
// triggerless rule there is one virtual trigger obligation.
RuleCheck check_rule(const Game& g, const EventSequence& seq, const Rule& rule);

struct SolutionCheck {
  bool solution = false;
  std::string reason;             // first failure, empty when solution
  const Rule* failing_rule = nullptr;
  std::size_t failing_trigger = 0;  // token index of the unwitnessed trigger
};

// True iff seq is valid, closed, respects every T_x and D_x, mentions every
// variable (when required) and satisfies every selected rule.
SolutionCheck is_solution(const Game& g, const EventSequence& seq,
                          RuleSelection rules = RuleSelection::Both,
                          bool require_every_variable = true);

// Domain innocence of a possibly-open partial plan: every domain-rule trigger
// occurrence so far (open trigger tokens included) is witnessed by an
// assignment over completed tokens. This is the semantic mirror of the
// D-side rule-automaton acceptance used by the arena tests.
bool d_innocent(const Game& g, const EventSequence& seq);

struct EnumLimits {
  std::size_t max_events = 4;
  std::uint32_t max_delta = 3;
  std::uint64_t budget = 20'000'000;  // generated node cap
};

// Yields every valid closed event sequence with 1..max_events events, all
// events non-empty, delays in [1, max_delta] (first event delay 0), each
// exactly once. Stops early when fn returns false. Returns false when the
// budget is exceeded (enumeration aborted).
bool enumerate_closed_sequences(const std::vector<StateVariable>& vars,
                                const EnumLimits& limits,
                                const std::function<bool(const EventSequence&)>& fn);

}  // namespace tgs
