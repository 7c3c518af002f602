#pragma once

// Reachability-game solving on the arena: attractor fixpoint, winning region,
// positional strategy, the end-to-end synthesis pipeline and play simulation.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tgs/arena.hpp"

namespace tgs {

inline constexpr std::uint32_t kNoLevel = UINT32_MAX;

struct AttractorResult {
  std::vector<std::uint32_t> level;  // kNoLevel = outside W_C
  std::uint32_t stationary_index = 0;

  bool in_wc(Arena::NodeId n) const { return level[n] != kNoLevel; }
};

// Backward worklist with remaining-successor counters for Eve nodes,
// processed in waves so levels are exact attractor ranks.
AttractorResult attractor(const Arena& arena);
// Naive rescanning fixpoint, kept as a reference for differential testing.
AttractorResult attractor_naive(const Arena& arena);

struct Strategy {
  std::map<Arena::NodeId, Move> moves;  // Charlie nodes in W_C \ F^a
  AttractorResult attr;
  std::uint64_t game_hash = 0;
  std::uint32_t d = 1;
  std::uint64_t window_s = 1, window_d = 1;
};

// Requires q0 in W_C; tie-break: minimal successor level, then smallest
// canonical move encoding.
std::optional<Strategy> positional_strategy(const Arena& arena, const AttractorResult& attr);

std::uint64_t game_hash(const Game& g);

enum class SynthesisVerdict { CharlieWins, EveWins, BudgetExceeded };

struct SynthesisResult {
  SynthesisVerdict verdict = SynthesisVerdict::BudgetExceeded;
  std::string message;
  std::optional<Strategy> strategy;
  std::shared_ptr<GameAutomaton> automaton;
  std::unique_ptr<Arena> arena;
};

// Full pipeline: desugar -> A_S, A_D -> A_G -> prune -> arena -> attractor ->
// strategy. The input game may still contain triggerless rules.
SynthesisResult synthesize(const Game& g, Arena::Limits limits = {});

enum class SimVerdict { Success, AdmissibleButUnfinished, EveInadmissible, CharlieStuck,
                        ScriptedMoveInapplicable };

struct EvePolicy {
  enum class Kind { Scripted, Random, Interactive } kind = Kind::Random;
  std::vector<Move> script;
  std::uint64_t seed = 0;
};

struct SimRound {
  Move charlie;
  Move eve;
};

struct SimResult {
  SimVerdict verdict = SimVerdict::AdmissibleButUnfinished;
  std::string message;
  std::vector<SimRound> rounds;
  EventSequence outcome;
  std::size_t rounds_played = 0;
};

// Alternates strategy moves and Eve moves on the arena cursor; success when
// the cursor enters F^a. `horizon` counts rounds (one Charlie move plus one
// Eve move). Interactive policies read numbered choices from `in` and print
// to `out`.
SimResult simulate(const Arena& arena, const Strategy& strategy, const EvePolicy& policy,
                   std::size_t horizon, std::istream* in = nullptr,
                   std::ostream* out = nullptr);

}  // namespace tgs
