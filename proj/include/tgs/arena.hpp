#pragma once

// The two-player arena A_G^a: every event transition of the pruned automaton
// A_G' split into the four per-player moves, with intermediate states keyed by
// (source state, phase, accumulated choices).

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tgs/automaton.hpp"
#include "tgs/model.hpp"

namespace tgs {

enum class Player : std::uint8_t { Charlie, Eve };

enum class ArenaPhase : std::uint8_t {
  Base,          // complete-event position (automaton state)
  AfterCEnd,     // delta=1 chain: Charlie played his ending set
  AfterEEnd,     // delta=1 chain: Eve played her ending set
  AfterCStart,   // delta=1 chain: Charlie played his starting set
  AfterWait,     // delta>1 chain: Charlie played wait(delta_C)
  AfterETimedEnd,   // delta>1 chain: Eve played play(delta, ends)
  AfterCStartInWait // delta>1 chain: Charlie played his starting set
};

struct ArenaNode {
  ArenaPhase phase = ArenaPhase::Base;
  GameAutomaton::State base = 0;   // underlying A_G' source (Base: the state itself)
  std::uint32_t delta = 0;         // AfterWait: delta_C; timed phases: event delta
  std::vector<Action> acc_ends;    // accumulated ending actions
  std::vector<Action> acc_starts;  // accumulated starting actions (Charlie's)

  std::string encode() const;
};

class Arena {
 public:
  using NodeId = std::uint32_t;

  struct Limits {
    std::size_t max_states = 500'000;
    std::size_t max_edges = 4'000'000;
    double max_seconds = 0;  // 0 = no time cap
  };

  struct BuildError {
    std::string message;
  };

  // Explores the whole reachable arena; returns an error when a budget cap is
  // exceeded (no partial answer).
  static std::optional<BuildError> build(std::shared_ptr<GameAutomaton> aut, Limits limits,
                                         std::unique_ptr<Arena>& out);

  NodeId initial() const { return initial_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  const ArenaNode& node(NodeId id) const { return nodes_[id]; }
  Player owner(NodeId id) const;
  bool accepting(NodeId id) const { return accepting_[id]; }  // F^a (base only)
  const std::vector<std::pair<Move, NodeId>>& edges(NodeId id) const { return edges_[id]; }

  GameAutomaton& automaton() const { return *aut_; }

  // Deterministic walk by move labels; nullopt with *failed_index set when a
  // move has no edge.
  std::optional<NodeId> read_play(const std::vector<Move>& moves,
                                  std::size_t* failed_index = nullptr) const;

  // The base automaton state reached by reading an event word through base
  // transitions ([Π] in the strategy lift).
  std::optional<NodeId> read_events(const EventSequence& seq) const;

  // Per-node reachability of a D-accepting base state (used by the
  // eve-inadmissible verdict: definite domain violation = not reachable).
  const std::vector<bool>& d_recoverable() const { return d_recoverable_; }

  // Stable structural key of a node (used in strategy files).
  std::uint64_t node_key(NodeId id) const { return keys_[id]; }
  std::optional<NodeId> node_by_key(std::uint64_t key) const;

  std::string dot() const;

 private:
  Arena() = default;
  void compute_d_recoverability();

  std::shared_ptr<GameAutomaton> aut_;
  NodeId initial_ = 0;
  std::vector<ArenaNode> nodes_;
  std::vector<std::vector<std::pair<Move, NodeId>>> edges_;
  std::vector<bool> accepting_;
  std::vector<std::uint64_t> keys_;
  std::map<std::uint64_t, NodeId> by_key_;
  std::map<GameAutomaton::State, NodeId> base_of_;
  std::vector<bool> d_recoverable_;
  std::size_t edge_count_ = 0;
};

// Splits an event's actions into the four construction groups.
struct MoveSplit {
  std::vector<Action> charlie_ends, eve_ends, charlie_starts, eve_starts;
};
MoveSplit split_event(const Game& g, const Symbol& sym);

}  // namespace tgs
