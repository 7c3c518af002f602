#pragma once

// Difference bound matrices and matching structures: compilation of
// existential statements, time shifting, admissibility and I-match successor
// enumeration (the step relation of the rule automaton).

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "tgs/model.hpp"

namespace tgs {

// Entry value: upper bound on term difference, +inf when unconstrained.
inline constexpr std::int64_t kDbmInf = std::numeric_limits<std::int64_t>::max();

// D[t][t'] is the tightest known upper bound on time(t) - time(t').
class Dbm {
 public:
  Dbm() = default;
  explicit Dbm(int terms) : n_(terms), e_(static_cast<std::size_t>(terms) * terms, kDbmInf) {
    for (int i = 0; i < terms; ++i) set(i, i, 0);
  }

  int terms() const { return n_; }
  std::int64_t at(int t, int u) const { return e_[static_cast<std::size_t>(t) * n_ + u]; }
  void set(int t, int u, std::int64_t v) { e_[static_cast<std::size_t>(t) * n_ + u] = v; }
  // Keeps the tighter (smaller) of the current entry and v.
  void tighten(int t, int u, std::int64_t v) {
    auto& e = e_[static_cast<std::size_t>(t) * n_ + u];
    if (v < e) e = v;
  }
  bool operator==(const Dbm&) const = default;

 private:
  int n_ = 0;
  std::vector<std::int64_t> e_;
};

// Term indices inside a statement: slot 0 is the trigger a0, slots 1..m the
// statement's quantifiers; term 2*slot = start(a_slot), 2*slot+1 = end(a_slot).
inline int start_term(int slot) { return 2 * slot; }
inline int end_term(int slot) { return 2 * slot + 1; }

struct MatchingStructure {
  int stmt = -1;           // compiled-statement id (problem scope)
  Dbm dbm;
  std::uint32_t matched = 0;  // bitmask over term indices (M)
  std::uint32_t age = 0;      // t, capped at window(P)

  bool is_matched(int term) const { return (matched >> term) & 1u; }
  bool closed() const { return matched + 1 == (1u << dbm.terms()); }
  bool initial() const { return matched == 0; }
  bool active() const { return !closed() && is_matched(start_term(0)); }
  bool operator==(const MatchingStructure&) const = default;

  // Canonical bytes for hashing and ordering.
  std::string encode() const;
};

struct CompiledStatement {
  int id = -1;             // global statement index within the compiled problem
  int rule = -1;           // rule index within the problem's rule list
  int index_in_rule = -1;
  std::vector<Quantifier> slots;  // slot 0 = trigger (token name a0)
  Dbm base;
  bool feasible = true;    // pairwise-consistent clause (see ledger)

  int term_count() const { return 2 * static_cast<int>(slots.size()); }
};

using DurationMap = std::map<std::pair<VarId, ValId>, Duration>;

// Compiles one existential statement of a triggered rule into its initial
// matching structure. Every quantified (variable, value) pair of the
// statement must be present in `durations`; a [0, +inf] duration contributes
// no entries. Throws std::invalid_argument on a missing pair.
CompiledStatement compile_statement(const Rule& rule, const ExistentialStatement& st,
                                    const DurationMap& durations);

MatchingStructure initial_structure(const CompiledStatement& cs);

// Product of all finite non-zero upper bounds of atoms in the rules
// (empty product = 1).
std::uint64_t window_of(const std::vector<const Rule*>& rules);

// Alphabet bound d = max(L, U) + 1 over atom bounds in the rules, 1 when no
// atoms exist.
std::uint32_t alphabet_bound(const std::vector<const Rule*>& rules);

// Time shifting (Def. "Time shifting"); age advances only on active
// structures and saturates at `window`.
MatchingStructure shift(const MatchingStructure& m, std::uint32_t delta,
                        std::uint64_t window);

// Admissibility of an event with delay `delta` (Def. "Admissible Event").
bool admissible(const MatchingStructure& m, std::uint32_t delta);

// All I-match successors of m for the event (actions, delta): the returned
// structures are (shift(m, delta)) with M extended by each valid I, in the
// order of increasing I bitmask. Empty when the event is inadmissible.
std::vector<MatchingStructure> match_events(const MatchingStructure& m,
                                            const CompiledStatement& cs,
                                            const std::vector<Action>& actions,
                                            std::uint32_t delta, std::uint64_t window);

// State-space normalization used by the automaton when storing structures:
// matched-row entries toward unmatched columns are clamped to <= 0 (only ever
// read by checks where any value >= 0 behaves the same) and matched-matched
// entries are zeroed (never read again). Keeps the state space finite.
MatchingStructure canonicalize(const MatchingStructure& m);

// Matrix table in the layout of the paper's figure (rows = terms, columns =
// terms, entry = D[row][col]); missing entries printed as ".".
std::string dump_matrix(const MatchingStructure& m, const CompiledStatement& cs);

}  // namespace tgs
