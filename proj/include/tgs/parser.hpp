#pragma once

// Textual .tg specification language: parsing, diagnostics, pretty-printing
// and desugaring of triggerless goal rules.

#include <optional>
#include <string>
#include <vector>

#include "tgs/model.hpp"

namespace tgs {

struct SpecSource {
  std::string text;
  std::string origin = "<stdin>";
};

struct ParseDiagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string message;
  int line = 1;  // 1-based
  int col = 1;
};

struct ParseResult {
  std::optional<Game> game;  // set iff no error diagnostics
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return game.has_value(); }
};

ParseResult parse_game(const SpecSource& src);

// origin:line:col: severity: message
std::string format_diagnostic(const SpecSource& src, const ParseDiagnostic& d);

// Replaces every triggerless rule by a rule triggered on a fresh controlled
// goal variable (one shared variable for all of them). Identity when the game
// has no triggerless rules; idempotent.
Game desugar_goals(const Game& g);

// Canonical textual form; parse(pretty_print(g)) is structurally identical
// to g.
std::string pretty_print(const Game& g);

// Checks all core-model invariants of a parsed/constructed Game; returns
// human-readable violations (empty = valid).
std::vector<std::string> validate_game(const Game& g);

}  // namespace tgs
