#include <doctest.h>

#include "support/testutil.hpp"
#include "tgs/oracle.hpp"
#include "tgs/parser.hpp"

using namespace tgs;
using namespace tgs::test;

TEST_CASE("satellite rules parse into the expected shapes") {
  Game g = load_fixture("satellite.tg");
  REQUIRE(g.system_rules.size() == 3);  // two rules plus the goal
  const Rule& comm = g.system_rules[0];
  CHECK(comm.name == "comm_synch");
  REQUIRE(comm.statements.size() == 1);
  CHECK(comm.statements[0].quantifiers.size() == 1);
  REQUIRE(comm.statements[0].clause.size() == 2);
  // `<=` is sugar for <=[0, +inf]
  CHECK(comm.statements[0].clause[0].lower == 0);
  CHECK(comm.statements[0].clause[0].upper == kInfDuration);

  const Rule& dl = g.system_rules[1];
  REQUIRE(dl.statements.size() == 1);
  CHECK(dl.statements[0].quantifiers.size() == 3);
  REQUIRE(dl.statements[0].clause.size() == 3);
  // `=` is sugar for <=[0, 0]
  for (const Atom& a : dl.statements[0].clause) {
    CHECK(a.lower == 0);
    CHECK(a.upper == 0);
  }

  CHECK(g.system_rules[2].triggerless);
}

TEST_CASE("empty specification parses to a valid empty game") {
  ParseResult pr = parse_game({"", "<test>"});
  REQUIRE(pr.ok());
  CHECK(pr.game->variables.empty());
  CHECK(pr.game->system_rules.empty());
  CHECK(pr.game->domain_rules.empty());
  CHECK(validate_game(*pr.game).empty());
}

TEST_CASE("undeclared value in a rule yields one positioned error") {
  SpecSource src{R"(
controlled var xs { values Comm; transitions Comm -> Comm; }
system rule r: a[xs = Comm2] => b[xs = Comm] . start(a) <= start(b);
)", "<test>"};
  ParseResult pr = parse_game(src);
  CHECK_FALSE(pr.ok());
  REQUIRE(pr.diagnostics.size() == 1);
  CHECK(pr.diagnostics[0].message.find("Comm2") != std::string::npos);
  CHECK(pr.diagnostics[0].line == 3);
  std::string formatted = format_diagnostic(src, pr.diagnostics[0]);
  CHECK(formatted.find("<test>:3:") == 0);
  CHECK(formatted.find("error:") != std::string::npos);
}

TEST_CASE("parser rejects duplicate token names, bad bounds and bad durations") {
  CHECK_FALSE(parse_game({R"(
controlled var x { values p; }
system rule r: a[x = p] => a[x = p] . start(a) <= end(a);
)", "t"}).ok());
  CHECK_FALSE(parse_game({R"(
controlled var x { values p; }
system rule r: a[x = p] => b[x = p] . start(a) <= [3, 2] end(b);
)", "t"}).ok());
  CHECK_FALSE(parse_game({R"(
controlled var x { values p; duration p [3, 2]; }
)", "t"}).ok());
  CHECK_FALSE(parse_game({R"(
controlled var x { values p; duration p [0, 2]; }
)", "t"}).ok());
  CHECK_FALSE(parse_game({R"(
controlled var x { values p; }
system rule r: a[x = p] => b[x = p] . start(c) <= end(b);
)", "t"}).ok());
}

TEST_CASE("omitted duration defaults to [1, +inf]; uncontrollable flips the tag") {
  Game g = parse_or_die(R"(
controlled var x { values p, q; uncontrollable q; }
)");
  CHECK(g.variables[0].durations[0] == Duration{1, kInfDuration});
  CHECK(g.variables[0].tags[0] == Controllability::Controllable);
  CHECK(g.variables[0].tags[1] == Controllability::Uncontrollable);
}

TEST_CASE("parse-print-parse round trip is structurally identical") {
  for (const char* name : {"satellite.tg", "handover.tg", "single.tg"}) {
    Game g = load_fixture(name);
    std::string printed = pretty_print(g);
    Game g2 = parse_or_die(printed);
    CHECK(pretty_print(g2) == printed);
    CHECK(validate_game(g2).empty());
    // spot structural equality beyond the printer
    REQUIRE(g2.variables.size() == g.variables.size());
    for (std::size_t v = 0; v < g.variables.size(); ++v) {
      CHECK(g2.variables[v].values == g.variables[v].values);
      CHECK(g2.variables[v].transitions == g.variables[v].transitions);
      CHECK(g2.variables[v].durations == g.variables[v].durations);
      CHECK(g2.variables[v].tags == g.variables[v].tags);
    }
    CHECK(g2.system_rules.size() == g.system_rules.size());
    CHECK(g2.domain_rules.size() == g.domain_rules.size());
  }
}

TEST_CASE("desugar_goals: identity without triggerless rules, idempotent otherwise") {
  Game plain = load_fixture("handover.tg");
  Game d1 = desugar_goals(plain);
  CHECK(pretty_print(d1) == pretty_print(plain));

  Game sat = load_fixture("satellite.tg");
  Game d = desugar_goals(sat);
  CHECK_FALSE(d.has_triggerless());
  REQUIRE(d.var_count() == sat.var_count() + 1);
  const StateVariable& gv = d.variables.back();
  CHECK(gv.values.size() == 1);
  CHECK(gv.transitions[0] == std::vector<ValId>{0});
  CHECK(gv.durations[0] == Duration{1, kInfDuration});
  CHECK(gv.tags[0] == Controllability::Controllable);
  CHECK(d.controlled.back());
  // the goal rule now triggers on the fresh variable's only value
  const Rule& goal = d.system_rules.back();
  CHECK_FALSE(goal.triggerless);
  CHECK(goal.trigger_var == static_cast<VarId>(d.var_count() - 1));
  CHECK(goal.statements == sat.system_rules.back().statements);
  CHECK(pretty_print(desugar_goals(d)) == pretty_print(d));
}

TEST_CASE("desugar_goals: two triggerless rules share one fresh variable") {
  Game g = parse_or_die(R"(
controlled var x { values p, q; transitions p -> q; transitions q -> p; }
goal: a[x = p];
goal: a[x = q];
)");
  Game d = desugar_goals(g);
  CHECK(d.var_count() == 2);
  const Rule& g1 = d.system_rules[0];
  const Rule& g2 = d.system_rules[1];
  CHECK(g1.trigger_var == g2.trigger_var);
  CHECK(g1.trigger_var == 1);
}

TEST_CASE("desugar_goals preserves solution plans at desk scale") {
  // the oracle evaluates the triggerless original directly; the desugared
  // game is checked on the canonical extension (one goal token spanning the
  // whole plan), per the translation's equivalence argument
  Game g = parse_or_die(R"(
controlled var x { values p, q; transitions p -> q, p; transitions q -> p, q;
                   duration p [1, 3]; duration q [1, 3]; }
goal: a[x = q];
goal: b[x = p] c[x = q] . end(b) <= start(c);
)");
  Game d = desugar_goals(g);
  VarId gv = static_cast<VarId>(d.var_count() - 1);
  EnumLimits lim;
  lim.max_events = 4;
  lim.max_delta = 3;
  int checked = 0, mismatches = 0;
  enumerate_closed_sequences(g.variables, lim, [&](const EventSequence& seq) {
    EventSequence ext = seq;
    ext.events.front().actions.push_back({ActionKind::Start, gv, 0});
    ext.events.front().sort_actions();
    ext.events.back().actions.push_back({ActionKind::End, gv, 0});
    ext.events.back().sort_actions();
    bool orig = is_solution(g, seq, RuleSelection::Both, true).solution;
    bool desugared = is_solution(d, ext, RuleSelection::Both, true).solution;
    ++checked;
    if (orig != desugared) ++mismatches;
    return true;
  });
  CHECK(checked > 100);
  CHECK(mismatches == 0);
}
