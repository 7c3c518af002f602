#include <doctest.h>

#include <random>

#include "support/testutil.hpp"
#include "tgs/dbm.hpp"
#include "tgs/oracle.hpp"

using namespace tgs;
using namespace tgs::test;

namespace {

// The worked example rule:
//   a0[x0=v0] => exists a1 a2 a3 .
//     start(a1) <=[4,14] end(a0) & end(a0) <=[0,inf] end(a2)
//     & start(a2) <=[0,3] end(a3)
Rule example_rule() {
  Rule r;
  r.name = "example";
  r.trigger_token = "a0";
  r.trigger_var = 0;
  r.trigger_value = 0;
  ExistentialStatement st;
  st.quantifiers.push_back({"a1", 1, 0});
  st.quantifiers.push_back({"a2", 2, 0});
  st.quantifiers.push_back({"a3", 3, 0});
  st.clause.push_back({{TermEndpoint::Start, "a1"}, {TermEndpoint::End, "a0"}, 4, 14});
  st.clause.push_back({{TermEndpoint::End, "a0"}, {TermEndpoint::End, "a2"}, 0, kInfDuration});
  st.clause.push_back({{TermEndpoint::Start, "a2"}, {TermEndpoint::End, "a3"}, 0, 3});
  r.statements.push_back(std::move(st));
  return r;
}

DurationMap vacuous_durations() {
  DurationMap m;
  for (VarId v = 1; v <= 3; ++v) m[{v, 0}] = Duration{0, kInfDuration};
  return m;
}

// term indices: slot order a0,a1,a2,a3; 2k = start, 2k+1 = end
constexpr int s0 = 0, e0 = 1, s1 = 2, e1 = 3, s2 = 4, e2 = 5, s3 = 6, e3 = 7;

}  // namespace

TEST_CASE("compile_statement reproduces the worked DBM entry for entry") {
  Rule r = example_rule();
  CompiledStatement cs = compile_statement(r, r.statements[0], vacuous_durations());
  REQUIRE(cs.term_count() == 8);
  CHECK(cs.feasible);
  const Dbm& d = cs.base;
  CHECK(d.at(s1, e0) == -4);
  CHECK(d.at(e0, s1) == 14);
  CHECK(d.at(e3, s2) == 3);
  CHECK(d.at(s2, e3) == 0);
  CHECK(d.at(e0, e2) == 0);
  for (int t = 0; t < 8; ++t)
    for (int u = 0; u < 8; ++u) {
      if (t == u) {
        CHECK(d.at(t, u) == 0);
      } else if (!((t == s1 && u == e0) || (t == e0 && u == s1) || (t == e3 && u == s2) ||
                   (t == s2 && u == e3) || (t == e0 && u == e2))) {
        CHECK(d.at(t, u) == kDbmInf);
      }
    }
}

TEST_CASE("duration augmentation adds the quantified token bounds") {
  Rule r;
  r.name = "r";
  r.trigger_token = "a0";
  r.trigger_var = 0;
  r.trigger_value = 0;
  ExistentialStatement st;
  st.quantifiers.push_back({"a1", 1, 0});
  r.statements.push_back(st);
  DurationMap m;
  m[{1, 0}] = Duration{1, kInfDuration};
  CompiledStatement cs = compile_statement(r, r.statements[0], m);
  const Dbm& d = cs.base;
  // only entries: diagonal zeros and start(a1) - end(a1) <= -1
  for (int t = 0; t < 4; ++t)
    for (int u = 0; u < 4; ++u) {
      if (t == u)
        CHECK(d.at(t, u) == 0);
      else if (t == 2 && u == 3)
        CHECK(d.at(t, u) == -1);
      else
        CHECK(d.at(t, u) == kDbmInf);
    }
  // finite dmax contributes the opposite entry
  m[{1, 0}] = Duration{2, 5};
  CompiledStatement cs2 = compile_statement(r, r.statements[0], m);
  CHECK(cs2.base.at(2, 3) == -2);
  CHECK(cs2.base.at(3, 2) == 5);
  // a missing duration for a quantified pair is an error
  CHECK_THROWS_AS(compile_statement(r, r.statements[0], DurationMap{}),
                  std::invalid_argument);
}

TEST_CASE("duplicated bounds keep the tighter entry") {
  Rule r;
  r.name = "r";
  r.trigger_token = "a0";
  r.trigger_var = 0;
  r.trigger_value = 0;
  ExistentialStatement st;
  st.quantifiers.push_back({"a1", 1, 0});
  st.clause.push_back({{TermEndpoint::Start, "a0"}, {TermEndpoint::Start, "a1"}, 0, 5});
  st.clause.push_back({{TermEndpoint::Start, "a0"}, {TermEndpoint::Start, "a1"}, 0, 3});
  r.statements.push_back(st);
  DurationMap m;
  m[{1, 0}] = Duration{0, kInfDuration};
  CompiledStatement cs = compile_statement(r, r.statements[0], m);
  CHECK(cs.base.at(2, 0) == 3);
}

TEST_CASE("pairwise-contradictory statements are flagged infeasible") {
  Rule r;
  r.name = "r";
  r.trigger_token = "a0";
  r.trigger_var = 0;
  r.trigger_value = 0;
  ExistentialStatement st;
  st.quantifiers.push_back({"a1", 1, 0});
  // a0 <=[2,3] a1 and a1 <=[0,1] a0 cannot both hold
  st.clause.push_back({{TermEndpoint::Start, "a0"}, {TermEndpoint::Start, "a1"}, 2, 3});
  st.clause.push_back({{TermEndpoint::Start, "a1"}, {TermEndpoint::Start, "a0"}, 0, 1});
  r.statements.push_back(st);
  DurationMap m;
  m[{1, 0}] = Duration{1, kInfDuration};
  CHECK_FALSE(compile_statement(r, r.statements[0], m).feasible);

  // a self-atom with a positive lower bound is infeasible too
  Rule r2 = r;
  r2.statements[0].clause = {{{TermEndpoint::Start, "a0"}, {TermEndpoint::Start, "a0"}, 1, 2}};
  CHECK_FALSE(compile_statement(r2, r2.statements[0], m).feasible);
}

TEST_CASE("window: worked value 42, qualitative 1, simple products") {
  Rule r = example_rule();
  std::vector<const Rule*> rules{&r};
  CHECK(window_of(rules) == 42);
  CHECK(alphabet_bound(rules) == 15);  // max(4, 14) + 1

  Rule q;
  q.trigger_token = "a";
  q.trigger_var = 0;
  q.trigger_value = 0;
  ExistentialStatement st;
  st.quantifiers.push_back({"b", 0, 0});
  st.clause.push_back({{TermEndpoint::Start, "a"}, {TermEndpoint::Start, "b"}, 0, 0});
  st.clause.push_back({{TermEndpoint::Start, "b"}, {TermEndpoint::End, "b"}, 0, kInfDuration});
  q.statements.push_back(st);
  std::vector<const Rule*> qr{&q};
  CHECK(window_of(qr) == 1);
  CHECK(alphabet_bound(qr) == 1);
  CHECK(window_of({}) == 1);
  CHECK(alphabet_bound({}) == 1);

  Rule two = q;
  two.statements[0].clause = {{{TermEndpoint::Start, "a"}, {TermEndpoint::Start, "b"}, 0, 2}};
  Rule three = q;
  three.statements[0].clause = {{{TermEndpoint::Start, "a"}, {TermEndpoint::Start, "b"}, 0, 5},
                                {{TermEndpoint::Start, "b"}, {TermEndpoint::End, "b"}, 0, 3}};
  std::vector<const Rule*> both{&two, &three};
  CHECK(window_of(both) == 30);
}

TEST_CASE("shift: the worked -4 -> -3 update, identity on initial structures") {
  Rule r = example_rule();
  CompiledStatement cs = compile_statement(r, r.statements[0], vacuous_durations());
  MatchingStructure m = initial_structure(cs);
  MatchingStructure shifted0 = shift(m, 5, 42);
  CHECK(shifted0.dbm == m.dbm);
  CHECK(shifted0.age == 0);

  m.matched = 1u << s1;  // M = {start(a1)}
  MatchingStructure s = shift(m, 1, 42);
  CHECK(s.dbm.at(s1, e0) == -3);
  CHECK(s.dbm.at(e0, s1) == 13);
  CHECK(s.age == 0);  // not active: trigger unmatched
}

TEST_CASE("shift composes additively and ages only active structures") {
  Rule r = example_rule();
  CompiledStatement cs = compile_statement(r, r.statements[0], vacuous_durations());
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    MatchingStructure m = initial_structure(cs);
    m.matched = static_cast<std::uint32_t>(rng() % 256);
    m.age = static_cast<std::uint32_t>(rng() % 5);
    MatchingStructure a = shift(shift(m, 2, 42), 3, 42);
    MatchingStructure b = shift(m, 5, 42);
    CHECK(a == b);
    if (m.active()) CHECK(b.age == std::min<std::uint64_t>(m.age + 5, 42));
    else CHECK(b.age == m.age);
  }
}

TEST_CASE("admissibility: the worked bound 14, vacuous initials, monotone in delta") {
  Rule r = example_rule();
  CompiledStatement cs = compile_statement(r, r.statements[0], vacuous_durations());
  MatchingStructure m = initial_structure(cs);
  m.matched = 1u << s1;  // M = {start(a1)}: deadline D[e0,s1] = 14
  CHECK(admissible(m, 14));
  CHECK_FALSE(admissible(m, 15));

  MatchingStructure init = initial_structure(cs);
  CHECK(admissible(init, 1000));

  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) {
    MatchingStructure x = initial_structure(cs);
    x.matched = static_cast<std::uint32_t>(rng() % 256);
    bool prev = true;
    for (std::uint32_t delta = 1; delta <= 20; ++delta) {
      bool now = admissible(x, delta);
      CHECK((prev || !now));  // once inadmissible, stays inadmissible
      prev = now;
    }
  }
}

namespace {

// one variable x with values p, q; rule a0[x=p] => exists a1[x=q]. clause
std::pair<Rule, CompiledStatement> pq_statement(std::uint32_t lower, std::uint32_t upper) {
  Rule r;
  r.name = "r";
  r.trigger_token = "a0";
  r.trigger_var = 0;
  r.trigger_value = 0;
  ExistentialStatement st;
  st.quantifiers.push_back({"a1", 0, 1});
  st.clause.push_back({{TermEndpoint::End, "a0"}, {TermEndpoint::Start, "a1"}, lower, upper});
  r.statements.push_back(st);
  DurationMap m;
  m[{0, 1}] = Duration{1, kInfDuration};
  CompiledStatement cs = compile_statement(r, r.statements[0], m);
  return {r, cs};
}

}  // namespace

TEST_CASE("match_events: optional trigger capture plus the always-present empty match") {
  auto [r, cs] = pq_statement(0, 2);
  MatchingStructure init = initial_structure(cs);
  std::vector<Action> actions{{ActionKind::Start, 0, 0}};
  auto succs = match_events(init, cs, actions, 1, 2);
  REQUIRE(succs.size() == 2);
  CHECK(succs[0].matched == 0);       // empty match: still initial
  CHECK(succs[0].age == 0);
  CHECK(succs[1].matched == 1u);      // start(a0) captured
  CHECK(succs[1].age == 0);
}

TEST_CASE("match_events: clause 1b blocks an end in the same event as its start") {
  auto [r, cs] = pq_statement(0, 2);
  MatchingStructure init = initial_structure(cs);
  std::vector<Action> actions{{ActionKind::Start, 0, 0}, {ActionKind::End, 0, 0}};
  std::sort(actions.begin(), actions.end());
  for (const auto& s : match_events(init, cs, actions, 1, 2))
    CHECK_FALSE(s.is_matched(1));  // end(a0) never matched here

  // but once start(a0) is in M, the end is forced
  MatchingStructure captured = initial_structure(cs);
  captured.matched = 1u;
  std::vector<Action> just_end{{ActionKind::End, 0, 0}};
  auto succs = match_events(captured, cs, just_end, 1, 2);
  REQUIRE_FALSE(succs.empty());
  for (const auto& s : succs) CHECK(s.is_matched(1));
}

TEST_CASE("match_events: inadmissible events yield no successor") {
  auto [r, cs] = pq_statement(0, 2);
  MatchingStructure m = initial_structure(cs);
  m.matched = 0b11;  // trigger token completed; deadline on start(a1) is 2
  CHECK(match_events(m, cs, {}, 3, 2).empty());
}

TEST_CASE("match_events successors differ from the shift only in M") {
  auto [r, cs] = pq_statement(1, 3);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    MatchingStructure m = initial_structure(cs);
    m.matched = static_cast<std::uint32_t>(rng() % 16);
    if (m.is_matched(3) && !m.is_matched(2)) continue;  // end before start: not reachable
    std::vector<Action> actions;
    if (rng() % 2) actions.push_back({ActionKind::Start, 0, 0});
    if (rng() % 2) actions.push_back({ActionKind::Start, 0, 1});
    if (rng() % 2) actions.push_back({ActionKind::End, 0, 0});
    if (rng() % 2) actions.push_back({ActionKind::End, 0, 1});
    std::sort(actions.begin(), actions.end());
    std::uint32_t delta = 1 + static_cast<std::uint32_t>(rng() % 3);
    auto succs = match_events(m, cs, actions, delta, 3);
    std::uint32_t unmatched = static_cast<std::uint32_t>((1u << 4) - 1) & ~m.matched;
    CHECK(succs.size() <= (1u << std::popcount(unmatched)));
    MatchingStructure shifted = shift(m, delta, 3);
    for (const auto& s : succs) {
      CHECK(s.dbm == shifted.dbm);
      CHECK(s.age == shifted.age);
      CHECK((s.matched & m.matched) == m.matched);
    }
  }
}

TEST_CASE("closedness is absorbing under the empty match") {
  auto [r, cs] = pq_statement(0, 2);
  MatchingStructure m = initial_structure(cs);
  m.matched = 0b1111;
  REQUIRE(m.closed());
  auto succs = match_events(m, cs, {}, 1, 2);
  REQUIRE(succs.size() == 1);
  CHECK(succs[0].closed());
}

TEST_CASE("matching structures close exactly when the oracle finds a witness") {
  // differential test on statements with up to 2 quantifiers over one
  // variable: drive all structures through the word and compare closure
  // against the semantic oracle
  Game g = parse_or_die(R"(
controlled var x { values p, q; transitions p -> q, p; transitions q -> p, q;
                   duration p [1, 4]; duration q [1, 4]; }
)");
  std::mt19937_64 rng(21);
  for (int round = 0; round < 150; ++round) {
    Rule r;
    r.name = "r";
    r.trigger_token = "a0";
    r.trigger_var = 0;
    r.trigger_value = 0;
    ExistentialStatement st;
    int nq = 1 + static_cast<int>(rng() % 2);
    std::vector<std::string> names{"a0"};
    for (int q = 0; q < nq; ++q) {
      std::string nm = "b" + std::to_string(q);
      st.quantifiers.push_back({nm, 0, static_cast<ValId>(rng() % 2)});
      names.push_back(nm);
    }
    int na = 1 + static_cast<int>(rng() % 2);
    for (int a = 0; a < na; ++a) {
      Term lhs{rng() % 2 ? TermEndpoint::Start : TermEndpoint::End,
               names[rng() % names.size()]};
      Term rhs{rng() % 2 ? TermEndpoint::Start : TermEndpoint::End,
               names[rng() % names.size()]};
      std::uint32_t lo = static_cast<std::uint32_t>(rng() % 3);
      std::uint32_t up = rng() % 3 == 0 ? kInfDuration
                                        : lo + static_cast<std::uint32_t>(rng() % 3);
      st.clause.push_back({lhs, rhs, lo, up});
    }
    r.statements.push_back(st);
    DurationMap dm;
    dm[{0, 0}] = g.variables[0].durations[0];
    dm[{0, 1}] = g.variables[0].durations[1];
    CompiledStatement cs = compile_statement(r, r.statements[0], dm);

    EnumLimits lim;
    lim.max_events = 4;
    lim.max_delta = 2;
    int budget = 120;
    enumerate_closed_sequences(g.variables, lim, [&](const EventSequence& seq) {
      // oracle side: a witness assignment whose quantified tokens respect
      // their durations (mirroring the DBM's duration augmentation; the
      // trigger is not augmented)
      auto tokens = extract_tokens(seq, g.variables);
      auto duration_ok = [&](const TokenInterval& t) {
        const Duration& d = g.variables[t.var].durations[t.value];
        std::uint64_t len = t.end_time - t.start_time;
        return len >= d.dmin && (d.unbounded() || len <= d.dmax);
      };
      auto time_of = [&](const Term& t, const std::map<std::string, std::size_t>& asg,
                         std::size_t trig) {
        const TokenInterval& tok = t.token == "a0" ? tokens[trig] : tokens[asg.at(t.token)];
        return static_cast<std::int64_t>(t.endpoint == TermEndpoint::Start ? tok.start_time
                                                                           : tok.end_time);
      };
      std::function<bool(std::size_t, std::size_t, std::map<std::string, std::size_t>&)>
          search = [&](std::size_t trig, std::size_t qi,
                       std::map<std::string, std::size_t>& asg) -> bool {
        if (qi == st.quantifiers.size()) {
          for (const Atom& a : st.clause) {
            std::int64_t diff = time_of(a.rhs, asg, trig) - time_of(a.lhs, asg, trig);
            if (diff < static_cast<std::int64_t>(a.lower) ||
                (!a.upper_unbounded() && diff > static_cast<std::int64_t>(a.upper)))
              return false;
          }
          return true;
        }
        const Quantifier& q = st.quantifiers[qi];
        for (std::size_t t = 0; t < tokens.size(); ++t) {
          if (tokens[t].var != q.var || tokens[t].value != q.value) continue;
          if (!duration_ok(tokens[t])) continue;
          asg[q.token] = t;
          if (search(trig, qi + 1, asg)) return true;
        }
        asg.erase(q.token);
        return false;
      };
      bool any_witness = false;
      for (std::size_t t = 0; t < tokens.size() && !any_witness; ++t) {
        if (tokens[t].var != 0 || tokens[t].value != 0) continue;
        std::map<std::string, std::size_t> asg;
        any_witness = search(t, 0, asg);
      }
      // automaton side: drive the full successor set, watch for closure
      bool closed_reached = false;
      if (cs.feasible) {
        std::vector<MatchingStructure> frontier{initial_structure(cs)};
        const std::vector<Event>& evs = seq.events;
        for (std::size_t i = 0; i < evs.size(); ++i) {
          std::uint32_t delta = i == 0 ? 1 : evs[i].delay;
          std::vector<MatchingStructure> next;
          for (const auto& m : frontier)
            for (auto& s : match_events(m, cs, evs[i].actions, delta, 1000))
              next.push_back(std::move(s));
          frontier = std::move(next);
          for (const auto& m : frontier) closed_reached = closed_reached || m.closed();
        }
      }
      CHECK(closed_reached == any_witness);
      return --budget > 0;
    });
  }
}
