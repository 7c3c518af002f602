#include <doctest.h>

#include <random>

#include "support/generators.hpp"
#include "support/testutil.hpp"
#include "tgs/model.hpp"

using namespace tgs;
using namespace tgs::test;

namespace {

Game one_var_game() {
  return parse_or_die(R"(
controlled var x {
  values p, q;
  transitions p -> q, p;
  transitions q -> p;
  duration p [1, 4];
  duration q [1, 4];
}
)");
}

Game two_var_game() {
  return parse_or_die(R"(
controlled var x {
  values p;
  transitions p -> p;
  duration p [1, 4];
}
external var y {
  values on;
  transitions on -> on;
  duration on [1, 4];
  uncontrollable on;
}
)");
}

}  // namespace

TEST_CASE("validate_event_sequence: empty sequence is ok and closed") {
  Game g = one_var_game();
  EventSequence seq;
  CHECK(validate_event_sequence(seq, g.variables).ok);
  CHECK(openness(seq, 0) == Openness::Closed);
}

TEST_CASE("validate_event_sequence: restart while open violates condition 1") {
  Game g = one_var_game();
  EventSequence seq{{ev({act(ActionKind::Start, 0, 0)}, 0), ev({act(ActionKind::Start, 0, 1)}, 1)}};
  ValidityReport rep = validate_event_sequence(seq, g.variables);
  CHECK_FALSE(rep.ok);
  CHECK(rep.condition == 1);
  CHECK(rep.event_index == 2);
}

TEST_CASE("validate_event_sequence: gap conditions 3 and 4") {
  Game g = one_var_game();
  EventSequence seq1{{ev({act(ActionKind::Start, 0, 0)}, 0), ev({act(ActionKind::End, 0, 0)}, 1),
                      ev({}, 1)}};
  ValidityReport r1 = validate_event_sequence(seq1, g.variables);
  CHECK_FALSE(r1.ok);
  CHECK(r1.condition == 3);
  EventSequence seq2{{ev({}, 0), ev({act(ActionKind::Start, 0, 0)}, 1)}};
  ValidityReport r2 = validate_event_sequence(seq2, g.variables);
  CHECK_FALSE(r2.ok);
  CHECK(r2.condition == 4);
}

TEST_CASE("validate_event_sequence: accepted count matches direct enumeration") {
  Game g = parse_or_die(R"(
controlled var x { values p; transitions p -> p; duration p [1, 2]; }
)");
  const std::vector<std::vector<Action>> subsets = {
      {}, {act(ActionKind::Start, 0, 0)}, {act(ActionKind::End, 0, 0)},
      {act(ActionKind::Start, 0, 0), act(ActionKind::End, 0, 0)}};
  int checker_count = 0, direct_count = 0;
  for (const auto& a1 : subsets)
    for (const auto& a2 : subsets)
      for (std::uint32_t d2 : {1u, 2u}) {
        EventSequence seq{{ev(a1, 0), ev(a2, d2)}};
        bool ok = validate_event_sequence(seq, g.variables).ok &&
                  closed_for_all(seq, g.var_count());
        if (ok) ++checker_count;
        // independent reading of Def. 2 for one variable and two events
        bool d_ok = (a1.empty() && a2.empty()) ||
                    (a1.size() == 1 && a1[0].kind == ActionKind::Start && a2.size() == 1 &&
                     a2[0].kind == ActionKind::End);
        if (d_ok) ++direct_count;
      }
  CHECK(checker_count == direct_count);
  CHECK(checker_count == 4);  // untouched (2 delays) + start-then-end (2 delays)
}

TEST_CASE("openness classification") {
  Game g = one_var_game();
  (void)g;
  CHECK(openness(EventSequence{{ev({act(ActionKind::Start, 0, 0)}, 0)}}, 0) ==
        Openness::OpenRight);
  CHECK(openness(EventSequence{{ev({act(ActionKind::End, 0, 0)}, 0)}}, 0) ==
        Openness::OpenLeft);
  CHECK(openness(EventSequence{{ev({act(ActionKind::End, 0, 0), act(ActionKind::Start, 0, 1)}, 0)}},
                 0) == Openness::OpenBoth);
}

TEST_CASE("elapsed sums delays") {
  EventSequence seq{{ev({}, 0), ev({}, 2), ev({}, 3)}};
  CHECK(total_duration(EventSequence{}) == 0);
  CHECK(elapsed(seq, 1, 1) == 0);
  CHECK(elapsed(seq, 2, 2) == 0);
  CHECK(elapsed(seq, 1, 3) == 5);
  CHECK_THROWS_AS(elapsed(seq, 0, 1), std::out_of_range);
  CHECK_THROWS_AS(elapsed(seq, 1, 4), std::out_of_range);
}

TEST_CASE("partition_actions: ends follow controllability, starts follow ownership") {
  Game g = two_var_game();
  ActionPartition p = partition_actions(g);
  CHECK(std::find(p.eve.begin(), p.eve.end(), act(ActionKind::End, 1, 0)) != p.eve.end());
  CHECK(std::find(p.eve.begin(), p.eve.end(), act(ActionKind::Start, 1, 0)) != p.eve.end());
  CHECK(std::find(p.charlie.begin(), p.charlie.end(), act(ActionKind::Start, 0, 0)) !=
        p.charlie.end());

  Game g2 = two_var_game();
  g2.variables[1].tags[0] = Controllability::Controllable;
  ActionPartition p2 = partition_actions(g2);
  CHECK(std::find(p2.charlie.begin(), p2.charlie.end(), act(ActionKind::End, 1, 0)) !=
        p2.charlie.end());
  CHECK(p2.eve.size() == 1);
  CHECK(p2.eve[0] == act(ActionKind::Start, 1, 0));
}

TEST_CASE("partition_actions is a true partition on random games") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 50; ++i) {
    GenConfig cfg;
    cfg.force_external = true;
    Game g = random_game(rng, cfg);
    ActionPartition p = partition_actions(g);
    std::vector<Action> all = g.all_actions();
    std::vector<Action> merged = p.charlie;
    merged.insert(merged.end(), p.eve.begin(), p.eve.end());
    std::sort(merged.begin(), merged.end());
    CHECK(merged == all);
    std::vector<Action> inter;
    std::set_intersection(p.charlie.begin(), p.charlie.end(), p.eve.begin(), p.eve.end(),
                          std::back_inserter(inter));
    CHECK(inter.empty());
  }
}

TEST_CASE("apply_round: starting round merges into the last event") {
  Game g = two_var_game();
  Round r{make_play({act(ActionKind::Start, 0, 0)}), make_play({act(ActionKind::Start, 1, 0)})};
  RoundOutcome out = apply_round(g, EventSequence{}, r);
  REQUIRE(out.applicable);
  REQUIRE(out.result.size() == 1);
  CHECK(out.result.events[0].delay == 0);
  CHECK(out.result.events[0].actions.size() == 2);
}

TEST_CASE("apply_round: ending round on the empty plan is not applicable") {
  Game g = two_var_game();
  Round r{make_wait(2), make_play_timed(1, {})};
  RoundOutcome out = apply_round(g, EventSequence{}, r);
  CHECK_FALSE(out.applicable);
}

TEST_CASE("apply_round: wait pairs with a timed play within the wait bound") {
  Game g = two_var_game();
  EventSequence plan{{ev({act(ActionKind::Start, 0, 0), act(ActionKind::Start, 1, 0)}, 0)}};
  Round ok{make_wait(5), make_play_timed(3, {act(ActionKind::End, 1, 0)})};
  RoundOutcome out = apply_round(g, plan, ok);
  REQUIRE(out.applicable);
  CHECK(out.result.events.back().delay == 3);
  CHECK(out.result.events.back().actions == std::vector<Action>{act(ActionKind::End, 1, 0)});

  Round bad{make_wait(5), make_play_timed(6, {act(ActionKind::End, 1, 0)})};
  CHECK(check_round(g, bad).has_value());  // rejected at Round construction
  CHECK_FALSE(apply_round(g, plan, bad).applicable);
}

TEST_CASE("apply_round alternation and outcome monotonicity on random plays") {
  Game g = two_var_game();
  std::mt19937_64 rng(7);
  for (int run = 0; run < 40; ++run) {
    EventSequence plan;
    bool starting = true;
    for (int step = 0; step < 12; ++step) {
      Round r;
      if (starting) {
        r = {make_play({act(ActionKind::Start, 0, 0)}),
             make_play({act(ActionKind::Start, 1, 0)})};
      } else if (rng() % 2) {
        std::uint32_t d = 1 + static_cast<std::uint32_t>(rng() % 3);
        r = {make_wait(d), make_play_timed(d, {act(ActionKind::End, 1, 0)})};
      } else {
        r = {make_play({act(ActionKind::End, 0, 0)}), make_play({act(ActionKind::End, 1, 0)})};
      }
      RoundOutcome out = apply_round(g, plan, r);
      if (!out.applicable) break;
      std::size_t events_before = plan.size();
      if (starting)
        CHECK(out.result.size() <= std::max<std::size_t>(events_before, 1));
      else
        CHECK(out.result.size() == events_before + 1);
      plan = out.result;
      bool all_open = open_for_all(plan, g.var_count());
      Round probe_start{make_play({act(ActionKind::Start, 0, 0)}),
                        make_play({act(ActionKind::Start, 1, 0)})};
      if (all_open) CHECK_FALSE(apply_round(g, plan, probe_start).applicable);
      starting = !all_open;
    }
  }
}

TEST_CASE("valid closed sequences start with starts and finish with ends") {
  Game g = one_var_game();
  EventSequence seq{{ev({act(ActionKind::Start, 0, 0)}, 0),
                     ev({act(ActionKind::End, 0, 0), act(ActionKind::Start, 0, 1)}, 2),
                     ev({act(ActionKind::End, 0, 1)}, 1)}};
  REQUIRE(validate_event_sequence(seq, g.variables).ok);
  REQUIRE(closed_for_all(seq, g.var_count()));
  for (const Action& a : seq.events.front().actions) CHECK(a.kind == ActionKind::Start);
  for (const Action& a : seq.events.back().actions) CHECK(a.kind == ActionKind::End);
}

TEST_CASE("normalize_gaps splits delays and denormalize recovers the input") {
  Game g = one_var_game();
  EventSequence seq{{ev({act(ActionKind::Start, 0, 0)}, 0), ev({act(ActionKind::End, 0, 0)}, 7)}};
  EventSequence norm = normalize_gaps(seq, 3);
  REQUIRE(norm.size() == 4);
  CHECK(norm.events[1].actions.empty());
  CHECK(norm.events[1].delay == 3);
  CHECK(norm.events[2].delay == 3);
  CHECK(norm.events[3].delay == 1);
  CHECK(validate_event_sequence(norm, g.variables).ok);
  CHECK(total_duration(norm) == total_duration(seq));
  CHECK(denormalize_gaps(norm) == seq);

  EventSequence small{{ev({act(ActionKind::Start, 0, 0)}, 0), ev({act(ActionKind::End, 0, 0)}, 2)}};
  CHECK(normalize_gaps(small, 3) == small);
  CHECK_THROWS_AS(normalize_gaps(seq, 0), std::invalid_argument);
}

TEST_CASE("normalize_gaps round-trip on random valid sequences") {
  std::mt19937_64 rng(11);
  Game g = one_var_game();
  for (int i = 0; i < 100; ++i) {
    EventSequence seq;
    ValId cur = 0;
    seq.events.push_back(ev({act(ActionKind::Start, 0, cur)}, 0));
    int n = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < n; ++k) {
      ValId next = static_cast<ValId>(rng() % 2);
      std::uint32_t d = 1 + static_cast<std::uint32_t>(rng() % 9);
      if (k + 1 == n) {
        seq.events.push_back(ev({act(ActionKind::End, 0, cur)}, d));
      } else {
        seq.events.push_back(
            ev({act(ActionKind::End, 0, cur), act(ActionKind::Start, 0, next)}, d));
        cur = next;
      }
    }
    REQUIRE(validate_event_sequence(seq, g.variables).ok);
    for (std::uint32_t d = 1; d <= 4; ++d) {
      EventSequence norm = normalize_gaps(seq, d);
      for (std::size_t j = 1; j < norm.size(); ++j) CHECK(norm.events[j].delay <= d);
      CHECK(denormalize_gaps(norm) == seq);
    }
  }
}
