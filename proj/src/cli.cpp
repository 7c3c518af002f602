#include "tgs/cli.hpp"

#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tgs/automaton.hpp"
#include "tgs/jsonio.hpp"
#include "tgs/oracle.hpp"
#include "tgs/parser.hpp"
#include "tgs/solver.hpp"

namespace tgs {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInvalidPlan = 2;
constexpr int kExitEveWins = 10;
constexpr int kExitBudget = 20;

std::optional<std::string> read_file(const std::string& path, std::string& out) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return "cannot open " + path;
  std::ostringstream ss;
  ss << f.rdbuf();
  out = ss.str();
  return std::nullopt;
}

struct LoadedGame {
  SpecSource src;
  Game game;
};

std::optional<LoadedGame> load_game(const std::string& path, std::ostream& err) {
  LoadedGame lg;
  if (auto e = read_file(path, lg.src.text)) {
    err << *e << "\n";
    return std::nullopt;
  }
  lg.src.origin = path;
  ParseResult pr = parse_game(lg.src);
  for (const auto& d : pr.diagnostics) err << format_diagnostic(lg.src, d) << "\n";
  if (!pr.ok()) return std::nullopt;
  auto violations = validate_game(*pr.game);
  if (!violations.empty()) {
    for (const auto& v : violations) err << path << ": error: " << v << "\n";
    return std::nullopt;
  }
  lg.game = std::move(*pr.game);
  return lg;
}

std::optional<EventSequence> load_plan(const Game& g, const std::string& path,
                                       std::ostream& err) {
  std::string text;
  if (auto e = read_file(path, text)) {
    err << *e << "\n";
    return std::nullopt;
  }
  try {
    return plan_from_json(g, json::parse(text));
  } catch (const std::exception& e) {
    err << path << ": " << e.what() << "\n";
    return std::nullopt;
  }
}

// The goal variable's canonical timeline: one token spanning the whole plan.
// Solutions of the original problem correspond to solutions of the desugared
// problem extended this way (the fresh variable is otherwise unconstrained).
EventSequence extend_with_goal_timeline(const Game& desugared, const Game& original,
                                        EventSequence seq) {
  if (desugared.var_count() == original.var_count()) return seq;
  VarId gv = static_cast<VarId>(desugared.var_count() - 1);
  if (seq.events.size() < 2) return seq;  // cannot host a token; left as-is
  seq.events.front().actions.push_back({ActionKind::Start, gv, 0});
  seq.events.front().sort_actions();
  seq.events.back().actions.push_back({ActionKind::End, gv, 0});
  seq.events.back().sort_actions();
  return seq;
}

json verdict_json(const std::string& verdict, json extra = json::object()) {
  extra["verdict"] = verdict;
  return extra;
}

int cmd_check(const std::string& spec, std::ostream& out, std::ostream& err) {
  auto lg = load_game(spec, err);
  if (!lg) return kExitUsage;
  Game d = desugar_goals(lg->game);
  auto violations = validate_game(d);
  if (!violations.empty()) {
    for (const auto& v : violations) err << spec << ": error: " << v << "\n";
    return kExitUsage;
  }
  std::vector<const Rule*> rules;
  for (const auto& r : d.system_rules) rules.push_back(&r);
  for (const auto& r : d.domain_rules) rules.push_back(&r);
  out << canonical_dump(verdict_json(
             "ok", json{{"variables", lg->game.var_count()},
                        {"system_rules", lg->game.system_rules.size()},
                        {"domain_rules", lg->game.domain_rules.size()},
                        {"d", alphabet_bound(rules)},
                        {"window", window_of(rules)}}))
      << "\n";
  return kExitOk;
}

int cmd_validate(const std::string& spec, const std::string& plan, std::ostream& out,
                 std::ostream& err) {
  auto lg = load_game(spec, err);
  if (!lg) return kExitUsage;
  auto seq = load_plan(lg->game, plan, err);
  if (!seq) return kExitInvalidPlan;
  ValidityReport rep = validate_event_sequence(*seq, lg->game.variables);
  if (!rep.ok) {
    out << canonical_dump(verdict_json("invalid-sequence",
                                       json{{"condition", rep.condition},
                                            {"event", rep.event_index},
                                            {"message", rep.message}}))
        << "\n";
    return kExitInvalidPlan;
  }
  SolutionCheck sc = is_solution(lg->game, *seq, RuleSelection::Both, true);
  if (sc.solution) {
    out << canonical_dump(verdict_json("solution")) << "\n";
    return kExitOk;
  }
  json extra{{"reason", sc.reason}};
  if (sc.failing_rule) {
    extra["rule"] = sc.failing_rule->name;
    extra["rule_kind"] = sc.failing_rule->kind == RuleKind::System ? "system" : "domain";
    extra["trigger_token_index"] = sc.failing_trigger;
  }
  out << canonical_dump(verdict_json("not-a-solution", extra)) << "\n";
  return kExitUsage;
}

int cmd_accepts(const std::string& spec, const std::string& plan, std::ostream& out,
                std::ostream& err) {
  auto lg = load_game(spec, err);
  if (!lg) return kExitUsage;
  auto seq0 = load_plan(lg->game, plan, err);
  if (!seq0) return kExitInvalidPlan;
  ValidityReport rep = validate_event_sequence(*seq0, lg->game.variables);
  if (!rep.ok) {
    out << canonical_dump(verdict_json("invalid-sequence", json{{"message", rep.message}}))
        << "\n";
    return kExitInvalidPlan;
  }
  Game d = desugar_goals(lg->game);
  EventSequence seq = extend_with_goal_timeline(d, lg->game, *seq0);
  auto cp = std::make_shared<const CompiledProblem>(compile_problem(d, RuleSelection::Both));
  AlphabetDesc alpha{d.all_actions(), cp->d};
  auto a = combine(CombineOp::ProductIntersection,
                   {make_tv_dfa(d, TvAcceptance::Strict, alpha), make_rule_dfa(d, cp, alpha)});
  bool acc = accepts(*a, normalize_gaps(seq, cp->d));
  out << canonical_dump(verdict_json(acc ? "accepted" : "rejected")) << "\n";
  return acc ? kExitOk : kExitUsage;
}

int cmd_synth(const std::string& spec, const std::string& out_path, Arena::Limits limits,
              std::ostream& out, std::ostream& err) {
  auto lg = load_game(spec, err);
  if (!lg) return kExitUsage;
  SynthesisResult res = synthesize(lg->game, limits);
  switch (res.verdict) {
    case SynthesisVerdict::BudgetExceeded:
      out << canonical_dump(verdict_json("budget-exceeded", json{{"message", res.message}}))
          << "\n";
      return kExitBudget;
    case SynthesisVerdict::EveWins:
      out << canonical_dump(verdict_json("eve-wins", json{{"message", res.message}})) << "\n";
      return kExitEveWins;
    case SynthesisVerdict::CharlieWins:
      break;
  }
  json st = strategy_to_json(*res.arena, *res.strategy);
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
      err << "cannot write " << out_path << "\n";
      return kExitUsage;
    }
    f << canonical_dump(st) << "\n";
  }
  out << canonical_dump(verdict_json(
             "charlie-wins",
             json{{"strategy_states", res.strategy->moves.size()},
                  {"arena_states", res.arena->size()},
                  {"level_q0", res.strategy->attr.level[res.arena->initial()]}}))
      << "\n";
  return kExitOk;
}

int cmd_simulate(const std::string& spec, const std::string& strategy_path,
                 const std::string& script_path, std::uint64_t seed, bool interactive,
                 std::size_t horizon, Arena::Limits limits, std::ostream& out,
                 std::ostream& err, std::istream& in) {
  auto lg = load_game(spec, err);
  if (!lg) return kExitUsage;
  Game d = desugar_goals(lg->game);
  auto aut = std::make_shared<GameAutomaton>(d);
  std::unique_ptr<Arena> arena;
  if (auto e = Arena::build(aut, limits, arena)) {
    err << e->message << "\n";
    return kExitBudget;
  }
  std::string text;
  if (auto e = read_file(strategy_path, text)) {
    err << *e << "\n";
    return kExitUsage;
  }
  std::string serr;
  auto st = strategy_from_json(*arena, json::parse(text, nullptr, false), &serr);
  if (!st) {
    err << strategy_path << ": " << serr << "\n";
    return kExitUsage;
  }
  if (st->game_hash != game_hash(d)) {
    err << "strategy was synthesized for a different game\n";
    return kExitUsage;
  }
  EvePolicy policy;
  if (!script_path.empty()) {
    policy.kind = EvePolicy::Kind::Scripted;
    std::string stext;
    if (auto e = read_file(script_path, stext)) {
      err << *e << "\n";
      return kExitUsage;
    }
    try {
      json js = json::parse(stext);
      for (const json& jm : js.at("moves")) policy.script.push_back(move_from_json(d, jm));
    } catch (const std::exception& e) {
      err << script_path << ": " << e.what() << "\n";
      return kExitInvalidPlan;
    }
  } else if (interactive) {
    policy.kind = EvePolicy::Kind::Interactive;
  } else {
    policy.kind = EvePolicy::Kind::Random;
    policy.seed = seed;
  }
  SimResult r = simulate(*arena, *st, policy, horizon, &in, &out);
  out << canonical_dump(transcript_to_json(d, r)) << "\n";
  return kExitOk;
}

int cmd_export(const std::string& spec, const std::string& what, const std::string& format,
               Arena::Limits limits, std::ostream& out, std::ostream& err) {
  auto lg = load_game(spec, err);
  if (!lg) return kExitUsage;
  Game d = desugar_goals(lg->game);
  auto aut = std::make_shared<GameAutomaton>(d);
  if (what == "automaton") {
    if (format != "dot") {
      err << "automaton export supports --format dot\n";
      return kExitUsage;
    }
    out << automaton_dot(*aut, limits.max_states);
    return kExitOk;
  }
  if (what == "arena") {
    std::unique_ptr<Arena> arena;
    if (auto e = Arena::build(aut, limits, arena)) {
      err << e->message << "\n";
      return kExitBudget;
    }
    if (format == "dot")
      out << arena->dot();
    else if (format == "json")
      out << canonical_dump(arena_to_json(*arena)) << "\n";
    else {
      err << "arena export supports --format dot|json\n";
      return kExitUsage;
    }
    return kExitOk;
  }
  err << "--what must be automaton or arena\n";
  return kExitUsage;
}

int cmd_stats(const std::string& spec, Arena::Limits limits, std::ostream& out,
              std::ostream& err) {
  auto lg = load_game(spec, err);
  if (!lg) return kExitUsage;
  Game d = desugar_goals(lg->game);
  auto aut = std::make_shared<GameAutomaton>(d);
  ExploreStats es = explore(*aut, limits.max_states);
  json j{{"d", aut->d()},
         {"window_system", aut->window_s()},
         {"window_domain", aut->window_d()},
         {"automaton_states", es.states},
         {"automaton_transitions", es.transitions},
         {"automaton_budget_exceeded", es.budget_exceeded}};
  std::unique_ptr<Arena> arena;
  auto e = Arena::build(aut, limits, arena);
  if (e) {
    j["arena"] = "budget exceeded";
  } else {
    j["arena_states"] = arena->size();
    j["arena_edges"] = arena->edge_count();
    AttractorResult attr = attractor(*arena);
    j["winning_region"] = static_cast<std::uint64_t>(
        std::count_if(attr.level.begin(), attr.level.end(),
                      [](std::uint32_t l) { return l != kNoLevel; }));
    j["stationary_index"] = attr.stationary_index;
    j["charlie_wins"] = attr.in_wc(arena->initial());
  }
  out << canonical_dump(j) << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            std::istream& in) {
  CLI::App app{"timeline-based games: plan validation and controller synthesis"};
  app.require_subcommand(1);

  std::string spec, plan, out_path, script_path, what = "automaton", format = "dot";
  std::uint64_t seed = 0;
  std::size_t horizon = 64;
  bool interactive = false;
  Arena::Limits limits;

  auto add_budget = [&](CLI::App* c) {
    c->add_option("--max-states", limits.max_states, "state exploration cap");
    c->add_option("--max-seconds", limits.max_seconds, "wall-clock cap (0 = none)");
  };

  CLI::App* c_check = app.add_subcommand("check", "parse and statically check a spec");
  c_check->add_option("spec", spec)->required();

  CLI::App* c_val = app.add_subcommand("validate", "judge a plan with the semantic oracle");
  c_val->add_option("spec", spec)->required();
  c_val->add_option("plan", plan)->required();

  CLI::App* c_acc = app.add_subcommand("accepts", "judge a plan with the automaton");
  c_acc->add_option("spec", spec)->required();
  c_acc->add_option("plan", plan)->required();

  CLI::App* c_synth = app.add_subcommand("synth", "synthesize a winning controller");
  c_synth->add_option("spec", spec)->required();
  c_synth->add_option("-o,--output", out_path, "strategy file");
  add_budget(c_synth);

  CLI::App* c_sim = app.add_subcommand("simulate", "play a synthesized strategy");
  c_sim->add_option("spec", spec)->required();
  c_sim->add_option("strategy", plan)->required();
  c_sim->add_option("--script", script_path, "scripted Eve moves (JSON)");
  c_sim->add_option("--seed", seed, "random Eve policy seed");
  c_sim->add_flag("--interactive", interactive, "interactive Eve");
  c_sim->add_option("--horizon", horizon, "round limit");
  add_budget(c_sim);

  CLI::App* c_exp = app.add_subcommand("export", "export the automaton or arena");
  c_exp->add_option("spec", spec)->required();
  c_exp->add_option("--what", what, "automaton|arena");
  c_exp->add_option("--format", format, "dot|json");
  add_budget(c_exp);

  CLI::App* c_stats = app.add_subcommand("stats", "construction sizes and parameters");
  c_stats->add_option("spec", spec)->required();
  add_budget(c_stats);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(c_check)) return cmd_check(spec, out, err);
    if (app.got_subcommand(c_val)) return cmd_validate(spec, plan, out, err);
    if (app.got_subcommand(c_acc)) return cmd_accepts(spec, plan, out, err);
    if (app.got_subcommand(c_synth)) return cmd_synth(spec, out_path, limits, out, err);
    if (app.got_subcommand(c_sim))
      return cmd_simulate(spec, plan, script_path, seed, interactive, horizon, limits, out,
                          err, in);
    if (app.got_subcommand(c_exp)) return cmd_export(spec, what, format, limits, out, err);
    if (app.got_subcommand(c_stats)) return cmd_stats(spec, limits, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  err << "no subcommand\n";
  return kExitUsage;
}

}  // namespace tgs
