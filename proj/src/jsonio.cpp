#include "tgs/jsonio.hpp"

#include <sstream>
#include <stdexcept>

namespace tgs {

using nlohmann::json;

namespace {

std::string key_hex(std::uint64_t k) {
  std::ostringstream os;
  os << std::hex << k;
  return os.str();
}

json action_to_json(const Game& g, const Action& a) {
  return json{{"kind", a.kind == ActionKind::Start ? "start" : "end"},
              {"var", g.variables[a.var].name},
              {"value", g.variables[a.var].values[a.value]}};
}

Action action_from_json(const Game& g, const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.contains("var") || !j.contains("value"))
    throw std::invalid_argument("action must have kind, var, value");
  std::string kind = j.at("kind").get<std::string>();
  if (kind != "start" && kind != "end")
    throw std::invalid_argument("action kind must be start or end");
  auto var = g.var_id(j.at("var").get<std::string>());
  if (!var) throw std::invalid_argument("unknown variable " + j.at("var").get<std::string>());
  auto val = g.variables[*var].value_id(j.at("value").get<std::string>());
  if (!val)
    throw std::invalid_argument("unknown value " + j.at("value").get<std::string>() +
                                " of variable " + g.variables[*var].name);
  return {kind == "start" ? ActionKind::Start : ActionKind::End, *var, *val};
}

}  // namespace

json plan_to_json(const Game& g, const EventSequence& seq) {
  json events = json::array();
  for (const Event& e : seq.events) {
    json actions = json::array();
    for (const Action& a : e.actions) actions.push_back(action_to_json(g, a));
    events.push_back(json{{"actions", actions}, {"delay", e.delay}});
  }
  return json{{"format_version", 1}, {"events", events}};
}

EventSequence plan_from_json(const Game& g, const json& j) {
  if (!j.is_object() || !j.contains("events") || !j.at("events").is_array())
    throw std::invalid_argument("plan must be an object with an events array");
  EventSequence seq;
  for (const json& je : j.at("events")) {
    Event e;
    if (!je.is_object() || !je.contains("actions") || !je.contains("delay"))
      throw std::invalid_argument("event must have actions and delay");
    for (const json& ja : je.at("actions")) e.actions.push_back(action_from_json(g, ja));
    e.delay = je.at("delay").get<std::uint32_t>();
    std::size_t before = e.actions.size();
    e.sort_actions();
    if (e.actions.size() != before) throw std::invalid_argument("duplicate action in event");
    seq.events.push_back(std::move(e));
  }
  return seq;
}

json move_to_json(const Game& g, const Move& m) {
  json actions = json::array();
  for (const Action& a : m.actions) actions.push_back(action_to_json(g, a));
  const char* type = m.kind == MoveKind::Wait ? "wait"
                     : m.kind == MoveKind::PlayTimed ? "play_timed"
                                                     : "play";
  json j{{"type", type}, {"actions", actions}};
  if (m.kind != MoveKind::Play) j["delta"] = m.delta;
  return j;
}

Move move_from_json(const Game& g, const json& j) {
  std::string type = j.at("type").get<std::string>();
  std::vector<Action> actions;
  if (j.contains("actions"))
    for (const json& ja : j.at("actions")) actions.push_back(action_from_json(g, ja));
  if (type == "wait") return make_wait(j.at("delta").get<std::uint32_t>());
  if (type == "play_timed")
    return make_play_timed(j.at("delta").get<std::uint32_t>(), std::move(actions));
  if (type == "play") return make_play(std::move(actions));
  throw std::invalid_argument("unknown move type " + type);
}

json strategy_to_json(const Arena& arena, const Strategy& st) {
  const Game& g = arena.automaton().game();
  json moves = json::object();
  for (const auto& [node, move] : st.moves) {
    json jm = move_to_json(g, move);
    // game-level reading of an empty ending play
    if (move.kind == MoveKind::Play && move.actions.empty() &&
        arena.node(node).phase == ArenaPhase::Base)
      jm["rendered"] = "wait(1)";
    moves[key_hex(arena.node_key(node))] = jm;
  }
  json levels = json::object();
  for (Arena::NodeId i = 0; i < arena.size(); ++i)
    if (st.attr.in_wc(i)) levels[key_hex(arena.node_key(i))] = st.attr.level[i];
  return json{{"format_version", 1},
              {"game_hash", key_hex(st.game_hash)},
              {"d", st.d},
              {"window_system", st.window_s},
              {"window_domain", st.window_d},
              {"levels", levels},
              {"moves", moves}};
}

std::optional<Strategy> strategy_from_json(const Arena& arena, const json& j,
                                           std::string* error) {
  auto fail = [&](const std::string& m) {
    if (error) *error = m;
    return std::nullopt;
  };
  try {
    if (j.at("format_version").get<int>() != 1) return fail("unsupported format_version");
    Strategy st;
    st.game_hash = std::stoull(j.at("game_hash").get<std::string>(), nullptr, 16);
    st.d = j.at("d").get<std::uint32_t>();
    st.window_s = j.at("window_system").get<std::uint64_t>();
    st.window_d = j.at("window_domain").get<std::uint64_t>();
    st.attr.level.assign(arena.size(), kNoLevel);
    for (const auto& [k, v] : j.at("levels").items()) {
      auto node = arena.node_by_key(std::stoull(k, nullptr, 16));
      if (!node) return fail("unknown state key " + k);
      st.attr.level[*node] = v.get<std::uint32_t>();
    }
    const Game& g = arena.automaton().game();
    for (const auto& [k, v] : j.at("moves").items()) {
      auto node = arena.node_by_key(std::stoull(k, nullptr, 16));
      if (!node) return fail("unknown state key " + k);
      st.moves.emplace(*node, move_from_json(g, v));
    }
    return st;
  } catch (const std::exception& e) {
    return fail(std::string("malformed strategy: ") + e.what());
  }
}

json arena_to_json(const Arena& arena) {
  const Game& g = arena.automaton().game();
  json states = json::array();
  const char* phase_names[] = {"base",       "after_c_end",       "after_e_end",
                               "after_c_start", "after_wait",     "after_e_timed_end",
                               "after_c_start_in_wait"};
  for (Arena::NodeId i = 0; i < arena.size(); ++i) {
    states.push_back(json{
        {"id", i},
        {"key", key_hex(arena.node_key(i))},
        {"owner", arena.owner(i) == Player::Charlie ? "charlie" : "eve"},
        {"accepting", arena.accepting(i)},
        {"kind", phase_names[static_cast<int>(arena.node(i).phase)]},
    });
  }
  json edges = json::array();
  for (Arena::NodeId i = 0; i < arena.size(); ++i)
    for (const auto& [m, t] : arena.edges(i))
      edges.push_back(json{{"from", i}, {"move", move_to_json(g, m)}, {"to", t}});
  return json{{"format_version", 1},
              {"initial", arena.initial()},
              {"states", states},
              {"edges", edges}};
}

json transcript_to_json(const Game& g, const SimResult& r) {
  const char* verdicts[] = {"success", "admissible-but-unfinished", "eve-inadmissible",
                            "charlie-stuck", "scripted-move-inapplicable"};
  json rounds = json::array();
  for (const auto& rd : r.rounds)
    rounds.push_back(
        json{{"charlie", move_to_json(g, rd.charlie)}, {"eve", move_to_json(g, rd.eve)}});
  return json{{"format_version", 1},
              {"verdict", verdicts[static_cast<int>(r.verdict)]},
              {"message", r.message},
              {"rounds", rounds},
              {"outcome", plan_to_json(g, r.outcome)}};
}

std::string canonical_dump(const json& j) { return j.dump(2); }

}  // namespace tgs
