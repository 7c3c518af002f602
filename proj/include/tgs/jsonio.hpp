#pragma once

// JSON formats: canonical plan serialization, strategy files, arena dumps and
// simulation transcripts. All top-level documents carry format_version.

#include <optional>
#include <string>

#include <json.hpp>

#include "tgs/arena.hpp"
#include "tgs/solver.hpp"

namespace tgs {

nlohmann::json plan_to_json(const Game& g, const EventSequence& seq);
// Throws std::invalid_argument on malformed documents or unknown names.
EventSequence plan_from_json(const Game& g, const nlohmann::json& j);

nlohmann::json move_to_json(const Game& g, const Move& m);
Move move_from_json(const Game& g, const nlohmann::json& j);

// Strategy export: canonical state keys (stable structural hashes), move
// encodings, level map and metadata. A Charlie ending play with no actions is
// additionally rendered as wait(1), its game-level reading.
nlohmann::json strategy_to_json(const Arena& arena, const Strategy& st);
std::optional<Strategy> strategy_from_json(const Arena& arena, const nlohmann::json& j,
                                           std::string* error);

nlohmann::json arena_to_json(const Arena& arena);
nlohmann::json transcript_to_json(const Game& g, const SimResult& r);

std::string canonical_dump(const nlohmann::json& j);  // stable key order, 2-space indent

}  // namespace tgs
