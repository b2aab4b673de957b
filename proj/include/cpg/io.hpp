#pragma once

#include <string>

#include "cpg/game.hpp"

namespace cpg {

/// Game description file (JSON): order, alphabet (exactly one bottom),
/// states with owner/colour, initial state, transition table. Parse errors
/// carry line/column positions.
CpdaGameSpec load_game_json(const std::string& text);
CpdaGameSpec load_game_file(const std::string& path);
std::string game_to_json(const CpdaGameSpec& spec);

StackOp parse_op(const std::string& text, const Alphabet& alphabet);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace cpg
