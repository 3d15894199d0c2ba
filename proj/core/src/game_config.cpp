#include "segblend/game_config.hpp"

#include "segblend/errors.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace segblend {

namespace {

std::string required_string(const nlohmann::json& node, const char* key, std::string_view game) {
  if (!node.contains(key) || !node.at(key).is_string()) {
    throw ConfigError("game '" + std::string(game) + "' is missing string field '" + key + "'");
  }
  return node.at(key).get<std::string>();
}

std::size_t required_count(const nlohmann::json& node, const char* key, std::string_view game) {
  if (!node.contains(key) || !node.at(key).is_number_unsigned() || node.at(key).get<std::size_t>() == 0) {
    throw ConfigError("game '" + std::string(game) + "' needs a positive integer '" + key + "'");
  }
  return node.at(key).get<std::size_t>();
}

}  // namespace

GameConfig GameConfig::parse(std::string_view json_text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("games config is not valid JSON: ") + e.what());
  }
  if (!root.contains("games") || !root.at("games").is_object()) {
    throw ConfigError("games config has no 'games' object");
  }
  GameConfig config;
  for (const auto& [name, node] : root.at("games").items()) {
    GameSpec spec;
    spec.id = parse_game(name);
    spec.segment_rows = required_count(node, "segment_rows", name);
    spec.segment_cols = required_count(node, "segment_cols", name);
    spec.vocabulary = required_string(node, "vocabulary", name);
    spec.solid = required_string(node, "solid", name);
    spec.passable = required_string(node, "passable", name);
    spec.doors = required_string(node, "doors", name);
    spec.filler = required_string(node, "filler", name);
    for (const std::string* set : {&spec.solid, &spec.passable, &spec.doors, &spec.filler}) {
      for (char c : *set) {
        if (!spec.in_vocabulary(c)) {
          throw ConfigError("game '" + name + "' lists tile '" + std::string(1, c) +
                            "' outside its vocabulary");
        }
      }
    }
    config.games_[spec.id] = std::move(spec);
  }
  for (GameId id : kAllGames) {
    if (!config.games_.contains(id)) {
      throw ConfigError("games config does not define '" + std::string(to_string(id)) + "'");
    }
  }
  return config;
}

GameConfig GameConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open games config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

GameConfig GameConfig::load_default() { return load(default_data_dir() / "games.json"); }

const GameSpec& GameConfig::game(GameId id) const { return games_.at(id); }

std::string blend_solid_set(const GameConfig& config, std::span<const GameId> games) {
  std::string out;
  for (int c = 0; c < 256; ++c) {
    const char tile = static_cast<char>(c);
    bool known = false;
    bool solid = true;
    for (GameId g : games) {
      const GameSpec& spec = config.game(g);
      if (!spec.in_vocabulary(tile)) continue;
      known = true;
      solid = solid && spec.is_solid(tile);
    }
    if (known && solid) out.push_back(tile);
  }
  return out;
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("SEGBLEND_DATA_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  const std::filesystem::path source = SEGBLEND_SOURCE_DATA_DIR;
  if (std::filesystem::exists(source / "games.json")) return source;
  return SEGBLEND_INSTALL_DATA_DIR;
}

}  // namespace segblend
