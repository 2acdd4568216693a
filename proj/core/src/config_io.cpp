#include "flagtrail/config_io.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "flagtrail/error.hpp"

namespace flagtrail {

namespace {

[[noreturn]] void fail(const YAML::Node& node, const std::string& message) {
  std::string where;
  if (node.IsDefined() && node.Mark().line >= 0) where = " (line " + std::to_string(node.Mark().line + 1) + ")";
  throw Error(ErrorCode::InvalidArgument, "game definition: " + message + where);
}

void reject_unknown_keys(const YAML::Node& node, std::initializer_list<const char*> allowed, const std::string& ctx) {
  if (!node.IsMap()) fail(node, ctx + " must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(kv.first, ctx + ": unknown key '" + key + "'");
  }
}

template <class T>
T get(const YAML::Node& node, const char* key, const std::string& ctx) {
  const auto child = node[key];
  if (!child) fail(node, ctx + ": missing '" + key + "'");
  try {
    return child.as<T>();
  } catch (const YAML::Exception&) {
    fail(child, ctx + ": bad value for '" + key + "'");
  }
}

template <class T>
T get_or(const YAML::Node& node, const char* key, T fallback, const std::string& ctx) {
  if (!node[key]) return fallback;
  return get<T>(node, key, ctx);
}

Timestamp get_time(const YAML::Node& node, const char* key, const std::string& ctx) {
  const auto text = get<std::string>(node, key, ctx);
  try {
    return parse_timestamp(text);
  } catch (const Error& e) {
    fail(node[key], ctx + ": " + e.what());
  }
}

Duration get_duration(const YAML::Node& node, const char* key, Duration fallback, const std::string& ctx) {
  if (!node[key]) return fallback;
  const auto text = get<std::string>(node, key, ctx);
  try {
    return parse_duration(text);
  } catch (const Error& e) {
    fail(node[key], ctx + ": " + e.what());
  }
}

Hint parse_hint(const YAML::Node& n, const std::string& challenge_id) {
  const std::string ctx = "hint in challenge '" + challenge_id + "'";
  reject_unknown_keys(n, {"id", "cost", "topic", "body", "released_at"}, ctx);
  Hint h;
  h.hint_id = get<std::string>(n, "id", ctx);
  h.challenge_id = challenge_id;
  h.cost = get_or<int>(n, "cost", 0, ctx);
  h.topic_label = get_or<std::string>(n, "topic", "", ctx);
  h.body = get_or<std::string>(n, "body", "", ctx);
  if (n["released_at"]) h.released_at = get_time(n, "released_at", ctx);
  return h;
}

FileAsset parse_asset(const YAML::Node& n, const std::string& challenge_id) {
  const std::string ctx = "asset in challenge '" + challenge_id + "'";
  reject_unknown_keys(n, {"id", "filename", "digest", "required"}, ctx);
  FileAsset a;
  a.asset_id = get<std::string>(n, "id", ctx);
  a.challenge_id = challenge_id;
  a.filename = get_or<std::string>(n, "filename", "", ctx);
  a.content_digest = get_or<std::string>(n, "digest", "", ctx);
  a.required_for_solve = get_or<bool>(n, "required", false, ctx);
  return a;
}

Challenge parse_challenge(const YAML::Node& n) {
  reject_unknown_keys(n,
                      {"id", "title", "description", "category", "points", "flag", "hints", "assets", "min_solve",
                       "bonus"},
                      "challenge");
  Challenge c;
  c.challenge_id = get<std::string>(n, "id", "challenge");
  const std::string ctx = "challenge '" + c.challenge_id + "'";
  c.title = get_or<std::string>(n, "title", "", ctx);
  c.description = get_or<std::string>(n, "description", "", ctx);
  try {
    c.category = parse_category(get_or<std::string>(n, "category", "basic", ctx));
  } catch (const Error& e) {
    fail(n["category"], ctx + ": " + e.what());
  }
  c.points = get<int>(n, "points", ctx);
  c.flag = get_or<std::string>(n, "flag", "", ctx);
  c.min_solve = get_duration(n, "min_solve", seconds(60), ctx);
  c.is_bonus = get_or<bool>(n, "bonus", is_bonus_category(c.category), ctx);
  if (const auto hints = n["hints"]) {
    for (const auto& h : hints) c.hints.push_back(parse_hint(h, c.challenge_id));
  }
  if (const auto assets = n["assets"]) {
    for (const auto& a : assets) c.assets.push_back(parse_asset(a, c.challenge_id));
  }
  return c;
}

void emit_kv(YAML::Emitter& out, const char* key, const std::string& value) {
  out << YAML::Key << key << YAML::Value << YAML::DoubleQuoted << value;
}

}  // namespace

GameConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("game definition: ") + e.what());
  }
  reject_unknown_keys(root,
                      {"game_id", "title", "opens_at", "closes_at", "anonymization_salt", "hint_offer_dwell",
                       "vicinity_window", "points_range", "flag_pattern", "challenges", "chains", "players"},
                      "game");
  GameConfig g;
  g.game_id = get<std::string>(root, "game_id", "game");
  g.title = get_or<std::string>(root, "title", "", "game");
  g.opens_at = get_time(root, "opens_at", "game");
  g.closes_at = get_time(root, "closes_at", "game");
  g.anonymization_salt = get_or<std::string>(root, "anonymization_salt", "", "game");
  g.hint_offer_dwell = get_duration(root, "hint_offer_dwell", minutes(30), "game");
  g.vicinity_window = get_duration(root, "vicinity_window", minutes(10), "game");
  if (const auto range = root["points_range"]) {
    if (!range.IsSequence() || range.size() != 2) fail(range, "points_range must be [min, max]");
    g.points_min = range[0].as<int>();
    g.points_max = range[1].as<int>();
  }
  g.flag_pattern = get_or<std::string>(root, "flag_pattern", "", "game");
  if (const auto challenges = root["challenges"]) {
    for (const auto& c : challenges) g.challenges.push_back(parse_challenge(c));
  }
  if (const auto chains = root["chains"]) {
    for (const auto& n : chains) {
      reject_unknown_keys(n, {"id", "members"}, "chain");
      Chain chain;
      chain.chain_id = get<std::string>(n, "id", "chain");
      chain.members = get<std::vector<std::string>>(n, "members", "chain '" + chain.chain_id + "'");
      g.chains.push_back(std::move(chain));
    }
  }
  if (const auto players = root["players"]) {
    for (const auto& n : players) {
      reject_unknown_keys(n, {"id", "name", "token", "role"}, "player");
      PlayerRecord p;
      p.player_id = get<std::string>(n, "id", "player");
      const std::string ctx = "player '" + p.player_id + "'";
      p.display_name = get_or<std::string>(n, "name", "", ctx);
      p.auth_token = get_or<std::string>(n, "token", "", ctx);
      try {
        p.role = parse_role(get_or<std::string>(n, "role", "player", ctx));
      } catch (const Error& e) {
        fail(n["role"], ctx + ": " + e.what());
      }
      g.players.push_back(std::move(p));
    }
  }
  return g;
}

GameConfig load_config(const std::filesystem::path& path) {
  const auto text = read_file(path);
  try {
    return parse_config(text);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string serialize_config(const GameConfig& g) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  emit_kv(out, "game_id", g.game_id);
  emit_kv(out, "title", g.title);
  out << YAML::Key << "opens_at" << YAML::Value << format_timestamp(g.opens_at);
  out << YAML::Key << "closes_at" << YAML::Value << format_timestamp(g.closes_at);
  emit_kv(out, "anonymization_salt", g.anonymization_salt);
  out << YAML::Key << "hint_offer_dwell" << YAML::Value << format_duration(g.hint_offer_dwell);
  out << YAML::Key << "vicinity_window" << YAML::Value << format_duration(g.vicinity_window);
  out << YAML::Key << "points_range" << YAML::Value << YAML::Flow << YAML::BeginSeq << g.points_min << g.points_max
      << YAML::EndSeq;
  if (!g.flag_pattern.empty()) emit_kv(out, "flag_pattern", g.flag_pattern);

  out << YAML::Key << "challenges" << YAML::Value << YAML::BeginSeq;
  for (const auto& c : g.challenges) {
    out << YAML::BeginMap;
    emit_kv(out, "id", c.challenge_id);
    emit_kv(out, "title", c.title);
    if (!c.description.empty()) emit_kv(out, "description", c.description);
    out << YAML::Key << "category" << YAML::Value << to_string(c.category);
    out << YAML::Key << "points" << YAML::Value << c.points;
    if (!c.flag.empty()) emit_kv(out, "flag", c.flag);
    out << YAML::Key << "min_solve" << YAML::Value << format_duration(c.min_solve);
    out << YAML::Key << "bonus" << YAML::Value << c.is_bonus;
    if (!c.hints.empty()) {
      out << YAML::Key << "hints" << YAML::Value << YAML::BeginSeq;
      for (const auto& h : c.hints) {
        out << YAML::BeginMap;
        emit_kv(out, "id", h.hint_id);
        out << YAML::Key << "cost" << YAML::Value << h.cost;
        emit_kv(out, "topic", h.topic_label);
        emit_kv(out, "body", h.body);
        if (h.released_at) out << YAML::Key << "released_at" << YAML::Value << format_timestamp(*h.released_at);
        out << YAML::EndMap;
      }
      out << YAML::EndSeq;
    }
    if (!c.assets.empty()) {
      out << YAML::Key << "assets" << YAML::Value << YAML::BeginSeq;
      for (const auto& a : c.assets) {
        out << YAML::BeginMap;
        emit_kv(out, "id", a.asset_id);
        emit_kv(out, "filename", a.filename);
        emit_kv(out, "digest", a.content_digest);
        out << YAML::Key << "required" << YAML::Value << a.required_for_solve;
        out << YAML::EndMap;
      }
      out << YAML::EndSeq;
    }
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "chains" << YAML::Value << YAML::BeginSeq;
  for (const auto& chain : g.chains) {
    out << YAML::BeginMap;
    emit_kv(out, "id", chain.chain_id);
    out << YAML::Key << "members" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const auto& m : chain.members) out << YAML::DoubleQuoted << m;
    out << YAML::EndSeq << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "players" << YAML::Value << YAML::BeginSeq;
  for (const auto& p : g.players) {
    out << YAML::BeginMap;
    emit_kv(out, "id", p.player_id);
    emit_kv(out, "name", p.display_name);
    if (!p.auth_token.empty()) emit_kv(out, "token", p.auth_token);
    out << YAML::Key << "role" << YAML::Value << to_string(p.role);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

Secrets parse_secrets(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("secrets: ") + e.what());
  }
  Secrets s;
  if (root.IsNull()) return s;
  reject_unknown_keys(root, {"flags", "tokens"}, "secrets");
  if (root["flags"]) s.flags = root["flags"].as<std::map<std::string, std::string>>();
  if (root["tokens"]) s.tokens = root["tokens"].as<std::map<std::string, std::string>>();
  return s;
}

Secrets load_secrets(const std::filesystem::path& path) {
  const auto text = read_file(path);
  try {
    return parse_secrets(text);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string serialize_secrets(const Secrets& s) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "flags" << YAML::Value << YAML::BeginMap;
  for (const auto& [k, v] : s.flags) out << YAML::Key << k << YAML::Value << YAML::DoubleQuoted << v;
  out << YAML::EndMap;
  out << YAML::Key << "tokens" << YAML::Value << YAML::BeginMap;
  for (const auto& [k, v] : s.tokens) out << YAML::Key << k << YAML::Value << YAML::DoubleQuoted << v;
  out << YAML::EndMap << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

void apply_secrets(GameConfig& config, const Secrets& secrets) {
  for (const auto& [id, flag] : secrets.flags) {
    auto* c = config.find_challenge(id);
    if (!c) throw Error(ErrorCode::InvalidArgument, "secrets: flag for unknown challenge '" + id + "'");
    c->flag = flag;
  }
  for (const auto& [id, token] : secrets.tokens) {
    auto it = std::find_if(config.players.begin(), config.players.end(),
                           [&](const PlayerRecord& p) { return p.player_id == id; });
    if (it == config.players.end()) throw Error(ErrorCode::InvalidArgument, "secrets: token for unknown player '" + id + "'");
    it->auth_token = token;
  }
}

std::pair<GameConfig, Secrets> split_secrets(const GameConfig& config) {
  GameConfig pub = config;
  Secrets s;
  for (auto& c : pub.challenges) {
    if (!c.flag.empty()) s.flags[c.challenge_id] = std::exchange(c.flag, {});
  }
  for (auto& p : pub.players) {
    if (!p.auth_token.empty()) s.tokens[p.player_id] = std::exchange(p.auth_token, {});
  }
  return {std::move(pub), std::move(s)};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << content;
  if (!out.flush()) throw Error(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

}  // namespace flagtrail
