#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <system_error>

#include <nlohmann/json.hpp>

#include "mind/error.hpp"
#include "mind/keyboard.hpp"
#include "mind/prediction.hpp"
#include "mind/signal.hpp"

namespace mind {

inline constexpr int kProfileSchemaVersion = 1;

// UI events a profile may attach a sound to.
inline constexpr std::array<std::string_view, 6> kSoundEvents = {
    "level-descend", "level-ascend", "emit", "target-reached", "click", "cancel"};

struct Profile {
  int schema_version = kProfileSchemaVersion;
  std::string user_id;
  std::string default_layout_ref;
  std::map<std::string, std::string> app_layouts;  // application id -> layout ref
  DetectionConfig detection = default_detection();
  int pointer_max_depth = 7;
  std::string dictionary_ref;
  std::map<std::string, std::string> sounds;  // event name -> asset id

  // Resolved references, filled by load_profile (or by hand for in-memory profiles).
  std::map<std::string, std::shared_ptr<const KeyboardLayout>> layouts;  // ref -> tree
  std::shared_ptr<const Dictionary> dictionary = std::make_shared<const Dictionary>();

  friend bool operator==(const Profile& a, const Profile& b) {
    auto same_layouts = [&] {
      if (a.layouts.size() != b.layouts.size()) return false;
      for (auto ia = a.layouts.begin(), ib = b.layouts.begin(); ia != a.layouts.end(); ++ia, ++ib) {
        if (ia->first != ib->first || !ia->second != !ib->second) return false;
        if (ia->second && *ia->second != *ib->second) return false;
      }
      return true;
    };
    auto same_dict = [&] {
      if (!a.dictionary || !b.dictionary) return !a.dictionary && !b.dictionary;
      return *a.dictionary == *b.dictionary;
    };
    return a.schema_version == b.schema_version && a.user_id == b.user_id &&
           a.default_layout_ref == b.default_layout_ref && a.app_layouts == b.app_layouts &&
           a.detection == b.detection && a.pointer_max_depth == b.pointer_max_depth &&
           a.dictionary_ref == b.dictionary_ref && a.sounds == b.sounds && same_layouts() &&
           same_dict();
  }
};

// The app-specific layout if one is mapped, the default layout otherwise.
inline std::shared_ptr<const KeyboardLayout> layout_ptr_for(const Profile& p,
                                                            const std::string& app_id) {
  auto ref = p.default_layout_ref;
  if (auto it = p.app_layouts.find(app_id); it != p.app_layouts.end()) ref = it->second;
  auto it = p.layouts.find(ref);
  if (it == p.layouts.end() || !it->second) throw ReferenceError(ref, "layout not loaded");
  return it->second;
}

inline const KeyboardLayout& layout_for(const Profile& p, const std::string& app_id) {
  return *layout_ptr_for(p, app_id);
}

// Profile with the built-in default and media player layouts, no files involved.
inline Profile builtin_profile(Dictionary dict = {}) {
  Profile p;
  p.user_id = "default";
  p.default_layout_ref = "layouts/default.json";
  p.app_layouts["mediaplayer"] = "layouts/mediaplayer.json";
  p.dictionary_ref = "dictionary.tsv";
  p.layouts["layouts/default.json"] = std::make_shared<const KeyboardLayout>(default_layout());
  p.layouts["layouts/mediaplayer.json"] =
      std::make_shared<const KeyboardLayout>(media_player_layout());
  p.dictionary = std::make_shared<const Dictionary>(std::move(dict));
  p.sounds = {{"target-reached", "target.wav"}, {"click", "click.wav"}};
  return p;
}

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ReferenceError(path.string(), "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json detection_to_json(const DetectionConfig& d) {
  nlohmann::json channels = nlohmann::json::object();
  for (const auto& [id, spec] : d.channels) {
    channels[id] = {{"action", std::string(to_string(spec.action))}, {"threshold", spec.threshold}};
  }
  return {{"channels", channels}, {"debounce_ms", d.debounce_ms}};
}

inline DetectionConfig detection_from_json(const nlohmann::json& j) {
  DetectionConfig d;
  d.debounce_ms = j.value("debounce_ms", kDefaultDebounceMs);
  for (const auto& [id, spec] : j.at("channels").items()) {
    const auto name = spec.at("action").get<std::string>();
    auto action = parse_action(name);
    if (!action) throw ConfigError("channel '" + id + "': unknown action '" + name + "'");
    d.channels[id] = {*action, spec.at("threshold").get<double>()};
  }
  d.validate();
  return d;
}

}  // namespace detail

inline nlohmann::json profile_to_json(const Profile& p) {
  return {{"schema_version", p.schema_version},
          {"user_id", p.user_id},
          {"default_layout", p.default_layout_ref},
          {"app_layouts", p.app_layouts},
          {"detection", detail::detection_to_json(p.detection)},
          {"pointer_max_depth", p.pointer_max_depth},
          {"dictionary", p.dictionary_ref},
          {"sounds", p.sounds}};
}

// Reads the profile and everything it references. Either the whole profile
// loads and validates, or this throws.
inline Profile load_profile(const std::filesystem::path& path) {
  const auto base = path.parent_path();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(detail::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }

  Profile p;
  try {
    p.schema_version = j.at("schema_version").get<int>();
    if (p.schema_version != kProfileSchemaVersion) {
      throw ConfigError(path.string() + ": unknown schema_version " +
                        std::to_string(p.schema_version));
    }
    p.user_id = j.at("user_id").get<std::string>();
    p.default_layout_ref = j.at("default_layout").get<std::string>();
    p.app_layouts = j.value("app_layouts", std::map<std::string, std::string>{});
    p.detection = detail::detection_from_json(j.at("detection"));
    p.pointer_max_depth = j.at("pointer_max_depth").get<int>();
    p.dictionary_ref = j.at("dictionary").get<std::string>();
    p.sounds = j.value("sounds", std::map<std::string, std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (p.pointer_max_depth < 1) throw ConfigError(path.string() + ": pointer_max_depth must be >= 1");
  for (const auto& [event, asset] : p.sounds) {
    if (std::find(kSoundEvents.begin(), kSoundEvents.end(), event) == kSoundEvents.end()) {
      throw ConfigError(path.string() + ": unknown sound event '" + event + "'");
    }
  }

  auto load_ref = [&](const std::string& ref) {
    if (p.layouts.contains(ref)) return;
    const auto file = base / ref;
    try {
      p.layouts[ref] = std::make_shared<const KeyboardLayout>(load_layout(detail::read_file(file)));
    } catch (const ValidationError& e) {
      throw ValidationError(file.string() + ": invalid layout", e.violations());
    } catch (const ParseError& e) {
      throw ParseError(file.string() + ": " + e.what());
    }
  };
  load_ref(p.default_layout_ref);
  for (const auto& [app, ref] : p.app_layouts) load_ref(ref);

  std::istringstream dict_text(detail::read_file(base / p.dictionary_ref));
  try {
    p.dictionary = std::make_shared<const Dictionary>(read_dictionary(dict_text));
  } catch (const ParseError& e) {
    throw ParseError((base / p.dictionary_ref).string() + ": " + e.what());
  }
  return p;
}

// Canonical form (sorted keys, two-space indent, trailing newline), written
// to a temp file and renamed into place.
inline void save_profile(const Profile& p, const std::filesystem::path& path) {
  const auto text = profile_to_json(p).dump(2) + "\n";
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename onto " + path.string());
  }
}

}  // namespace mind
