#pragma once

// Service configuration. Example:
//
//   mindmap_path  = "maps/microrna.mm"
//   catalog_path  = "venues.tsv"
//   stopword_path = "stopwords_en.txt"
//   fixtures_dir  = "fixtures/pages"     # omit for live HTTP
//
//   [defaults]
//   k = 4
//   level = 1
//   limit = 10
//   timeout_s = 10
//   m_sections = 2
//
//   [doc_weights]
//   Topic = 2.0
//
//   [[sources]]
//   name = "dblp"
//   config_path = "wrappers/dblp.xml"
//   priority = 1
//   [sources.result_mapping]
//   title = "titles"
//   url = "titles@href"
//
//   [engines.horizontal]
//   config_path = "wrappers/web.xml"
//   filetype_style = "operator"          # or "variable"
//   [engines.horizontal.result_mapping]
//   title = "hits"
//
// Relative paths resolve against the config file's directory. The
// MINDFORGE_CONFIG environment variable overrides the path given on the
// command line.

#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mindforge/error.hpp"
#include "mindforge/expansion.hpp"
#include "mindforge/fetch.hpp"
#include "mindforge/mindmap.hpp"
#include "mindforge/orchestrator.hpp"
#include "mindforge/toml.hpp"

namespace mindforge {

struct SourceDecl {
  std::string name;
  std::string config_path;
  std::map<std::string, std::string> result_mapping;
  int priority = 0;
};

struct EngineDecl {
  std::string name;
  std::string config_path;
  std::map<std::string, std::string> result_mapping;
  FiletypeStyle filetype_style = FiletypeStyle::Operator;
};

struct ServiceDefaults {
  std::size_t k = 4;
  unsigned level = 1;
  std::size_t limit = 10;
  double timeout_s = 10.0;
  std::size_t m_sections = 2;
};

struct ServiceConfig {
  std::filesystem::path base_dir;
  std::string mindmap_path;
  std::string catalog_path;
  std::string stopword_path;
  std::optional<std::string> fixtures_dir;
  std::optional<std::string> text_dir;  // sidecar .txt files; defaults to fixtures_dir
  std::optional<std::string> static_dir;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string user_agent = "mindforge/0.1";
  std::map<ElementKind, double> doc_weights;
  ServiceDefaults defaults;
  std::vector<SourceDecl> sources;
  std::optional<EngineDecl> horizontal;
  std::optional<EngineDecl> blog;

  DocWeights weights() const {
    DocWeights w;
    for (const auto& [k, v] : doc_weights) w.set(k, v);
    return w;
  }

  // Fails with ConfigError on duplicate priorities/names or missing files.
  void validate() const {
    std::set<int> priorities;
    std::set<std::string> names;
    for (const auto& s : sources) {
      if (s.name.empty()) throw Error(ErrorCode::ConfigError, "source without a name");
      if (!priorities.insert(s.priority).second)
        throw Error(ErrorCode::ConfigError, "source priority " + std::to_string(s.priority) + " used twice");
      if (!names.insert(s.name).second) throw Error(ErrorCode::ConfigError, "source name '" + s.name + "' used twice");
    }
    const auto must_exist = [](const std::string& p, const char* what) {
      if (!std::filesystem::exists(p)) throw Error(ErrorCode::ConfigError, std::string(what) + " not found: " + p);
    };
    must_exist(mindmap_path, "mindmap_path");
    must_exist(catalog_path, "catalog_path");
    must_exist(stopword_path, "stopword_path");
    if (fixtures_dir) must_exist(*fixtures_dir, "fixtures_dir");
    if (text_dir) must_exist(*text_dir, "text_dir");
    for (const auto& s : sources) must_exist(s.config_path, "source config");
    for (const auto* e : {&horizontal, &blog})
      if (*e) must_exist((*e)->config_path, "engine config");
  }

  static ServiceConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    ServiceConfig c;
    c.base_dir = base_dir;
    const auto resolve = [&](const std::string& p) {
      const std::filesystem::path path(p);
      return (path.is_absolute() ? path : base_dir / path).lexically_normal().string();
    };
    const auto str = [&](const nlohmann::json& obj, const char* key, bool required) -> std::optional<std::string> {
      if (!obj.contains(key)) {
        if (required) throw Error(ErrorCode::ConfigError, std::string("missing key '") + key + "'");
        return std::nullopt;
      }
      if (!obj[key].is_string()) throw Error(ErrorCode::ConfigError, std::string("'") + key + "' must be a string");
      return obj[key].get<std::string>();
    };
    const auto mapping = [&](const nlohmann::json& obj) {
      std::map<std::string, std::string> m;
      if (!obj.contains("result_mapping") || !obj["result_mapping"].is_object())
        throw Error(ErrorCode::ConfigError, "missing [result_mapping] table");
      for (const auto& [k, v] : obj["result_mapping"].items()) {
        if (!v.is_string()) throw Error(ErrorCode::ConfigError, "result_mapping." + k + " must be a string");
        m[k] = v.get<std::string>();
      }
      return m;
    };

    try {
      c.mindmap_path = resolve(*str(j, "mindmap_path", true));
      c.catalog_path = resolve(*str(j, "catalog_path", true));
      c.stopword_path = resolve(*str(j, "stopword_path", true));
      if (auto v = str(j, "fixtures_dir", false)) c.fixtures_dir = resolve(*v);
      if (auto v = str(j, "text_dir", false)) c.text_dir = resolve(*v);
      else c.text_dir = c.fixtures_dir;
      if (auto v = str(j, "static_dir", false)) c.static_dir = resolve(*v);
      if (auto v = str(j, "user_agent", false)) c.user_agent = *v;
      if (j.contains("server")) {
        const auto& s = j["server"];
        if (auto v = str(s, "host", false)) c.host = *v;
        if (s.contains("port")) c.port = s["port"].get<int>();
      }
      if (j.contains("defaults")) {
        const auto& d = j["defaults"];
        if (d.contains("k")) c.defaults.k = d["k"].get<std::size_t>();
        if (d.contains("level")) c.defaults.level = d["level"].get<unsigned>();
        if (d.contains("limit")) c.defaults.limit = d["limit"].get<std::size_t>();
        if (d.contains("timeout_s")) c.defaults.timeout_s = d["timeout_s"].get<double>();
        if (d.contains("m_sections")) c.defaults.m_sections = d["m_sections"].get<std::size_t>();
      }
      if (j.contains("doc_weights")) {
        for (const auto& [k, v] : j["doc_weights"].items()) {
          const auto kind = kind_from_name(k);
          if (!kind) throw Error(ErrorCode::ConfigError, "unknown element kind '" + k + "' in doc_weights");
          const double w = v.get<double>();
          if (!(w > 0.0)) throw Error(ErrorCode::ConfigError, "doc weight for " + k + " must be > 0");
          c.doc_weights[*kind] = w;
        }
      }
      if (j.contains("sources")) {
        for (const auto& s : j["sources"]) {
          SourceDecl d;
          d.name = *str(s, "name", true);
          d.config_path = resolve(*str(s, "config_path", true));
          d.priority = s.value("priority", static_cast<int>(c.sources.size()) + 1);
          d.result_mapping = mapping(s);
          c.sources.push_back(std::move(d));
        }
      }
      if (j.contains("engines")) {
        for (const char* which : {"horizontal", "blog"}) {
          if (!j["engines"].contains(which)) continue;
          const auto& e = j["engines"][which];
          EngineDecl d;
          d.name = str(e, "name", false).value_or(which);
          d.config_path = resolve(*str(e, "config_path", true));
          d.result_mapping = mapping(e);
          const auto style = str(e, "filetype_style", false).value_or("operator");
          if (style == "operator") d.filetype_style = FiletypeStyle::Operator;
          else if (style == "variable") d.filetype_style = FiletypeStyle::Variable;
          else throw Error(ErrorCode::ConfigError, "filetype_style must be 'operator' or 'variable'");
          (std::string_view(which) == "horizontal" ? c.horizontal : c.blog) = std::move(d);
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ConfigError, e.what());
    }
    return c;
  }

  static ServiceConfig load(const std::filesystem::path& path) {
    const auto content = read_file(path);
    if (!content) throw Error(ErrorCode::ConfigError, "cannot read config " + path.string());
    const auto base = std::filesystem::absolute(path).parent_path();
    return from_json(toml::parse(*content), base);
  }
};

// MINDFORGE_CONFIG wins over the flag value.
inline std::optional<std::string> resolve_config_path(const std::optional<std::string>& flag) {
  if (const char* env = std::getenv("MINDFORGE_CONFIG"); env && *env) return std::string(env);
  return flag;
}

}  // namespace mindforge
