#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cge/core_model.hpp"
#include "cge/error.hpp"
#include "cge/parallel.hpp"
#include <nlohmann/json.hpp>

namespace cge {

struct ParseOptions {
  /// Drop edges whose endpoints are undeclared instead of failing.
  bool lenient = false;
};

struct ParseReport {
  std::size_t dropped_edges = 0;
  std::size_t duplicate_edges = 0;
  std::size_t self_loops = 0;
};

namespace detail {

struct NodeDecl {
  std::string name;
  std::string module;
  std::size_t line;
};

struct EdgeDecl {
  std::string caller;
  std::string callee;
  std::size_t line;
};

inline std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

/// Collects declarations in any order, then validates them as a whole so the
/// result does not depend on line order.
class GraphBuilder {
 public:
  void node(std::string name, std::string module, std::size_t line) {
    if (!is_valid_symbol(name)) throw Error(ErrorCode::SyntaxError, at_line(line) + "invalid procedure name '" + name + "'");
    if (!is_valid_symbol(module)) throw Error(ErrorCode::SyntaxError, at_line(line) + "invalid module name '" + module + "'");
    nodes_.push_back({std::move(name), std::move(module), line});
  }

  void edge(std::string caller, std::string callee, std::size_t line) {
    if (!is_valid_symbol(caller) || !is_valid_symbol(callee))
      throw Error(ErrorCode::SyntaxError, at_line(line) + "invalid procedure name in edge");
    edges_.push_back({std::move(caller), std::move(callee), line});
  }

  CallGraph finish(std::string label, const ParseOptions& opts, ParseReport* report) && {
    if (nodes_.empty()) throw Error(ErrorCode::EmptyGraph, "no node declarations");

    std::map<std::string, const NodeDecl*> modules;
    for (const auto& n : nodes_) {
      auto [it, inserted] = modules.emplace(n.name, &n);
      if (!inserted && it->second->module != n.module) {
        const auto* first = it->second->line < n.line ? it->second : &n;
        const auto* second = first == &n ? it->second : &n;
        throw Error(ErrorCode::ConflictingModule,
                    at_line(second->line) + "procedure '" + n.name + "' declared in module '" + second->module +
                        "' but line " + std::to_string(first->line) + " puts it in '" + first->module + "'");
      }
    }

    // Report the earliest offending edge so diagnostics are stable.
    std::sort(edges_.begin(), edges_.end(), [](const EdgeDecl& a, const EdgeDecl& b) { return a.line < b.line; });

    ParseReport local;
    std::vector<Procedure> procs;
    procs.reserve(modules.size());
    for (const auto& [name, decl] : modules) procs.push_back({name, decl->module});

    std::vector<CallPair> pairs;
    std::set<std::pair<std::string_view, std::string_view>> seen;
    pairs.reserve(edges_.size());
    for (const auto& e : edges_) {
      bool known = modules.count(e.caller) && modules.count(e.callee);
      if (!known) {
        if (opts.lenient) {
          ++local.dropped_edges;
          continue;
        }
        const auto& missing = modules.count(e.caller) ? e.callee : e.caller;
        throw Error(ErrorCode::UnknownProcedure, at_line(e.line) + "edge endpoint '" + missing + "' is not declared");
      }
      if (e.caller == e.callee) {
        ++local.self_loops;
        continue;
      }
      if (!seen.emplace(e.caller, e.callee).second) {
        ++local.duplicate_edges;
        continue;
      }
      pairs.push_back({e.caller, e.callee});
    }

    auto g = CallGraph::make(std::move(label), std::move(procs), std::move(pairs), local.self_loops);
    if (report) *report = local;
    return g;
  }

 private:
  std::vector<NodeDecl> nodes_;
  std::vector<EdgeDecl> edges_;
};

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace detail

/// Parses the native line format:
///
///     # comment
///     node <procedure> <module>
///     edge <caller> <callee>
///
/// Duplicate edges collapse and `edge x x` only bumps the self-loop counter.
inline CallGraph parse_graph_file(std::string_view text, std::string version_label, const ParseOptions& opts = {},
                                  ParseReport* report = nullptr) {
  detail::GraphBuilder builder;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    auto tokens = detail::split_ws(line);
    if (tokens.empty() || tokens.front().front() == '#') continue;
    if (tokens.size() != 3)
      throw Error(ErrorCode::SyntaxError,
                  detail::at_line(line_no) + "expected 3 fields, found " + std::to_string(tokens.size()));
    if (tokens[0] == "node")
      builder.node(std::string(tokens[1]), std::string(tokens[2]), line_no);
    else if (tokens[0] == "edge")
      builder.edge(std::string(tokens[1]), std::string(tokens[2]), line_no);
    else
      throw Error(ErrorCode::SyntaxError, detail::at_line(line_no) + "unknown record '" + std::string(tokens[0]) + "'");
  }
  return std::move(builder).finish(std::move(version_label), opts, report);
}

/// Native-format text for `cg`; nodes then edges, both sorted. Self-loops are
/// not representable per edge and are omitted.
inline std::string serialize_graph(const CallGraph& cg) {
  std::ostringstream os;
  os << "# version " << cg.version_label() << '\n';
  for (const auto& p : cg.procedures()) os << "node " << p.name << ' ' << p.module << '\n';
  for (const auto& e : cg.call_pairs()) os << "edge " << e.caller << ' ' << e.callee << '\n';
  return os.str();
}

namespace detail {

struct DotToken {
  enum Kind { Id, Arrow, UndirectedEdge, LBracket, RBracket, LBrace, RBrace, Equals, Comma, Semi, End } kind;
  std::string text;
  std::size_t line;
};

inline std::vector<DotToken> tokenize_dot(std::string_view s) {
  std::vector<DotToken> out;
  std::size_t i = 0, line = 1;
  bool line_start = true;
  auto is_id_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == ':' || c == '$' ||
           c == '<' || c == '>' || c == '/' || c == '@' || c == '+' || c == '\'' ||
           static_cast<unsigned char>(c) >= 0x80;
  };
  while (i < s.size()) {
    char c = s[i];
    if (c == '\n') {
      ++line;
      ++i;
      line_start = true;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '#' && line_start) {
      while (i < s.size() && s[i] != '\n') ++i;
      continue;
    }
    line_start = false;
    if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
      while (i < s.size() && s[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < s.size() && s[i + 1] == '*') {
      std::size_t end = s.find("*/", i + 2);
      if (end == std::string_view::npos) throw Error(ErrorCode::SyntaxError, at_line(line) + "unterminated comment");
      line += static_cast<std::size_t>(std::count(s.begin() + i, s.begin() + end, '\n'));
      i = end + 2;
      continue;
    }
    if (c == '-' && i + 1 < s.size() && (s[i + 1] == '>' || s[i + 1] == '-')) {
      out.push_back({s[i + 1] == '>' ? DotToken::Arrow : DotToken::UndirectedEdge, std::string(s.substr(i, 2)), line});
      i += 2;
      continue;
    }
    switch (c) {
      case '[': out.push_back({DotToken::LBracket, "[", line}); ++i; continue;
      case ']': out.push_back({DotToken::RBracket, "]", line}); ++i; continue;
      case '{': out.push_back({DotToken::LBrace, "{", line}); ++i; continue;
      case '}': out.push_back({DotToken::RBrace, "}", line}); ++i; continue;
      case '=': out.push_back({DotToken::Equals, "=", line}); ++i; continue;
      case ',': out.push_back({DotToken::Comma, ",", line}); ++i; continue;
      case ';': out.push_back({DotToken::Semi, ";", line}); ++i; continue;
      default: break;
    }
    if (c == '"') {
      std::string value;
      std::size_t start_line = line;
      ++i;
      while (i < s.size() && s[i] != '"') {
        if (s[i] == '\\' && i + 1 < s.size()) {
          if (s[i + 1] == '"') {
            value += '"';
            i += 2;
            continue;
          }
          if (s[i + 1] == '\n') {
            ++line;
            i += 2;
            continue;
          }
        }
        if (s[i] == '\n') ++line;
        value += s[i++];
      }
      if (i >= s.size()) throw Error(ErrorCode::SyntaxError, at_line(start_line) + "unterminated string");
      ++i;
      out.push_back({DotToken::Id, std::move(value), start_line});
      continue;
    }
    if (is_id_char(c) || c == '-') {
      std::size_t j = i + 1;
      while (j < s.size() && is_id_char(s[j])) ++j;
      out.push_back({DotToken::Id, std::string(s.substr(i, j - i)), line});
      i = j;
      continue;
    }
    throw Error(ErrorCode::SyntaxError, at_line(line) + "unexpected character '" + std::string(1, c) + "'");
  }
  out.push_back({DotToken::End, "", line});
  return out;
}

}  // namespace detail

/// Parses the DOT subset emitted by common call-graph exporters: one
/// `digraph { ... }` with node statements carrying a `module="..."` attribute
/// and `a -> b` edge statements (chains allowed). Other attributes are ignored.
inline CallGraph parse_dot_graph(std::string_view text, std::string version_label, const ParseOptions& opts = {},
                                 ParseReport* report = nullptr) {
  using detail::DotToken;
  auto toks = detail::tokenize_dot(text);
  std::size_t i = 0;
  auto peek = [&](std::size_t k = 0) -> const DotToken& { return toks[std::min(i + k, toks.size() - 1)]; };
  auto fail = [&](const std::string& what) -> Error {
    return Error(ErrorCode::SyntaxError, detail::at_line(peek().line) + what);
  };
  auto expect = [&](DotToken::Kind kind, const char* what) {
    if (peek().kind != kind) throw fail(std::string("expected ") + what);
    return toks[i++];
  };

  if (peek().kind == DotToken::Id && peek().text == "strict") ++i;
  if (peek().kind != DotToken::Id || peek().text != "digraph") throw fail("expected 'digraph'");
  ++i;
  if (peek().kind == DotToken::Id) ++i;
  expect(DotToken::LBrace, "'{'");

  auto read_attrs = [&] {
    std::map<std::string, std::string> attrs;
    while (peek().kind == DotToken::LBracket) {
      ++i;
      while (peek().kind != DotToken::RBracket) {
        auto key = expect(DotToken::Id, "attribute name");
        expect(DotToken::Equals, "'='");
        auto value = expect(DotToken::Id, "attribute value");
        attrs[key.text] = value.text;
        if (peek().kind == DotToken::Comma || peek().kind == DotToken::Semi) ++i;
      }
      ++i;
    }
    return attrs;
  };

  detail::GraphBuilder builder;
  while (peek().kind != DotToken::RBrace) {
    if (peek().kind == DotToken::End) throw fail("missing '}'");
    if (peek().kind == DotToken::Semi) {
      ++i;
      continue;
    }
    if (peek().kind == DotToken::LBrace || peek().text == "subgraph") throw fail("subgraphs are not supported");
    auto first = expect(DotToken::Id, "statement");
    if ((first.text == "graph" || first.text == "node" || first.text == "edge") && peek().kind == DotToken::LBracket) {
      read_attrs();
      continue;
    }
    if (peek().kind == DotToken::Equals) {
      ++i;
      expect(DotToken::Id, "value");
      continue;
    }
    if (peek().kind == DotToken::UndirectedEdge) throw fail("undirected edges are not allowed in a digraph");
    if (peek().kind == DotToken::Arrow) {
      std::vector<DotToken> chain{first};
      while (peek().kind == DotToken::Arrow) {
        ++i;
        chain.push_back(expect(DotToken::Id, "edge target"));
      }
      read_attrs();
      for (std::size_t k = 0; k + 1 < chain.size(); ++k) builder.edge(chain[k].text, chain[k + 1].text, chain[k].line);
      continue;
    }
    auto attrs = read_attrs();
    auto it = attrs.find("module");
    if (it == attrs.end())
      throw Error(ErrorCode::SyntaxError, detail::at_line(first.line) + "node '" + first.text + "' lacks a module attribute");
    builder.node(first.text, it->second, first.line);
  }
  return std::move(builder).finish(std::move(version_label), opts, report);
}

/// JSON mirror of the native format:
/// `{"nodes": [{"name": n, "module": m}, ...], "edges": [{"caller": a, "callee": b}, ...]}`.
/// Line numbers in diagnostics are 1-based array positions.
inline CallGraph parse_json_graph(std::string_view text, std::string version_label, const ParseOptions& opts = {},
                                  ParseReport* report = nullptr) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::SyntaxError, e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array())
    throw Error(ErrorCode::SyntaxError, "expected an object with a 'nodes' array");

  auto str_field = [](const nlohmann::json& obj, const char* key, std::size_t pos) {
    if (!obj.is_object() || !obj.contains(key) || !obj[key].is_string())
      throw Error(ErrorCode::SyntaxError, detail::at_line(pos) + "missing string field '" + key + "'");
    return obj[key].get<std::string>();
  };

  detail::GraphBuilder builder;
  std::size_t pos = 0;
  for (const auto& n : doc["nodes"]) {
    ++pos;
    builder.node(str_field(n, "name", pos), str_field(n, "module", pos), pos);
  }
  if (doc.contains("edges")) {
    if (!doc["edges"].is_array()) throw Error(ErrorCode::SyntaxError, "'edges' must be an array");
    pos = 0;
    for (const auto& e : doc["edges"]) {
      ++pos;
      builder.edge(str_field(e, "caller", pos), str_field(e, "callee", pos), pos);
    }
  }
  return std::move(builder).finish(std::move(version_label), opts, report);
}

enum class GraphFormat { Native, Dot, Json };

inline GraphFormat detect_format(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".dot" || ext == ".gv") return GraphFormat::Dot;
  if (ext == ".json") return GraphFormat::Json;
  return GraphFormat::Native;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline CallGraph read_graph_file(const std::filesystem::path& path, std::string version_label,
                                 const ParseOptions& opts = {}, ParseReport* report = nullptr) {
  auto text = read_text_file(path);
  switch (detect_format(path)) {
    case GraphFormat::Dot: return parse_dot_graph(text, std::move(version_label), opts, report);
    case GraphFormat::Json: return parse_json_graph(text, std::move(version_label), opts, report);
    case GraphFormat::Native: break;
  }
  return parse_graph_file(text, std::move(version_label), opts, report);
}

struct ManifestEntry {
  std::string version_label;
  std::filesystem::path path;
};

struct Manifest {
  std::string system_label;
  std::vector<ManifestEntry> entries;
};

/// Checks the manifest invariants: non-empty, unique labels, files present.
inline void validate_manifest(const Manifest& m) {
  if (m.entries.empty()) throw Error(ErrorCode::InvalidManifest, "manifest lists no versions");
  std::set<std::string> labels;
  for (const auto& e : m.entries) {
    if (e.version_label.empty()) throw Error(ErrorCode::InvalidManifest, "empty version label");
    if (!labels.insert(e.version_label).second)
      throw Error(ErrorCode::DuplicateVersion, "duplicate version label '" + e.version_label + "'");
  }
  for (const auto& e : m.entries)
    if (!std::filesystem::is_regular_file(e.path))
      throw Error(ErrorCode::MissingFile, "version '" + e.version_label + "': no file at '" + e.path.string() + "'");
}

/// Parses manifest JSON; relative paths resolve against `base_dir`. Does not
/// touch the filesystem (see validate_manifest).
inline Manifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir = {}) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidManifest, e.what());
  }
  if (!doc.is_object() || !doc.contains("system") || !doc["system"].is_string() || !doc.contains("versions") ||
      !doc["versions"].is_array())
    throw Error(ErrorCode::InvalidManifest, "expected {\"system\": ..., \"versions\": [...]}");
  Manifest m;
  m.system_label = doc["system"].get<std::string>();
  for (const auto& v : doc["versions"]) {
    if (!v.is_object() || !v.contains("label") || !v["label"].is_string() || !v.contains("path") ||
        !v["path"].is_string())
      throw Error(ErrorCode::InvalidManifest, "each version needs string 'label' and 'path'");
    std::filesystem::path p = v["path"].get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    m.entries.push_back({v["label"].get<std::string>(), p});
  }
  return m;
}

inline Manifest load_manifest(const std::filesystem::path& path) {
  auto m = parse_manifest(read_text_file(path), path.parent_path());
  validate_manifest(m);
  return m;
}

inline std::string manifest_to_json(const Manifest& m) {
  nlohmann::ordered_json doc;
  doc["system"] = m.system_label;
  doc["versions"] = nlohmann::ordered_json::array();
  for (const auto& e : m.entries)
    doc["versions"].push_back({{"label", e.version_label}, {"path", e.path.generic_string()}});
  return doc.dump(2) + "\n";
}

/// Parses every version (concurrently when jobs > 1) in manifest order. Errors
/// are re-raised with the failing version's label; the earliest failing
/// version wins so diagnostics do not depend on scheduling.
inline VersionSeries load_series(const Manifest& manifest, const ParseOptions& opts = {}, std::size_t jobs = 1,
                                 std::vector<ParseReport>* reports = nullptr) {
  validate_manifest(manifest);
  const auto n = manifest.entries.size();
  std::vector<std::optional<CallGraph>> graphs(n);
  std::vector<ParseReport> local(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    const auto& e = manifest.entries[i];
    try {
      graphs[i] = read_graph_file(e.path, e.version_label, opts, &local[i]);
    } catch (const Error& err) {
      throw Error(err.code(), "version '" + e.version_label + "' (" + e.path.string() + "): " + err.detail());
    }
  });
  std::vector<CallGraph> out;
  out.reserve(n);
  for (auto& g : graphs) out.push_back(std::move(*g));
  if (reports) *reports = std::move(local);
  return VersionSeries(manifest.system_label, std::move(out));
}

}  // namespace cge
