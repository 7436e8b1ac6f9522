#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cge/core_model.hpp"
#include "oracles.hpp"

namespace testutil {

/// Call graph over the given arcs; every endpoint is declared in module "m".
inline cge::CallGraph graph(std::initializer_list<std::pair<const char*, const char*>> arcs, std::string label = "v",
                            std::initializer_list<const char*> isolated = {}) {
  std::set<std::string> names(isolated.begin(), isolated.end());
  std::vector<cge::CallPair> pairs;
  for (auto [a, b] : arcs) {
    names.insert(a);
    names.insert(b);
    pairs.push_back({a, b});
  }
  std::vector<cge::Procedure> procs;
  for (const auto& n : names) procs.push_back({n, "m"});
  return cge::CallGraph::make(std::move(label), std::move(procs), std::move(pairs));
}

/// Call graph with nodes n0..n(count-1) and the given numeric arcs.
inline cge::CallGraph numbered_graph(std::size_t count, const std::vector<oracle::Arc>& arcs, std::string label = "v") {
  auto name = [](std::uint32_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "n%03u", i);
    return std::string(buf);
  };
  std::vector<cge::Procedure> procs;
  for (std::uint32_t i = 0; i < count; ++i) procs.push_back({name(i), "m"});
  std::vector<cge::CallPair> pairs;
  for (auto [u, v] : arcs) pairs.push_back({name(u), name(v)});
  return cge::CallGraph::make(std::move(label), std::move(procs), std::move(pairs));
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("cge-" + tag + "-" + std::to_string(rd()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
