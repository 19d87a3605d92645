// faraug/manifest.hpp

// Copyright 2026  The faraug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Utterance manifests: TSV "utt_id speaker_id path domain", '#' comments.
// Relative paths are resolved against the manifest's own directory.

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "faraug/error.hpp"

namespace faraug {

enum class Domain { kFar, kNear };

inline std::string_view to_string(Domain d) {
  return d == Domain::kFar ? "far" : "near";
}

inline Domain parse_domain(const std::string& s) {
  if (s == "far") return Domain::kFar;
  if (s == "near") return Domain::kNear;
  fail(ErrorCode::kInvalidArgument, "bad domain '" + s + "' (want far|near)");
}

struct UtteranceRecord {
  std::string utt_id;
  std::string speaker_id;
  std::string path;  // as written in the manifest
  Domain domain = Domain::kFar;
  bool operator==(const UtteranceRecord&) const = default;
};

struct Manifest {
  std::vector<UtteranceRecord> records;
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const UtteranceRecord& r) const {
    const std::filesystem::path p(r.path);
    return p.is_absolute() ? p : (base_dir / p).lexically_normal();
  }
  std::set<std::string> speakers() const {
    std::set<std::string> s;
    for (const auto& r : records) s.insert(r.speaker_id);
    return s;
  }
};

inline Manifest parse_manifest(std::istream& in, const std::string& name,
                               std::filesystem::path base_dir = {}) {
  Manifest m;
  m.base_dir = std::move(base_dir);
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, '\t');) cols.push_back(c);
    const std::string where = name + ":" + std::to_string(lineno);
    require(cols.size() == 4, ErrorCode::kMalformedHeader,
            where + ": expected 4 tab-separated columns, got " +
                std::to_string(cols.size()));
    for (const auto& c : cols)
      require(!c.empty(), ErrorCode::kMalformedHeader, where + ": empty column");
    UtteranceRecord r{cols[0], cols[1], cols[2], Domain::kFar};
    try {
      r.domain = parse_domain(cols[3]);
    } catch (const Error& e) {
      fail(ErrorCode::kMalformedHeader, where + ": " + e.what());
    }
    require(seen.insert(r.utt_id).second, ErrorCode::kDuplicateId,
            where + ": duplicate utt_id '" + r.utt_id + "'");
    m.records.push_back(std::move(r));
  }
  return m;
}

inline Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::kFileNotFound,
          "cannot open manifest " + path.string());
  return parse_manifest(in, path.string(),
                        std::filesystem::absolute(path).parent_path());
}

inline std::string format_manifest(const Manifest& m) {
  std::ostringstream os;
  os << "# utt_id\tspeaker_id\tpath\tdomain\n";
  for (const auto& r : m.records)
    os << r.utt_id << '\t' << r.speaker_id << '\t' << r.path << '\t'
       << to_string(r.domain) << '\n';
  return os.str();
}

inline void write_manifest(const Manifest& m, const std::filesystem::path& path) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::kIo,
          "cannot write manifest " + path.string());
  out << format_manifest(m);
  require(static_cast<bool>(out), ErrorCode::kIo,
          "write failed: " + path.string());
}

/// utt_id -> (record, resolved path) over several manifests; ids must be
/// unique across all of them.
class UtteranceCatalog {
 public:
  struct Entry {
    UtteranceRecord record;
    std::filesystem::path file;
  };

  void add(const Manifest& m) {
    for (const auto& r : m.records)
      require(entries_.emplace(r.utt_id, Entry{r, m.resolve(r)}).second,
              ErrorCode::kDuplicateId,
              "utt_id '" + r.utt_id + "' appears in more than one manifest");
  }
  const Entry& at(const std::string& id) const {
    auto it = entries_.find(id);
    require(it != entries_.end(), ErrorCode::kUnknownId,
            "unknown utterance id '" + id + "'");
    return it->second;
  }
  bool contains(const std::string& id) const { return entries_.count(id) > 0; }

 private:
  std::map<std::string, Entry> entries_;
};

}  // namespace faraug
