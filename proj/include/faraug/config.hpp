// faraug/config.hpp

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

// Pipeline configuration, JSON on disk:
//
//   {
//     "seed": 7,
//     "workers": 4,
//     "paths": {"workdir": "work", "far_manifest": "far.tsv",
//               "near_manifest": "near.tsv"},
//     "codec": {"backend": "toy", "remote_url": ""},
//     "embedder": {"backend": "toy"},
//     "aug": {"snr_db": [0, 20], "speed_factors": [0.9, 1.0, 1.1],
//             "spec_time_mask_max": 10, "spec_freq_mask_max": 8,
//             "filter_db": [-6, 6], "shuffle_block_s": 0.5},
//     "scoring": {"fusion": "none", "include_cross_pair": false,
//                 "p_target": 0.01},
//     "plan": {"k_per_near": 5}
//   }
//
// Every key is optional.  Relative paths are taken relative to the config
// file.  Unknown keys are errors.

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "faraug/classical_aug.hpp"
#include "faraug/error.hpp"
#include "faraug/scoring.hpp"
#include "json.hpp"

namespace faraug {

struct Config {
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::filesystem::path workdir = "work";
  std::filesystem::path far_manifest;
  std::filesystem::path near_manifest;
  std::string codec_backend = "toy";
  std::string codec_remote_url;
  std::string embedder_backend = "toy";
  AugConfig aug;
  Fusion fusion = Fusion::kNone;
  bool include_cross_pair = false;
  double p_target = 0.01;
  int k_per_near = 5;
};

namespace detail {

using Json = nlohmann::json;

class ConfigReader {
 public:
  std::vector<std::string> problems;

  // Records keys of `obj` not in `known`.
  void known_keys(const Json& obj, const std::string& where,
                  std::initializer_list<const char*> known) {
    if (!obj.is_object()) {
      problems.push_back(where + ": expected an object");
      return;
    }
    const std::set<std::string> k(known.begin(), known.end());
    for (const auto& [key, _] : obj.items())
      if (!k.count(key)) problems.push_back(where + "." + key + ": unknown key");
  }

  template <class T>
  void get(const Json& obj, const char* key, const std::string& where, T& out) {
    if (!obj.is_object() || !obj.contains(key)) return;
    try {
      out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      problems.push_back(where + "." + key + ": wrong type (" +
                         std::string(obj.at(key).type_name()) + ")");
    }
  }

  void range(const Json& obj, const char* key, const std::string& where, double& lo,
             double& hi) {
    std::vector<double> v;
    get(obj, key, where, v);
    if (!obj.is_object() || !obj.contains(key)) return;
    if (v.size() != 2) {
      problems.push_back(where + "." + key + ": expected [lo, hi]");
      return;
    }
    lo = v[0];
    hi = v[1];
  }
};

}  // namespace detail

/// Parses and validates; all problems are reported together as kConfig.
/// With `check_paths`, manifests that are named must exist.
inline Config parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir,
                           bool check_paths = true) {
  detail::ConfigReader r;
  Config c;
  r.known_keys(j, "config",
               {"seed", "workers", "paths", "codec", "embedder", "aug", "scoring", "plan"});
  if (j.is_object() && j.contains("seed")) {
    if (j["seed"].is_number_unsigned())
      c.seed = j["seed"].get<std::uint64_t>();
    else
      r.problems.push_back("config.seed: must be a non-negative integer");
  }
  r.get(j, "workers", "config", c.workers);
  if (c.workers < 1) r.problems.push_back("config.workers: must be >= 1");

  auto resolve = [&](const std::string& p) -> std::filesystem::path {
    if (p.empty()) return {};
    const std::filesystem::path q(p);
    return q.is_absolute() ? q : (base_dir / q).lexically_normal();
  };
  if (j.is_object() && j.contains("paths")) {
    const auto& p = j["paths"];
    r.known_keys(p, "config.paths", {"workdir", "far_manifest", "near_manifest"});
    std::string workdir = c.workdir.string(), far, near;
    r.get(p, "workdir", "config.paths", workdir);
    r.get(p, "far_manifest", "config.paths", far);
    r.get(p, "near_manifest", "config.paths", near);
    c.workdir = resolve(workdir);
    c.far_manifest = resolve(far);
    c.near_manifest = resolve(near);
  } else {
    c.workdir = resolve(c.workdir.string());
  }
  if (check_paths)
    for (const auto& [name, path] : {std::pair{"far_manifest", c.far_manifest},
                                     std::pair{"near_manifest", c.near_manifest}})
      if (!path.empty() && !std::filesystem::exists(path))
        r.problems.push_back(std::string("config.paths.") + name + ": " + path.string() +
                             " does not exist");

  if (j.is_object() && j.contains("codec")) {
    const auto& p = j["codec"];
    r.known_keys(p, "config.codec", {"backend", "remote_url"});
    r.get(p, "backend", "config.codec", c.codec_backend);
    r.get(p, "remote_url", "config.codec", c.codec_remote_url);
  }
  if (c.codec_backend != "toy" && c.codec_backend != "remote")
    r.problems.push_back("config.codec.backend: '" + c.codec_backend +
                         "' is not one of toy, remote");
  if (j.is_object() && j.contains("embedder")) {
    r.known_keys(j["embedder"], "config.embedder", {"backend"});
    r.get(j["embedder"], "backend", "config.embedder", c.embedder_backend);
  }
  if (c.embedder_backend != "toy")
    r.problems.push_back("config.embedder.backend: '" + c.embedder_backend +
                         "' is not one of toy");

  if (j.is_object() && j.contains("aug")) {
    const auto& a = j["aug"];
    r.known_keys(a, "config.aug",
                 {"snr_db", "speed_factors", "spec_time_mask_max", "spec_freq_mask_max",
                  "filter_db", "shuffle_block_s"});
    r.range(a, "snr_db", "config.aug", c.aug.snr_db_lo, c.aug.snr_db_hi);
    r.get(a, "speed_factors", "config.aug", c.aug.speed_factors);
    r.get(a, "spec_time_mask_max", "config.aug", c.aug.spec_time_mask_max);
    r.get(a, "spec_freq_mask_max", "config.aug", c.aug.spec_freq_mask_max);
    r.range(a, "filter_db", "config.aug", c.aug.filter_db_lo, c.aug.filter_db_hi);
    r.get(a, "shuffle_block_s", "config.aug", c.aug.shuffle_block_s);
  }
  try {
    validate(c.aug);
  } catch (const Error& e) {
    r.problems.push_back(std::string("config.aug: ") + e.what());
  }

  if (j.is_object() && j.contains("scoring")) {
    const auto& s = j["scoring"];
    r.known_keys(s, "config.scoring", {"fusion", "include_cross_pair", "p_target"});
    std::string fusion = "none";
    r.get(s, "fusion", "config.scoring", fusion);
    try {
      c.fusion = parse_fusion(fusion);
    } catch (const Error& e) {
      r.problems.push_back(std::string("config.scoring.fusion: ") + e.what());
    }
    r.get(s, "include_cross_pair", "config.scoring", c.include_cross_pair);
    r.get(s, "p_target", "config.scoring", c.p_target);
  }
  if (!(c.p_target > 0.0 && c.p_target < 1.0))
    r.problems.push_back("config.scoring.p_target: must lie in (0, 1)");

  if (j.is_object() && j.contains("plan")) {
    r.known_keys(j["plan"], "config.plan", {"k_per_near"});
    r.get(j["plan"], "k_per_near", "config.plan", c.k_per_near);
  }
  if (c.k_per_near < 0) r.problems.push_back("config.plan.k_per_near: must be >= 0");

  if (!r.problems.empty()) {
    std::string msg = std::to_string(r.problems.size()) + " config problem(s):";
    for (const auto& p : r.problems) msg += " [" + p + "]";
    fail(ErrorCode::kConfig, msg);
  }
  return c;
}

inline Config load_config(const std::filesystem::path& path, bool check_paths = true) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::kFileNotFound,
          "cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfig, path.string() + ": " + e.what());
  }
  return parse_config(j, std::filesystem::absolute(path).parent_path(), check_paths);
}

inline nlohmann::ordered_json config_to_json(const Config& c) {
  nlohmann::ordered_json j;
  if (c.seed) j["seed"] = *c.seed;
  j["workers"] = c.workers;
  j["paths"] = {{"workdir", c.workdir.string()},
                {"far_manifest", c.far_manifest.string()},
                {"near_manifest", c.near_manifest.string()}};
  j["codec"] = {{"backend", c.codec_backend}, {"remote_url", c.codec_remote_url}};
  j["embedder"] = {{"backend", c.embedder_backend}};
  j["aug"] = {{"snr_db", {c.aug.snr_db_lo, c.aug.snr_db_hi}},
              {"speed_factors", c.aug.speed_factors},
              {"spec_time_mask_max", c.aug.spec_time_mask_max},
              {"spec_freq_mask_max", c.aug.spec_freq_mask_max},
              {"filter_db", {c.aug.filter_db_lo, c.aug.filter_db_hi}},
              {"shuffle_block_s", c.aug.shuffle_block_s}};
  j["scoring"] = {{"fusion", c.fusion == Fusion::kNone ? "none" : "crossaug_mean"},
                  {"include_cross_pair", c.include_cross_pair},
                  {"p_target", c.p_target}};
  j["plan"] = {{"k_per_near", c.k_per_near}};
  return j;
}

}  // namespace faraug
