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

// Runs the faraug binary and builds a small on-disk corpus for it.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "faraug/classical_aug.hpp"
#include "faraug/manifest.hpp"
#include "faraug/report.hpp"
#include "faraug/scoring.hpp"
#include "test_signals.hpp"

namespace faraug::testing {

struct CliResult {
  int rc = -1;
  std::string out, err;
};

inline std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

inline CliResult run_cli(const std::vector<std::string>& args,
                         const std::string& env = "") {
  static int counter = 0;
  const auto err_file = std::filesystem::temp_directory_path() /
                        ("faraug_cli_err_" + std::to_string(::getpid()) + "_" +
                         std::to_string(counter++));
  std::string cmd = env + (env.empty() ? "" : " ") + shell_quote(FARAUG_CLI_PATH);
  for (const auto& a : args) cmd += " " + shell_quote(a);
  cmd += " 2>" + shell_quote(err_file.string());
  CliResult r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof(buf), p)) > 0;) r.out.append(buf, n);
  const int status = ::pclose(p);
  r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = read_text_file(err_file);
  std::filesystem::remove(err_file);
  return r;
}

/// Far training speakers (reverberant), near speakers (dry), an evaluation
/// set and a trial list, all under `dir`:
///   far.tsv near.tsv eval.tsv trials.txt wav/*.wav
struct PipelineCorpus {
  std::filesystem::path dir;
  Manifest far, near, eval;
  std::vector<Trial> trials;
};

inline PipelineCorpus make_pipeline_corpus(const std::filesystem::path& dir,
                                           int far_speakers = 4, int near_speakers = 3,
                                           int eval_speakers = 4) {
  PipelineCorpus c;
  c.dir = dir;
  std::filesystem::create_directories(dir / "wav");
  std::uint64_t seed = 1000;
  auto add = [&](Manifest& m, const std::string& prefix, int speakers, Domain d,
                 double rt60) {
    for (int s = 0; s < speakers; ++s) {
      const std::string spk = prefix + std::to_string(s);
      const double color = -0.7 + 1.4 * s / std::max(1, speakers - 1);
      for (int u = 0; u < 2; ++u) {
        Waveform w = burst_train(++seed, 2.0, 0.3, 0.4, color);
        if (rt60 > 0.0) w = apply_rir(w, synthetic_rir(rt60, ++seed));
        const std::string id = spk + "-" + std::to_string(u);
        write_wav(w, dir / "wav" / (id + ".wav"));
        m.records.push_back({id, spk, "wav/" + id + ".wav", d});
      }
    }
  };
  add(c.far, "F", far_speakers, Domain::kFar, 0.6);
  add(c.near, "N", near_speakers, Domain::kNear, 0.0);
  add(c.eval, "E", eval_speakers, Domain::kFar, 0.6);
  write_manifest(c.far, dir / "far.tsv");
  write_manifest(c.near, dir / "near.tsv");
  write_manifest(c.eval, dir / "eval.tsv");
  for (int a = 0; a < eval_speakers; ++a)
    for (int b = 0; b < eval_speakers; ++b)
      c.trials.push_back({"E" + std::to_string(a) + "-0", "E" + std::to_string(b) + "-1",
                          a == b ? TrialLabel::kTarget : TrialLabel::kNontarget});
  write_trials(c.trials, dir / "trials.txt");
  return c;
}

}  // namespace faraug::testing
