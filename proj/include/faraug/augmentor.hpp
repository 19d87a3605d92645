// faraug/augmentor.hpp

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

// Adaptive augmentation planning and execution: far-field utterances are
// paired with near-field speaker references (training expansion) or
// enrollment/test utterances with each other (test-time cross conversion),
// and every job is one voice conversion through a codec backend.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "faraug/audio.hpp"
#include "faraug/codec.hpp"
#include "faraug/error.hpp"
#include "faraug/manifest.hpp"
#include "faraug/parallel.hpp"
#include "faraug/rng.hpp"
#include "faraug/scoring.hpp"

namespace faraug {

struct SpeakerPool {
  std::vector<std::string> far_speakers;   // sorted
  std::vector<std::string> near_speakers;  // sorted
  std::vector<std::string> far_utts;       // sorted
  std::map<std::string, std::vector<std::string>> utts_by_speaker;
  std::map<std::string, std::string> speaker_of;

  std::size_t q() const { return far_speakers.size(); }
  std::size_t t() const { return near_speakers.size(); }
};

inline SpeakerPool build_pool(const Manifest& far, const Manifest& near) {
  SpeakerPool pool;
  std::set<std::string> fs, ns;
  auto take = [&](const Manifest& m, Domain want, std::set<std::string>& spk) {
    for (const auto& r : m.records) {
      require(r.domain == want, ErrorCode::kInvalidArgument,
              "utterance '" + r.utt_id + "' is tagged " +
                  std::string(to_string(r.domain)) + " in the " +
                  std::string(to_string(want)) + "-field manifest");
      require(pool.speaker_of.emplace(r.utt_id, r.speaker_id).second,
              ErrorCode::kDuplicateId,
              "duplicate utt_id '" + r.utt_id + "' across manifests");
      spk.insert(r.speaker_id);
      pool.utts_by_speaker[r.speaker_id].push_back(r.utt_id);
      if (want == Domain::kFar) pool.far_utts.push_back(r.utt_id);
    }
  };
  take(far, Domain::kFar, fs);
  take(near, Domain::kNear, ns);
  for (const auto& s : fs)
    require(!ns.count(s), ErrorCode::kDuplicateId,
            "speaker '" + s + "' appears in both far and near manifests");
  pool.far_speakers.assign(fs.begin(), fs.end());
  pool.near_speakers.assign(ns.begin(), ns.end());
  std::sort(pool.far_utts.begin(), pool.far_utts.end());
  for (auto& [spk, utts] : pool.utts_by_speaker) std::sort(utts.begin(), utts.end());
  return pool;
}

struct AugJob {
  std::string src_utt_id;
  std::string spk_ref_utt_id;
  std::string out_utt_id;
  std::string out_speaker_label;
  bool operator==(const AugJob&) const = default;
};

struct AugPlan {
  std::uint64_t seed = 0;
  std::vector<AugJob> jobs;
  bool operator==(const AugPlan&) const = default;
};

inline std::string pseudo_utt_id(const std::string& src,
                                 const std::string& near_speaker,
                                 std::size_t index) {
  return src + "__as__" + near_speaker + "__" + std::to_string(index);
}

/// For every near speaker, k far-field utterances drawn uniformly without
/// replacement (with replacement only when k exceeds the supply), each
/// paired with a random utterance of that near speaker as reference.
/// Each near speaker draws from its own seed, derived from (seed, speaker).
inline AugPlan plan_train_aug(const SpeakerPool& pool, std::size_t k_per_near,
                              std::uint64_t seed) {
  AugPlan plan;
  plan.seed = seed;
  if (k_per_near == 0) return plan;
  require(pool.q() > 0 && !pool.far_utts.empty(), ErrorCode::kInvalidArgument,
          "far-field pool is empty");
  require(pool.t() > 0, ErrorCode::kInvalidArgument, "near-field pool is empty");
  const std::size_t supply = pool.far_utts.size();
  for (const auto& spk : pool.near_speakers) {
    Rng rng(derive_seed(seed, spk, "plan_train_aug"));
    std::vector<std::size_t> pick;
    if (k_per_near <= supply) {
      std::vector<std::size_t> idx(supply);
      for (std::size_t i = 0; i < supply; ++i) idx[i] = i;
      for (std::size_t i = 0; i < k_per_near; ++i) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(
            static_cast<std::int64_t>(i), static_cast<std::int64_t>(supply) - 1));
        std::swap(idx[i], idx[j]);
        pick.push_back(idx[i]);
      }
    } else {
      for (std::size_t i = 0; i < k_per_near; ++i)
        pick.push_back(static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(supply) - 1)));
    }
    const auto& refs = pool.utts_by_speaker.at(spk);
    for (std::size_t i = 0; i < pick.size(); ++i) {
      const auto& ref = refs[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(refs.size()) - 1))];
      const auto& src = pool.far_utts[pick[i]];
      plan.jobs.push_back({src, ref, pseudo_utt_id(src, spk, i), spk});
    }
  }
  return plan;
}

/// Two jobs per trial: e converted toward x's speaker and x toward e's.
/// Repeated trials produce the same ids and are kept once.
inline AugPlan plan_trial_crossaug(const std::vector<Trial>& trials,
                                   const Manifest& enroll, const Manifest& test) {
  std::map<std::string, std::string> enroll_spk, test_spk;
  for (const auto& r : enroll.records) enroll_spk[r.utt_id] = r.speaker_id;
  for (const auto& r : test.records) test_spk[r.utt_id] = r.speaker_id;
  AugPlan plan;
  std::set<std::string> seen;
  for (const auto& t : trials) {
    auto e = enroll_spk.find(t.enroll_utt);
    auto x = test_spk.find(t.test_utt);
    require(e != enroll_spk.end(), ErrorCode::kUnknownId,
            "trial enrollment utterance '" + t.enroll_utt + "' not in manifest");
    require(x != test_spk.end(), ErrorCode::kUnknownId,
            "trial test utterance '" + t.test_utt + "' not in manifest");
    AugJob to_test{t.enroll_utt, t.test_utt,
                   crossaug_to_test_id(t.enroll_utt, t.test_utt), x->second};
    AugJob to_enroll{t.test_utt, t.enroll_utt,
                     crossaug_to_enroll_id(t.enroll_utt, t.test_utt), e->second};
    for (auto* j : {&to_test, &to_enroll})
      if (seen.insert(j->out_utt_id).second) plan.jobs.push_back(std::move(*j));
  }
  return plan;
}

/// Labels of the real far data plus everything the plan produces.
inline std::set<std::string> label_space(const SpeakerPool& pool,
                                         const AugPlan& plan) {
  std::set<std::string> s(pool.far_speakers.begin(), pool.far_speakers.end());
  for (const auto& j : plan.jobs) s.insert(j.out_speaker_label);
  return s;
}

/// Distinct (source far speaker, target label) pairs realized by the plan.
inline std::set<std::pair<std::string, std::string>> realized_pairs(
    const SpeakerPool& pool, const AugPlan& plan) {
  std::set<std::pair<std::string, std::string>> s;
  for (const auto& j : plan.jobs)
    s.insert({pool.speaker_of.at(j.src_utt_id), j.out_speaker_label});
  return s;
}

// ---------------------------------------------------------------------------
// Plan file: "#seed\t<n>" then one TSV job per line.

inline std::string format_plan(const AugPlan& plan) {
  std::ostringstream os;
  os << "#seed\t" << plan.seed << '\n'
     << "# src_utt_id\tspk_ref_utt_id\tout_utt_id\tout_speaker_label\n";
  for (const auto& j : plan.jobs)
    os << j.src_utt_id << '\t' << j.spk_ref_utt_id << '\t' << j.out_utt_id
       << '\t' << j.out_speaker_label << '\n';
  return os.str();
}

inline void write_plan(const AugPlan& plan, const std::filesystem::path& path) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::kIo,
          "cannot write plan " + path.string());
  out << format_plan(plan);
}

inline AugPlan read_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::kFileNotFound,
          "cannot open plan " + path.string());
  AugPlan plan;
  bool have_seed = false;
  std::set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (line.rfind("#seed\t", 0) == 0) {
      try {
        plan.seed = std::stoull(line.substr(6));
      } catch (const std::exception&) {
        fail(ErrorCode::kMalformedHeader, where + ": bad seed line");
      }
      have_seed = true;
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, '\t');) cols.push_back(c);
    require(cols.size() == 4, ErrorCode::kMalformedHeader,
            where + ": expected 4 tab-separated columns");
    require(ids.insert(cols[2]).second, ErrorCode::kDuplicateId,
            where + ": duplicate out_utt_id '" + cols[2] + "'");
    plan.jobs.push_back({cols[0], cols[1], cols[2], cols[3]});
  }
  require(have_seed, ErrorCode::kMalformedHeader,
          path.string() + ": missing #seed header");
  return plan;
}

// ---------------------------------------------------------------------------
// Execution.

enum class JobStatus { kDone, kSkipped, kFailed };

struct JobOutcome {
  JobStatus status = JobStatus::kDone;
  std::string error;
};

struct ExecResult {
  Manifest manifest;  // successful and skipped jobs, plan order
  std::vector<JobOutcome> outcomes;
  std::size_t done = 0, skipped = 0, failed = 0;
};

inline std::filesystem::path job_output_path(const std::filesystem::path& out_dir,
                                             const AugJob& j) {
  return out_dir / (j.out_utt_id + ".wav");
}

/// Converted output, scaled down if its peak would clip (the speaker
/// subspace is gain invariant, so this leaves it untouched).
inline Waveform run_job(const CodecBackend& backend, const Waveform& src,
                        const Waveform& ref) {
  Waveform y = voice_convert(backend, src, ref);
  const float peak = peak_abs(y.samples);
  if (peak > 0.99f) {
    const double g = 0.99 / peak;
    for (auto& s : y.samples) s = static_cast<float>(s * g);
  }
  return y;
}

/// Runs every job whose output file is missing; existing outputs are
/// skipped so an interrupted run can be resumed. Job failures are recorded
/// per job. Output records are assembled in plan order.
inline ExecResult execute_plan(const AugPlan& plan,
                               const UtteranceCatalog& catalog,
                               const CodecBackend& backend,
                               const std::filesystem::path& out_dir,
                               unsigned workers = 1) {
  std::filesystem::create_directories(out_dir);
  const std::size_t n = plan.jobs.size();
  ExecResult res;
  res.outcomes.resize(n);
  parallel_for(n, workers, [&](std::size_t i) {
    const AugJob& j = plan.jobs[i];
    JobOutcome& o = res.outcomes[i];
    const auto out = job_output_path(out_dir, j);
    try {
      if (std::filesystem::exists(out)) {
        o.status = JobStatus::kSkipped;
        return;
      }
      const Waveform src =
          load_audio(catalog.at(j.src_utt_id).file, backend.sample_rate());
      const Waveform ref =
          load_audio(catalog.at(j.spk_ref_utt_id).file, backend.sample_rate());
      const Waveform y = run_job(backend, src, ref);
      auto tmp = out;
      tmp += ".part";
      write_wav(y, tmp, WavEncoding::kFloat32);
      std::filesystem::rename(tmp, out);
      o.status = JobStatus::kDone;
    } catch (const std::exception& e) {
      o.status = JobStatus::kFailed;
      o.error = j.out_utt_id + ": " + e.what();
    }
  });

  res.manifest.base_dir = out_dir;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& j = plan.jobs[i];
    switch (res.outcomes[i].status) {
      case JobStatus::kDone: ++res.done; break;
      case JobStatus::kSkipped: ++res.skipped; break;
      case JobStatus::kFailed: ++res.failed; continue;
    }
    const Domain d = catalog.contains(j.src_utt_id)
                         ? catalog.at(j.src_utt_id).record.domain
                         : Domain::kFar;
    res.manifest.records.push_back(
        {j.out_utt_id, j.out_speaker_label, j.out_utt_id + ".wav", d});
  }
  return res;
}

}  // namespace faraug
