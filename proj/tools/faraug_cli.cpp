// tools/faraug_cli.cpp

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

// faraug: command-line front end.  Data goes to files or stdout, logs to
// stderr.  Failures print one line "error: <code>: <message>" and exit 1;
// usage errors exit 2.

#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "faraug/augmentor.hpp"
#include "faraug/classical_aug.hpp"
#include "faraug/config.hpp"
#include "faraug/embedder.hpp"
#include "faraug/features.hpp"
#include "faraug/manifest.hpp"
#include "faraug/parallel.hpp"
#include "faraug/remote_codec.hpp"
#include "faraug/report.hpp"
#include "faraug/rt60.hpp"
#include "faraug/scoring.hpp"
#include "faraug/toy_codec.hpp"

namespace fs = std::filesystem;
using namespace faraug;

namespace {

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int workers = 0;
  bool dry_run = false;
  bool quiet = false;
  std::string codec;      // overrides codec.backend
  std::string codec_url;  // overrides codec.remote_url
};

Globals g;
Config cfg;

void log(const std::string& msg) {
  if (!g.quiet) std::cerr << "faraug: " << msg << '\n';
}

std::uint64_t require_seed(const char* what) {
  if (g.seed) return *g.seed;
  if (cfg.seed) return *cfg.seed;
  fail(ErrorCode::kConfig, std::string(what) +
                               " is stochastic: pass --seed or set \"seed\" in the config");
}

unsigned workers() { return resolve_workers(g.workers, static_cast<unsigned>(cfg.workers)); }

std::unique_ptr<CodecBackend> make_codec() {
  const std::string backend = g.codec.empty() ? cfg.codec_backend : g.codec;
  if (backend == "toy") return std::make_unique<ToyCodec>();
  if (backend == "remote")
    return std::make_unique<RemoteCodec>(
        resolve_codec_url(g.codec_url.empty() ? cfg.codec_remote_url : g.codec_url));
  fail(ErrorCode::kConfig, "unknown codec backend '" + backend + "'");
}

Manifest load_manifests(const std::vector<std::string>& paths) {
  // Several manifests become one with absolute paths.
  Manifest all;
  std::set<std::string> seen;
  for (const auto& p : paths) {
    const Manifest m = read_manifest(p);
    for (auto r : m.records) {
      require(seen.insert(r.utt_id).second, ErrorCode::kDuplicateId,
              "utt_id '" + r.utt_id + "' appears in more than one manifest");
      r.path = m.resolve(r).string();
      all.records.push_back(std::move(r));
    }
  }
  return all;
}

void write_output_manifest(const Manifest& m, const fs::path& path) {
  write_manifest(m, path);
  log("wrote " + std::to_string(m.records.size()) + " records to " + path.string());
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

// --- manifest validate ------------------------------------------------------

struct ManifestValidate {
  std::string manifest;
  bool check_audio = false;
  void run() const {
    const Manifest m = read_manifest(manifest);
    std::size_t far = 0, missing = 0;
    std::string first_missing;
    for (const auto& r : m.records) {
      far += r.domain == Domain::kFar;
      const fs::path p = m.resolve(r);
      if (!fs::exists(p)) {
        if (!missing++) first_missing = r.utt_id + " (" + p.string() + ")";
        continue;
      }
      if (check_audio) read_wav(p);
    }
    require(missing == 0, ErrorCode::kFileNotFound,
            std::to_string(missing) + " audio file(s) missing, first: " + first_missing);
    std::cout << "records\t" << m.records.size() << "\nspeakers\t" << m.speakers().size()
              << "\nfar\t" << far << "\nnear\t" << m.records.size() - far << '\n';
  }
};

// --- features extract -------------------------------------------------------

struct FeaturesExtract {
  std::vector<std::string> manifests;
  std::string out;
  bool mean_norm = false;
  void run() const {
    const Manifest m = load_manifests(manifests);
    const fs::path ark = fs::path(out) / "feats.ark", idx = fs::path(out) / "feats.idx";
    if (g.dry_run) {
      std::cout << "would write " << m.records.size() << " records to " << ark.string() << '\n';
      return;
    }
    std::vector<MelSpectrogram> mels(m.records.size());
    parallel_for(mels.size(), workers(), [&](std::size_t i) {
      mels[i] = log_mel(load_audio(m.records[i].path, kWorkingRate), mean_norm);
    });
    fs::create_directories(out);
    FeatureWriter w(ark, idx);
    for (std::size_t i = 0; i < mels.size(); ++i) w.append(m.records[i].utt_id, mels[i]);
    log("wrote features for " + std::to_string(mels.size()) + " utterances to " + ark.string());
  }
};

// --- augment classical ------------------------------------------------------

struct AugmentClassical {
  std::string method;
  std::vector<std::string> manifests;
  std::string out;
  std::optional<double> snr;
  std::string noise_manifest, rir_manifest;
  std::vector<double> factors;

  void run() const {
    const Manifest m = load_manifests(manifests);
    const fs::path dir(out);
    AugConfig aug = cfg.aug;
    if (!factors.empty()) aug.speed_factors = factors;
    validate(aug);
    const bool stochastic = method != "speed";
    const std::uint64_t seed = stochastic ? require_seed("augment classical") : 0;
    aug.seed = seed;

    if (method == "specaug" || method == "filteraug") return run_mel(m, aug);

    // Output jobs: (record index, factor) for speed, one per record otherwise.
    struct Job {
      std::size_t rec;
      double factor;
      UtteranceRecord out;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < m.records.size(); ++i) {
      const auto& r = m.records[i];
      if (method == "speed") {
        for (double f : aug.speed_factors) {
          const std::string id = r.utt_id + "__sp" + fmt("%g", f);
          jobs.push_back({i, f, {id, speed_perturbed_label(r.speaker_id, f), id + ".wav", r.domain}});
        }
      } else {
        const std::string id = r.utt_id + "__" + method;
        jobs.push_back({i, 1.0, {id, r.speaker_id, id + ".wav", r.domain}});
      }
    }
    if (g.dry_run) {
      for (const auto& j : jobs) std::cout << "would write " << (dir / j.out.path).string() << '\n';
      return;
    }
    Manifest noise, rirs;
    if (method == "noise" && !noise_manifest.empty()) noise = load_manifests({noise_manifest});
    if (method == "rir" && !rir_manifest.empty()) rirs = load_manifests({rir_manifest});
    fs::create_directories(dir);

    parallel_for(jobs.size(), workers(), [&](std::size_t k) {
      const Job& j = jobs[k];
      const auto& r = m.records[j.rec];
      const Waveform x = load_audio(r.path, kWorkingRate);
      Rng rng(derive_seed(seed, r.utt_id, "augment_" + method));
      Waveform y;
      if (method == "noise") {
        const double s = snr ? *snr : rng.uniform(aug.snr_db_lo, aug.snr_db_hi);
        Waveform n;
        if (noise.records.empty()) {
          // No noise corpus: seeded white noise.
          n = {std::vector<float>(x.size()), x.sample_rate};
          for (auto& v : n.samples) v = static_cast<float>(rng.normal());
        } else {
          const auto pick = static_cast<std::size_t>(
              rng.uniform_int(0, static_cast<std::int64_t>(noise.records.size()) - 1));
          n = load_audio(noise.records[pick].path, kWorkingRate);
        }
        y = add_noise_snr(x, n, s);
      } else if (method == "rir") {
        Waveform h;
        if (rirs.records.empty()) {
          // No RIR corpus: exponentially decaying noise, RT60 in [0.2, 1.0] s.
          const double rt = rng.uniform(0.2, 1.0);
          const auto len = static_cast<std::size_t>(rt * x.sample_rate);
          h = {std::vector<float>(len), x.sample_rate};
          for (std::size_t i = 0; i < len; ++i)
            h.samples[i] = static_cast<float>(
                rng.normal() * std::exp(-kLn1000 * static_cast<double>(i) / (rt * x.sample_rate)));
          h.samples[0] = 1.0f;
        } else {
          const auto pick = static_cast<std::size_t>(
              rng.uniform_int(0, static_cast<std::int64_t>(rirs.records.size()) - 1));
          h = load_audio(rirs.records[pick].path, kWorkingRate);
        }
        y = apply_rir(x, h);
      } else if (method == "speed") {
        y = speed_perturb(x, j.factor);
      } else if (method == "shuffle") {
        y = shuffle_augment(x, aug, rng);
      } else {
        fail(ErrorCode::kInvalidArgument, "unknown method '" + method + "'");
      }
      write_wav(y, dir / j.out.path);
    });
    Manifest outm;
    for (const auto& j : jobs) outm.records.push_back(j.out);
    write_output_manifest(outm, dir / "manifest.tsv");
  }

  void run_mel(const Manifest& m, const AugConfig& aug) const {
    const fs::path ark = fs::path(out) / "feats.ark", idx = fs::path(out) / "feats.idx";
    if (g.dry_run) {
      std::cout << "would write " << m.records.size() << " records to " << ark.string() << '\n';
      return;
    }
    std::vector<MelSpectrogram> mels(m.records.size());
    parallel_for(mels.size(), workers(), [&](std::size_t i) {
      const auto& r = m.records[i];
      Rng rng(derive_seed(aug.seed, r.utt_id, "augment_" + method));
      const MelSpectrogram mel = log_mel(load_audio(r.path, kWorkingRate));
      mels[i] = method == "specaug" ? spec_augment(mel, aug, rng) : filter_augment(mel, aug, rng);
    });
    fs::create_directories(out);
    FeatureWriter w(ark, idx);
    for (std::size_t i = 0; i < mels.size(); ++i)
      w.append(m.records[i].utt_id + "__" + method, mels[i]);
    log("wrote " + std::to_string(mels.size()) + " augmented feature records to " + ark.string());
  }
};

// --- augment adaptive -------------------------------------------------------

void report_exec(const ExecResult& r, const fs::path& out) {
  for (const auto& o : r.outcomes)
    if (o.status == JobStatus::kFailed) log("job failed: " + o.error);
  write_output_manifest(r.manifest, out / "manifest.tsv");
  log(std::to_string(r.done) + " done, " + std::to_string(r.skipped) + " skipped, " +
      std::to_string(r.failed) + " failed");
  require(r.failed == 0, ErrorCode::kBackendError,
          std::to_string(r.failed) + " of " + std::to_string(r.outcomes.size()) +
              " jobs failed; rerun to resume");
}

struct AdaptivePlan {
  std::string far, near, out;
  std::optional<int> k;
  void run() const {
    const std::string far_p = far.empty() ? cfg.far_manifest.string() : far;
    const std::string near_p = near.empty() ? cfg.near_manifest.string() : near;
    require(!far_p.empty() && !near_p.empty(), ErrorCode::kConfig,
            "adaptive plan needs --far and --near (or paths.far_manifest/near_manifest)");
    const int kk = k ? *k : cfg.k_per_near;
    require(kk >= 0, ErrorCode::kInvalidArgument, "--k must be >= 0");
    const SpeakerPool pool = build_pool(read_manifest(far_p), read_manifest(near_p));
    const AugPlan plan =
        plan_train_aug(pool, static_cast<std::size_t>(kk), require_seed("augment adaptive plan"));
    log("q=" + std::to_string(pool.q()) + " t=" + std::to_string(pool.t()) +
        " jobs=" + std::to_string(plan.jobs.size()) +
        " labels=" + std::to_string(label_space(pool, plan).size()));
    if (g.dry_run || out.empty()) {
      std::cout << format_plan(plan);
      return;
    }
    write_plan(plan, out);
    log("wrote plan to " + out);
  }
};

struct AdaptiveRun {
  std::string plan;
  std::vector<std::string> manifests;
  std::string out;
  void run() const {
    const AugPlan p = read_plan(plan);
    std::vector<std::string> ms = manifests;
    if (ms.empty()) {
      for (const auto& c : {cfg.far_manifest, cfg.near_manifest})
        if (!c.empty()) ms.push_back(c.string());
    }
    require(!ms.empty(), ErrorCode::kConfig, "adaptive run needs --manifest");
    UtteranceCatalog cat;
    cat.add(load_manifests(ms));
    if (g.dry_run) {
      for (const auto& j : p.jobs) {
        cat.at(j.src_utt_id);
        cat.at(j.spk_ref_utt_id);
        const fs::path o = job_output_path(out, j);
        std::cout << (fs::exists(o) ? "exists " : "would write ") << o.string() << '\n';
      }
      return;
    }
    const auto codec = make_codec();
    log("running " + std::to_string(p.jobs.size()) + " jobs with " + codec->id() + " on " +
        std::to_string(workers()) + " worker(s)");
    report_exec(execute_plan(p, cat, *codec, out, workers()), out);
  }
};

struct TrialsCrossaug {
  std::string trials, enroll, test, out;
  void run() const {
    const auto ts = read_trials(trials);
    const Manifest em = load_manifests({enroll});
    const Manifest xm = test.empty() || test == enroll ? em : load_manifests({test});
    const AugPlan p = plan_trial_crossaug(ts, em, xm);
    if (g.dry_run) {
      std::cout << format_plan(p);
      return;
    }
    UtteranceCatalog cat;
    cat.add(em);
    Manifest extra;
    for (const auto& r : xm.records)
      if (!cat.contains(r.utt_id)) extra.records.push_back(r);
    cat.add(extra);
    fs::create_directories(out);
    write_plan(p, fs::path(out) / "plan.tsv");
    const auto codec = make_codec();
    log("cross-augmenting " + std::to_string(ts.size()) + " trials: " +
        std::to_string(p.jobs.size()) + " conversions");
    report_exec(execute_plan(p, cat, *codec, out, workers()), out);
  }
};

// --- embed ------------------------------------------------------------------

struct Embed {
  std::vector<std::string> manifests;
  std::string out;
  void run() const {
    const Manifest m = load_manifests(manifests);
    if (g.dry_run) {
      std::cout << "would embed " << m.records.size() << " utterances into " << out << '\n';
      return;
    }
    const ToyEmbedder emb;
    std::vector<SpeakerEmbedding> e(m.records.size());
    parallel_for(e.size(), workers(), [&](std::size_t i) {
      e[i] = embed(emb, m.records[i].utt_id, load_audio(m.records[i].path, kWorkingRate));
    });
    if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
    write_embeddings(e, out);
    log("wrote " + std::to_string(e.size()) + " " + emb.id() + " embeddings to " + out);
  }
};

// --- eval -------------------------------------------------------------------

struct EvalScore {
  std::string trials;
  std::vector<std::string> embeddings;
  std::string fusion, out;
  bool cross_pair = false;
  void run() const {
    const auto ts = read_trials(trials);
    EmbeddingTable table;
    for (const auto& e : embeddings) table = read_embeddings(e, std::move(table));
    const Fusion f = fusion.empty() ? cfg.fusion : parse_fusion(fusion);
    const ScoreSet s = score_trials(ts, table, f, cross_pair || cfg.include_cross_pair);
    if (g.dry_run || out.empty()) {
      write_scores(s, std::cout);
      return;
    }
    write_scores(s, fs::path(out));
    log("wrote " + std::to_string(s.size()) + " scores to " + out);
  }
};

struct EvalMetrics {
  std::string scores, trials, out, det, name;
  std::optional<double> p_target;
  void run() const {
    const LabeledScores ls = join_labels(read_scores(scores), read_trials(trials));
    DcfParams params;
    params.p_target = p_target ? *p_target : cfg.p_target;
    const EvalReport r = evaluate(ls, params, name.empty() ? fs::path(scores).stem().string() : name);
    if (g.dry_run || out.empty())
      std::cout << to_json(r).dump(2) << '\n';
    else
      emit_report(r, out);
    if (!det.empty() && !g.dry_run) write_text_file(det, det_curve_svg(ls, r.name));
    log("EER " + fmt("%.4f", 100.0 * r.eer) + "%  minDCF " + fmt("%.4f", r.min_dcf));
  }
};

// --- rt60 -------------------------------------------------------------------

struct Rt60EstimateCmd {
  std::vector<std::string> manifests;
  std::vector<std::string> labels;
  std::string out, plot;
  void run() const {
    require(labels.empty() || labels.size() == manifests.size(), ErrorCode::kInvalidArgument,
            "--label must be given once per --manifest");
    std::vector<std::pair<std::string, UtteranceRecord>> items;
    for (std::size_t k = 0; k < manifests.size(); ++k) {
      const Manifest m = load_manifests({manifests[k]});
      const std::string lab = labels.empty() ? fs::path(manifests[k]).stem().string() : labels[k];
      for (const auto& r : m.records) items.push_back({lab, r});
    }
    if (g.dry_run) {
      std::cout << "would estimate RT60 for " << items.size() << " utterances\n";
      return;
    }
    std::vector<std::optional<Rt60Estimate>> est(items.size());
    std::vector<std::string> why(items.size());
    parallel_for(items.size(), workers(), [&](std::size_t i) {
      try {
        est[i] = estimate_rt60(load_audio(items[i].second.path, kWorkingRate));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kTooShort && e.code() != ErrorCode::kNoDecaySegments) throw;
        why[i] = error_code_name(e.code());
      }
    });
    std::ostringstream tsv;
    tsv << "# utt_id\tlabel\trt60_s\tconfidence\tn_segments\n";
    std::vector<LabeledRt60> pts;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (!est[i]) {
        log("no estimate for " + items[i].second.utt_id + ": " + why[i]);
        continue;
      }
      tsv << items[i].second.utt_id << '\t' << items[i].first << '\t'
          << fmt("%.6f", est[i]->rt60_s) << '\t' << fmt("%.6f", est[i]->confidence) << '\t'
          << est[i]->n_segments << '\n';
      pts.push_back({items[i].first, *est[i]});
    }
    if (out.empty())
      std::cout << tsv.str();
    else
      write_text_file(out, tsv.str());
    if (!plot.empty()) emit_rt60_plot(pts, plot);
    log("estimated RT60 for " + std::to_string(pts.size()) + " of " +
        std::to_string(items.size()) + " utterances");
  }
};

struct Rt60Compare {
  std::string a, b, c;
  void run() const {
    const auto r = compare_rt60(load_audio(a, kWorkingRate), load_audio(b, kWorkingRate),
                                load_audio(c, kWorkingRate));
    std::cout << "rt60_a\t" << fmt("%.6f", r.rt60_a) << "\nrt60_b\t" << fmt("%.6f", r.rt60_b)
              << "\nrt60_c\t" << fmt("%.6f", r.rt60_c) << "\ncloser_to\t"
              << to_string(r.closer_to) << '\n';
  }
};

// --- report plot ------------------------------------------------------------

struct ReportPlot {
  std::vector<std::string> reports;
  std::string out;
  void run() const {
    std::vector<EvalReport> rs;
    for (const auto& p : reports) rs.push_back(read_report(p));
    const std::string svg = eer_chart_svg(rs);
    if (g.dry_run || out.empty())
      std::cout << svg;
    else
      write_text_file(out, svg);
  }
};

int run_cli(int argc, char** argv) {
  CLI::App app{"faraug: far-field speaker verification augmentation and evaluation"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  app.add_option("--config", g.config_path, "JSON config file");
  app.add_option("--seed", g.seed, "master seed (overrides config)");
  app.add_option("--workers", g.workers, "parallel workers (else FARAUG_WORKERS, else config)");
  app.add_flag("--dry-run", g.dry_run, "print what would be done, touch nothing");
  app.add_flag("-q,--quiet", g.quiet, "no log output");
  app.add_option("--codec", g.codec, "codec backend: toy|remote")
      ->check(CLI::IsMember({"toy", "remote"}));
  app.add_option("--codec-url", g.codec_url, "remote codec base URL");

  std::function<void()> action;
  auto bind = [&](CLI::App* sub, auto& cmd) {
    sub->callback([&action, &cmd] { action = [&cmd] { cmd.run(); }; });
  };

  // manifest
  auto* man = app.add_subcommand("manifest", "manifest utilities")->require_subcommand(1);
  ManifestValidate mv;
  auto* man_v = man->add_subcommand("validate", "parse a manifest and check its audio exists");
  man_v->add_option("--manifest", mv.manifest)->required();
  man_v->add_flag("--check-audio", mv.check_audio, "also decode every file");
  bind(man_v, mv);

  // features
  auto* feat = app.add_subcommand("features", "feature extraction")->require_subcommand(1);
  FeaturesExtract fe;
  auto* feat_x = feat->add_subcommand("extract", "log-mel features to an archive");
  feat_x->add_option("--manifest", fe.manifests)->required();
  feat_x->add_option("--out", fe.out, "output directory")->required();
  feat_x->add_flag("--mean-norm", fe.mean_norm);
  bind(feat_x, fe);

  // augment
  auto* aug = app.add_subcommand("augment", "augmentation")->require_subcommand(1);
  AugmentClassical ac;
  auto* aug_c = aug->add_subcommand("classical", "baseline augmentations");
  aug_c->add_option("--method", ac.method)
      ->required()
      ->check(CLI::IsMember({"noise", "rir", "speed", "shuffle", "specaug", "filteraug"}));
  aug_c->add_option("--manifest", ac.manifests)->required();
  aug_c->add_option("--out", ac.out, "output directory")->required();
  aug_c->add_option("--snr", ac.snr, "fixed SNR in dB (noise)");
  aug_c->add_option("--noise-manifest", ac.noise_manifest);
  aug_c->add_option("--rir-manifest", ac.rir_manifest);
  aug_c->add_option("--factors", ac.factors, "speed factors")->delimiter(',');
  bind(aug_c, ac);

  auto* ada = aug->add_subcommand("adaptive", "environment-preserving augmentation")
                  ->require_subcommand(1);
  AdaptivePlan ap;
  auto* ada_p = ada->add_subcommand("plan", "plan training-pool conversions");
  ada_p->add_option("--far", ap.far, "far-field manifest");
  ada_p->add_option("--near", ap.near, "near-field manifest");
  ada_p->add_option("--k", ap.k, "conversions per near speaker");
  ada_p->add_option("--out", ap.out, "plan file (stdout if omitted)");
  bind(ada_p, ap);
  AdaptiveRun ar;
  auto* ada_r = ada->add_subcommand("run", "execute a plan (resumable)");
  ada_r->add_option("--plan", ar.plan)->required();
  ada_r->add_option("--manifest", ar.manifests, "manifests the plan refers to");
  ada_r->add_option("--out", ar.out, "output directory")->required();
  bind(ada_r, ar);

  TrialsCrossaug tc;
  auto* aug_t = aug->add_subcommand("trials-crossaug", "cross-convert every trial pair");
  aug_t->add_option("--trials", tc.trials)->required();
  aug_t->add_option("--enroll", tc.enroll, "enrollment manifest")->required();
  aug_t->add_option("--test", tc.test, "test manifest (defaults to --enroll)");
  aug_t->add_option("--out", tc.out, "output directory")->required();
  bind(aug_t, tc);

  // embed
  Embed em;
  auto* emb = app.add_subcommand("embed", "speaker embeddings");
  emb->add_option("--manifest", em.manifests)->required();
  emb->add_option("--out", em.out)->required();
  bind(emb, em);

  // eval
  auto* ev = app.add_subcommand("eval", "scoring and metrics")->require_subcommand(1);
  EvalScore es;
  auto* ev_s = ev->add_subcommand("score", "cosine trial scores");
  ev_s->add_option("--trials", es.trials)->required();
  ev_s->add_option("--embeddings", es.embeddings)->required();
  ev_s->add_option("--fusion", es.fusion)->check(CLI::IsMember({"none", "crossaug_mean"}));
  ev_s->add_flag("--cross-pair", es.cross_pair, "add cos(E(e'), E(x')) to the fused mean");
  ev_s->add_option("--out", es.out, "score file (stdout if omitted)");
  bind(ev_s, es);
  EvalMetrics emx;
  auto* ev_m = ev->add_subcommand("metrics", "EER and minDCF report");
  ev_m->add_option("--scores", emx.scores)->required();
  ev_m->add_option("--trials", emx.trials)->required();
  ev_m->add_option("--out", emx.out, "JSON report (stdout if omitted)");
  ev_m->add_option("--det", emx.det, "DET curve SVG");
  ev_m->add_option("--name", emx.name, "report name");
  ev_m->add_option("--p-target", emx.p_target);
  bind(ev_m, emx);

  // rt60
  auto* rt = app.add_subcommand("rt60", "reverberation time")->require_subcommand(1);
  Rt60EstimateCmd re;
  auto* rt_e = rt->add_subcommand("estimate", "blind RT60 per utterance");
  rt_e->add_option("--manifest", re.manifests)->required();
  rt_e->add_option("--label", re.labels, "plot label per manifest");
  rt_e->add_option("--out", re.out, "TSV (stdout if omitted)");
  rt_e->add_option("--plot", re.plot, "scatter SVG");
  bind(rt_e, re);
  Rt60Compare rc;
  auto* rt_c = rt->add_subcommand("compare", "is b or c closer to a in RT60");
  rt_c->add_option("--a", rc.a)->required();
  rt_c->add_option("--b", rc.b)->required();
  rt_c->add_option("--c", rc.c)->required();
  bind(rt_c, rc);

  // report
  auto* rep = app.add_subcommand("report", "charts")->require_subcommand(1);
  ReportPlot rp;
  auto* rep_p = rep->add_subcommand("plot", "EER/minDCF chart over reports");
  rep_p->add_option("--reports", rp.reports)->required();
  rep_p->add_option("--out", rp.out, "SVG (stdout if omitted)");
  bind(rep_p, rp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (auto& ch : msg)
      if (ch == '\n') ch = ' ';
    std::cerr << "error: usage: " << msg << '\n';
    return 2;
  }

  try {
    if (!g.config_path.empty()) {
      cfg = load_config(g.config_path);
    } else {
      cfg = parse_config(nlohmann::json::object(), fs::current_path());
    }
    action();
  } catch (const Error& e) {
    std::string msg = e.what();
    for (auto& ch : msg)
      if (ch == '\n') ch = ' ';
    std::cerr << "error: " << error_code_name(e.code()) << ": " << msg << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: io: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run_cli(argc, argv); }
