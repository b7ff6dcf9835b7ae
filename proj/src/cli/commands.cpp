// Copyright 2026 The ACT Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "act/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "act/audio/synth.hpp"
#include "act/audio/wav.hpp"
#include "act/decoding/search.hpp"
#include "act/error.hpp"
#include "act/model/checkpoint.hpp"
#include "act/model/model.hpp"
#include "act/numerics/ops.hpp"
#include "act/text/skipgram.hpp"
#include "act/text/vocabulary.hpp"
#include "act/training/losses.hpp"

namespace act {

namespace fs = std::filesystem;

namespace {

constexpr const char* kLatestCheckpoint = "checkpoint_latest.act";
constexpr const char* kFinalCheckpoint = "model.act";
constexpr const char* kTrainLog = "train_log.jsonl";

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

std::string clip_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "clip_%04zu", i);
  return buf;
}

std::vector<std::string> reserved_stripped(const Vocabulary& vocab) {
  return {vocab.words().begin() + Vocabulary::kReserved, vocab.words().end()};
}

// Rescales skip-gram vectors to the spread of the random init so the decoder
// starts from the same activation scale either way.
void load_word_embeddings(const ModelParams& params, const WordEmbeddings& emb) {
  Tensor table = params.word_embed;
  if (table.dim(0) != emb.rows || table.dim(1) != emb.dim) {
    throw InternalError("word embedding shape does not match the vocabulary");
  }
  double sq = 0.0;
  for (double v : emb.matrix) sq += v * v;
  const double rms = std::sqrt(sq / static_cast<double>(emb.matrix.size()));
  const double factor = rms > 0.0 ? params.config().init_std / rms : 0.0;
  auto out = table.mutable_data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = emb.matrix[i] * factor;
}

void append_log(const fs::path& path, const EpochStats& s) {
  std::ofstream log(path, std::ios::app);
  if (!log) throw IoError("cannot append to " + path.string());
  log << nlohmann::ordered_json{{"epoch", s.epoch}, {"lr", s.lr}, {"loss", s.loss}, {"nll", s.nll},
                                {"seconds", s.seconds}}
             .dump()
      << '\n';
}

void check_patch_budget(const std::vector<LogMelSpectrogram>& features, const RunConfig& cfg) {
  for (const LogMelSpectrogram& f : features) {
    const std::size_t n = f.frames / cfg.frontend.patch_frames;
    if (n > cfg.model.encoder.max_patches) {
      throw ValidationError(std::to_string(n) + " patches per clip exceed encoder.max_patches = " +
                            std::to_string(cfg.model.encoder.max_patches));
    }
  }
}

}  // namespace

fs::path default_data_dir() {
  const char* env = std::getenv(kDataDirEnv);
  return env != nullptr && *env != '\0' ? fs::path(env) : fs::path("data");
}

SynthDataResult synth_data(std::size_t count, std::uint64_t seed, const fs::path& out_dir, std::size_t max_events) {
  if (count < 1) throw InvalidArgument("count must be at least 1");
  ensure_directory(out_dir / "clips");
  Rng rng(seed);
  Manifest captions, tags;
  captions.kind = "caption";
  tags.kind = "tagging";
  for (std::size_t i = 0; i < count; ++i) {
    const std::vector<SoundEvent> events = random_event_list(rng, max_events);
    const SynthClip clip = synthesize_event_clip(events, derive_seed(seed, i));
    ManifestRecord r;
    r.id = clip_id(i);
    r.wav = "clips/" + r.id + ".wav";
    write_wav(out_dir / r.wav, clip.waveform);
    r.captions = {clip.caption};
    r.tags = clip.tags;
    r.has_tags = true;
    captions.records.push_back(r);
    tags.records.push_back(std::move(r));
  }
  SynthDataResult result{out_dir / "captions.jsonl", out_dir / "tags.jsonl", count};
  write_manifest(result.caption_manifest, captions);
  write_manifest(result.tag_manifest, tags);
  return result;
}

std::vector<LogMelSpectrogram> manifest_features(const Manifest& manifest, const FrontendConfig& frontend) {
  std::vector<LogMelSpectrogram> out;
  out.reserve(manifest.records.size());
  for (const ManifestRecord& r : manifest.records) {
    const Waveform raw = load_record_audio(r, manifest.base_dir, frontend.sample_rate, frontend.clip_seconds);
    out.push_back(compute_log_mel(prepare_waveform(raw, frontend), frontend));
  }
  return out;
}

TrainOutcome train_model(const TrainRequest& request) {
  const RunConfig& cfg = request.config;
  cfg.validate();
  const fs::path out_dir = cfg.out_dir;
  ensure_directory(out_dir);
  const fs::path latest = out_dir / kLatestCheckpoint;
  const fs::path log_path = out_dir / kTrainLog;
  const bool captioning = request.mode == TrainMode::kCaption;
  const std::string kind = captioning ? "caption" : "tagging";

  Manifest manifest = read_manifest(request.manifest);
  std::sort(manifest.records.begin(), manifest.records.end(),
            [](const ManifestRecord& a, const ManifestRecord& b) { return a.id < b.id; });
  if (manifest.records.empty()) throw ValidationError("manifest " + request.manifest.string() + " has no clips");
  const std::vector<LogMelSpectrogram> features = manifest_features(manifest, cfg.frontend);
  check_patch_budget(features, cfg);

  std::optional<CheckpointData> resumed;
  if (request.resume) {
    if (!fs::exists(latest)) throw IoError("no checkpoint to resume from at " + latest.string());
    resumed = load_checkpoint(latest);
    if (resumed->meta.kind != kind) {
      throw ValidationError("cannot resume " + kind + " training from a " + resumed->meta.kind + " checkpoint");
    }
    if (!resumed->adam) throw ValidationError("checkpoint " + latest.string() + " has no optimizer state");
  } else if (!captioning && request.init) {
    throw InvalidArgument("--init applies to caption training only");
  }

  TrainOutcome outcome;
  CheckpointMeta meta;
  meta.kind = kind;
  meta.run_config = run_config_to_text(cfg);
  AdamState adam = resumed ? *resumed->adam : AdamState{};
  const std::size_t first_epoch = resumed ? resumed->meta.epoch + 1 : 1;
  if (!resumed && fs::exists(log_path)) fs::remove(log_path);

  auto finish_epoch = [&](const EpochStats& stats, const ModelParams& params) {
    append_log(log_path, stats);
    outcome.history.push_back(stats);
    if (request.on_epoch) request.on_epoch(stats);
    meta.epoch = stats.epoch;
    if (stats.epoch % cfg.checkpoint_every == 0) save_checkpoint(latest, params, meta, &adam);
  };
  auto finish_run = [&](const ModelParams& params) {
    save_checkpoint(latest, params, meta, &adam);
    outcome.checkpoint = out_dir / kFinalCheckpoint;
    save_checkpoint(outcome.checkpoint, params, meta, &adam);
  };

  if (captioning) {
    std::vector<Sentence> sentences;
    for (const ManifestRecord& r : manifest.records) {
      for (const std::string& c : r.captions) sentences.push_back(tokenize_caption(c));
    }
    if (sentences.empty()) throw ValidationError("manifest has no captions");
    const Vocabulary vocab =
        resumed ? Vocabulary::from_words(resumed->meta.vocabulary) : Vocabulary::build(sentences, cfg.text.min_count);
    meta.vocabulary = reserved_stripped(vocab);

    CaptionDataset data;
    data.features = features;
    for (std::size_t i = 0; i < manifest.records.size(); ++i) {
      data.ids.push_back(manifest.records[i].id);
      for (const std::string& c : manifest.records[i].captions) {
        data.items.push_back({i, encode(tokenize_caption(c), vocab).ids});
      }
    }

    ModelParams params = resumed ? restore_params(*resumed)
                                 : ModelParams::create(cfg.model_config(vocab.size(), cfg.model.encoder.num_tags),
                                                       derive_seed(cfg.seed, 201));
    if (!resumed && cfg.text.word2vec) {
      SkipGramConfig sg;
      sg.dim = params.config().decoder.dim;
      sg.window = cfg.text.word2vec_window;
      sg.negatives = cfg.text.word2vec_negatives;
      sg.epochs = cfg.text.word2vec_epochs;
      sg.seed = derive_seed(cfg.seed, 202);
      load_word_embeddings(params, train_skipgram(sentences, vocab, sg));
    }
    if (!resumed && request.init) {
      const CheckpointData init = load_checkpoint(*request.init);
      if (copy_matching_tensors(init, params, {"encoder."}) == 0) {
        throw ValidationError("checkpoint " + request.init->string() + " holds no encoder weights");
      }
      meta.tag_classes = init.meta.tag_classes;
    } else if (resumed) {
      meta.tag_classes = resumed->meta.tag_classes;
    }

    const TrainConfig tc = cfg.caption_train_config();
    for (std::size_t e = first_epoch; e <= tc.epochs; ++e) {
      const EpochStats stats = train_caption_epoch(params, data, tc, adam, e);
      finish_epoch(stats, params);
      if (cfg.stop_loss > 0.0 && stats.loss < cfg.stop_loss) break;
    }
    finish_run(params);
    outcome.tag_classes = meta.tag_classes;
    return outcome;
  }

  std::vector<std::string> classes;
  if (resumed) {
    classes = resumed->meta.tag_classes;
  } else {
    std::set<std::string> unique;
    for (const ManifestRecord& r : manifest.records) unique.insert(r.tags.begin(), r.tags.end());
    classes.assign(unique.begin(), unique.end());
  }
  if (classes.empty()) throw InvalidArgument("tagging needs at least one class");
  meta.tag_classes = classes;
  TagDataset data;
  data.features = features;
  for (const ManifestRecord& r : manifest.records) {
    if (!r.has_tags) throw ValidationError("clip " + r.id + " has no tags");
    data.ids.push_back(r.id);
    std::vector<double> row(classes.size(), 0.0);
    for (const std::string& t : r.tags) {
      auto it = std::find(classes.begin(), classes.end(), t);
      if (it == classes.end()) throw ValidationError("clip " + r.id + " has unknown tag " + t);
      row[static_cast<std::size_t>(it - classes.begin())] = 1.0;
    }
    data.labels.push_back(std::move(row));
  }
  ModelParams params = resumed ? restore_params(*resumed)
                               : ModelParams::create(cfg.model_config(0, classes.size()), derive_seed(cfg.seed, 201));
  const TrainConfig tc = cfg.pretrain_config();
  for (std::size_t e = first_epoch; e <= tc.epochs; ++e) finish_epoch(train_tagging_epoch(params, data, tc, adam, e), params);
  finish_run(params);
  outcome.tag_classes = classes;
  return outcome;
}

CaptionLines caption_clips(const fs::path& checkpoint, const fs::path& input, std::optional<std::size_t> beam_size) {
  const CheckpointData data = load_checkpoint(checkpoint);
  if (data.meta.kind != "caption") throw ValidationError(checkpoint.string() + " is not a captioning checkpoint");
  const ModelParams params = restore_params(data);
  const RunConfig cfg = parse_run_config(data.meta.run_config);
  const Vocabulary vocab = Vocabulary::from_words(data.meta.vocabulary);
  if (vocab.size() != params.config().decoder.vocab_size) {
    throw ValidationError("checkpoint vocabulary does not match its decoder");
  }
  const std::size_t beam = beam_size.value_or(cfg.decode.beam_size);
  if (beam < 1) throw InvalidArgument("beam size must be at least 1");

  std::vector<std::string> ids;
  std::vector<LogMelSpectrogram> features;
  if (input.extension() == ".wav") {
    ids.push_back(input.stem().string());
    features.push_back(compute_log_mel(prepare_waveform(read_wav(input), cfg.frontend), cfg.frontend));
  } else {
    const Manifest m = read_manifest(input);
    for (const ManifestRecord& r : m.records) ids.push_back(r.id);
    features = manifest_features(m, cfg.frontend);
  }

  DecodeOptions opts;
  opts.max_len = cfg.decode.max_len;
  opts.length_norm = cfg.decode.length_norm;
  CaptionLines lines;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    NoGradGuard no_grad;
    const Tensor memory = decoder_memory(encode(patchify(features[i], cfg.frontend.patch_frames), params), params);
    const ModelScorer scorer(params, memory);
    const CaptionTokens tokens = beam == 1 ? greedy_decode(scorer, opts) : beam_search_decode(scorer, beam, opts).best;
    lines.emplace_back(ids[i], join_words(decode(tokens, vocab)));
  }
  std::sort(lines.begin(), lines.end());
  return lines;
}

void write_caption_lines(const fs::path& path, const CaptionLines& lines) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& [id, caption] : lines) out << id << '\t' << caption << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

CaptionLines read_caption_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  CaptionLines lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ValidationError(path.string() + " line " + std::to_string(line_no) + ": expected id<TAB>caption");
    }
    lines.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return lines;
}

MetricReport evaluate_files(const fs::path& candidates, const fs::path& references, std::optional<double> spice) {
  const CaptionLines cands = read_caption_lines(candidates);
  if (cands.empty()) throw ValidationError(candidates.string() + " has no captions");
  const Manifest refs = read_manifest(references);
  std::map<std::string, const ManifestRecord*> by_id;
  for (const ManifestRecord& r : refs.records) by_id[r.id] = &r;
  std::vector<std::string> ids;
  std::vector<EvalPair> pairs;
  for (const auto& [id, caption] : cands) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw ValidationError("clip id " + id + " is missing from the references");
    if (it->second->captions.empty()) throw ValidationError("clip id " + id + " has no reference captions");
    EvalPair p;
    p.candidate = tokenize_caption(caption);
    for (const std::string& ref : it->second->captions) p.references.push_back(tokenize_caption(ref));
    ids.push_back(id);
    pairs.push_back(std::move(p));
  }
  return evaluate_captions(ids, pairs, spice);
}

GradCheckResult run_gradcheck(std::uint64_t seed, bool corrupt_backward) {
  ModelConfig mc;
  mc.encoder.patch_dim = 8;
  mc.encoder.dim = 32;
  mc.encoder.heads = 2;
  mc.encoder.layers = 2;
  mc.encoder.ffn_dim = 64;
  mc.encoder.max_patches = 6;
  mc.encoder.num_tags = 3;
  mc.encoder.dropout = 0.0;
  mc.decoder.dim = 32;
  mc.decoder.heads = 2;
  mc.decoder.layers = 1;
  mc.decoder.ffn_dim = 64;
  mc.decoder.vocab_size = 9;
  mc.decoder.dropout = 0.0;
  mc.init_std = 0.35;
  const ModelParams params = ModelParams::create(mc, derive_seed(seed, 1));

  Rng rng(derive_seed(seed, 2));
  PatchSequence patches;
  patches.count = 5;
  patches.frames_per_patch = 2;
  patches.mel_bins = 4;
  for (std::size_t i = 0; i < patches.count * patches.patch_dim(); ++i) patches.values.push_back(rng.normal());
  const std::vector<int> tokens = {Vocabulary::kSos, 5, 7, 4, 8, Vocabulary::kEos};
  const Tensor tags({1, 3}, {1.0, 0.0, 1.0});

  auto loss = [&] {
    Tensor encoded = encode(patches, params);
    Tensor caption = caption_item_loss(params, patches, tokens, 0.1, {});
    Tensor tagging = bce_with_logits(tagging_head_forward(slice_rows(encoded, 0, 1), params).logits, tags);
    return add(caption, tagging);
  };
  if (corrupt_backward) {
    testing::BackwardFaultGuard fault;
    return finite_diff_check(loss, params.store(), 1e-4);
  }
  return finite_diff_check(loss, params.store(), 1e-4);
}

namespace {

int fail(std::ostream& err, int code, const std::string& message) {
  err << "error: " << message << '\n';
  return code;
}

std::string format_score(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Convolution-free audio captioning toolkit"};
  app.require_subcommand(1);

  const std::string data_dir = default_data_dir().string();

  auto* synth = app.add_subcommand("synth-data", "write a synthetic clip corpus with caption and tag manifests");
  std::size_t synth_count = 8;
  std::uint64_t synth_seed = 7;
  std::string synth_out = data_dir;
  std::size_t synth_events = 3;
  synth->add_option("--count", synth_count, "number of clips")->capture_default_str();
  synth->add_option("--seed", synth_seed, "corpus seed")->capture_default_str();
  synth->add_option("--out", synth_out, "output directory (defaults to $ACT_DATA_DIR or ./data)")->capture_default_str();
  synth->add_option("--max-events", synth_events, "events per clip at most")->capture_default_str();

  auto* train = app.add_subcommand("train", "train a captioning model or pretrain the encoder on tags");
  std::string train_config, train_manifest, train_init, train_out;
  std::optional<std::uint64_t> train_seed;
  bool caption_flag = false, pretrain_flag = false, resume_flag = false;
  train->add_option("--config", train_config, "run configuration file");
  train->add_option("--manifest", train_manifest, "dataset manifest (defaults to the data directory)");
  auto* cap_opt = train->add_flag("--caption", caption_flag, "caption training (default)");
  train->add_flag("--pretrain-tagging", pretrain_flag, "tagging pretraining of encoder and tagging head")
      ->excludes(cap_opt);
  train->add_option("--init", train_init, "tagging checkpoint whose encoder initialises caption training");
  train->add_flag("--resume", resume_flag, "continue from the latest periodic checkpoint in the output directory");
  train->add_option("--seed", train_seed, "override the configured seed");
  train->add_option("--out", train_out, "override the configured output directory");

  auto* caption = app.add_subcommand("caption", "caption a wav file or every clip of a manifest");
  std::string cap_checkpoint, cap_input, cap_out;
  std::optional<std::size_t> cap_beam;
  caption->add_option("--checkpoint", cap_checkpoint, "captioning checkpoint")->required();
  caption->add_option("--input", cap_input, "wav file or manifest")->required();
  caption->add_option("--beam", cap_beam, "beam size; 1 decodes greedily");
  caption->add_option("--out", cap_out, "write captions to this file instead of standard output");

  auto* eval = app.add_subcommand("eval", "score candidate captions against a reference manifest");
  std::string eval_cands, eval_refs, eval_out;
  std::optional<double> eval_spice;
  eval->add_option("--candidates", eval_cands, "id<TAB>caption file")->required();
  eval->add_option("--references", eval_refs, "reference manifest")->required();
  eval->add_option("--spice", eval_spice, "externally computed corpus SPICE score");
  eval->add_option("--out", eval_out, "directory for report.txt and report.json");

  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of the full model gradient");
  std::uint64_t gc_seed = 1;
  bool gc_corrupt = false;
  gradcheck->add_option("--seed", gc_seed, "seed for weights and inputs")->capture_default_str();
  gradcheck->add_flag("--corrupt-backward", gc_corrupt, "test hook: run with a deliberately wrong GELU backward");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth->parsed()) {
      const SynthDataResult r = synth_data(synth_count, synth_seed, synth_out, synth_events);
      out << "wrote " << r.clips << " clips, " << r.caption_manifest.string() << " and " << r.tag_manifest.string()
          << '\n';
      return kExitOk;
    }
    if (train->parsed()) {
      TrainRequest req;
      req.config = train_config.empty() ? RunConfig{} : load_run_config(train_config);
      if (train_seed) req.config.seed = *train_seed;
      if (!train_out.empty()) req.config.out_dir = train_out;
      req.mode = pretrain_flag ? TrainMode::kPretrainTagging : TrainMode::kCaption;
      req.manifest = !train_manifest.empty()          ? fs::path(train_manifest)
                     : req.mode == TrainMode::kCaption ? default_data_dir() / "captions.jsonl"
                                                       : default_data_dir() / "tags.jsonl";
      if (!train_init.empty()) req.init = train_init;
      req.resume = resume_flag;
      req.on_epoch = [&out](const EpochStats& s) {
        out << "epoch " << s.epoch << " lr=" << format_score(s.lr) << " loss=" << format_score(s.loss)
            << " nll=" << format_score(s.nll) << '\n';
      };
      const TrainOutcome r = train_model(req);
      out << "checkpoint " << r.checkpoint.string() << '\n';
      return kExitOk;
    }
    if (caption->parsed()) {
      const CaptionLines lines = caption_clips(cap_checkpoint, cap_input, cap_beam);
      if (cap_out.empty()) {
        for (const auto& [id, text] : lines) out << id << '\t' << text << '\n';
      } else {
        write_caption_lines(cap_out, lines);
      }
      return kExitOk;
    }
    if (eval->parsed()) {
      const MetricReport report = evaluate_files(eval_cands, eval_refs, eval_spice);
      if (!eval_out.empty()) {
        ensure_directory(eval_out);
        std::ofstream txt(fs::path(eval_out) / "report.txt", std::ios::trunc);
        std::ofstream json(fs::path(eval_out) / "report.json", std::ios::trunc);
        if (!txt || !json) throw IoError("cannot write reports under " + eval_out);
        txt << report.to_text();
        json << report.to_json();
      }
      for (const auto& [k, v] : report.corpus) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s=%.6f\n", k.c_str(), v);
        out << buf;
      }
      for (const auto& [k, why] : report.unavailable) out << k << "=unavailable (" << why << ")\n";
      return kExitOk;
    }
    if (gradcheck->parsed()) {
      const GradCheckResult r = run_gradcheck(gc_seed, gc_corrupt);
      const bool ok = r.max_rel_error < kGradcheckTolerance;
      char buf[256];
      std::snprintf(buf, sizeof buf, "max_rel_error=%.3e worst=%s[%zu] analytic=%.6e numeric=%.6e coordinates=%zu %s\n",
                    r.max_rel_error, r.worst_tensor.c_str(), r.worst_index, r.worst_analytic, r.worst_numeric,
                    r.coordinates, ok ? "PASS" : "FAIL");
      out << buf;
      return ok ? kExitOk : kExitFailure;
    }
  } catch (const InvalidArgument& e) {
    return fail(err, kExitUsage, e.what());
  } catch (const ValidationError& e) {
    return fail(err, kExitValidation, e.what());
  } catch (const NumericError& e) {
    return fail(err, kExitValidation, e.what());
  } catch (const IoError& e) {
    return fail(err, kExitIo, e.what());
  } catch (const std::exception& e) {
    return fail(err, kExitFailure, e.what());
  }
  return kExitUsage;
}

}  // namespace act
