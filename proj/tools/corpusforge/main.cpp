// Copyright (c) 2026 The corpusforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// corpusforge command-line driver. Each subcommand wraps one library stage;
// `pipeline` runs them all.
//
// Exit status: 0 success, 1 validation failure, 2 I/O failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "corpusforge/alphabet.hpp"
#include "corpusforge/asr_client.hpp"
#include "corpusforge/audio.hpp"
#include "corpusforge/cer.hpp"
#include "corpusforge/clean.hpp"
#include "corpusforge/config.hpp"
#include "corpusforge/corpus.hpp"
#include "corpusforge/eval.hpp"
#include "corpusforge/pipeline.hpp"
#include "corpusforge/prompt.hpp"
#include "corpusforge/sampler.hpp"

namespace fs = std::filesystem;
using namespace corpusforge;

namespace {

struct Globals {
  std::string config_path;
  std::string log_level;
  bool dry_run = false;
  unsigned workers = 0;
  std::optional<uint64_t> seed;
};

spdlog::level::level_enum to_spdlog(LogLevel l) {
  switch (l) {
    case LogLevel::error: return spdlog::level::err;
    case LogLevel::warn: return spdlog::level::warn;
    case LogLevel::info: return spdlog::level::info;
    case LogLevel::debug: return spdlog::level::debug;
  }
  return spdlog::level::info;
}

/// Config file first, then command-line flags, then CORPUSFORGE_LOG for the
/// log level.
PipelineConfig base_config(const Globals& g) {
  PipelineConfig cfg;
  if (!g.config_path.empty()) cfg = load_config(g.config_path);
  if (!g.log_level.empty()) cfg.log_level = parse_log_level(g.log_level);
  if (const char* env = std::getenv("CORPUSFORGE_LOG"); env && *env) {
    cfg.log_level = parse_log_level(env);
  }
  if (g.workers > 0) cfg.workers = g.workers;
  if (g.seed) {
    cfg.seed = *g.seed;
    cfg.split.seed = *g.seed;
    cfg.prompt.seed = *g.seed;
  }
  spdlog::set_level(to_spdlog(cfg.log_level));
  return cfg;
}

fs::path audio_root_for(const std::string& flag, const fs::path& manifest) {
  if (!flag.empty()) return flag;
  return manifest.has_parent_path() ? manifest.parent_path() : fs::path(".");
}

void emit_manifest(const Manifest& m, const std::string& out, bool dry_run) {
  if (dry_run) {
    spdlog::info("dry run: would write {} utterances to {}", m.size(), out);
    return;
  }
  save_manifest(m, out);
  spdlog::info("wrote {} utterances to {}", m.size(), out);
}

void emit_text(const std::string& data, const std::string& out, bool dry_run) {
  if (out.empty() || out == "-") {
    std::cout << data;
  } else if (dry_run) {
    spdlog::info("dry run: would write {}", out);
  } else {
    write_file(out, data);
  }
}

std::map<std::string, std::string> speaker_map(const Manifest& m) {
  std::map<std::string, std::string> out;
  for (const auto& u : m.utterances) out[u.id] = u.speaker_id;
  return out;
}

std::vector<double> parse_state(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::ConfigInvalid, "not a number in state list: '" + item + "'");
    }
  }
  if (out.empty()) throw Error(ErrorKind::ConfigInvalid, "empty state list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("corpusforge"));
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Corpus preparation for multilingual TTS"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "JSON config; flags override its values");
  app.add_option("--log-level", g.log_level, "error, warn, info or debug");
  app.add_flag("--dry-run", g.dry_run, "Validate and report without writing outputs");
  app.add_option("--workers", g.workers, "Worker threads");
  app.add_option("--seed", g.seed, "Seed for split and prompt selection");

  std::function<void()> action;

  // scan
  std::string manifest, out, audio_root, report_out;
  auto* scan = app.add_subcommand("scan", "Probe audio and fill in durations");
  scan->add_option("manifest", manifest, "Raw manifest (JSONL)")->required();
  scan->add_option("-o,--out", out, "Output manifest")->required();
  scan->add_option("--audio-root", audio_root, "Base for audio paths (default: manifest dir)");
  scan->callback([&] {
    action = [&] {
      const auto cfg = base_config(g);
      const auto raw = load_manifest(manifest, {.require_audio_fields = false});
      ScanReport rep;
      auto [m, probes] = scan_manifest(raw, audio_root_for(audio_root, manifest), cfg.workers,
                                       &rep);
      spdlog::info("{} files, {} empty, {} silent, {} hours", rep.files, rep.empty_files,
                   rep.silent_files, format_hours(rep.total_seconds / 3600.0));
      emit_manifest(m, out, g.dry_run);
    };
  });

  // clean
  auto* clean = app.add_subcommand("clean", "Remove empty audio and duplicates, fix text");
  clean->add_option("manifest", manifest, "Scanned manifest")->required();
  clean->add_option("-o,--out", out, "Output manifest")->required();
  clean->add_option("--audio-root", audio_root, "Base for audio paths (default: manifest dir)");
  clean->add_option("--report", report_out, "Write the cleaning report as JSON");
  clean->callback([&] {
    action = [&] {
      const auto cfg = base_config(g);
      const auto m = load_manifest(manifest);
      const fs::path root = audio_root_for(audio_root, manifest);
      std::vector<AudioProbe> probes(m.size());
      parallel_for(m.size(), cfg.workers, [&](size_t i) {
        probes[i] = probe_audio(root / m.utterances[i].audio_path);
      });
      std::map<std::string, bool> empty;
      for (size_t i = 0; i < m.size(); ++i) {
        empty[m.utterances[i].id] = probes[i].num_samples == 0 || probes[i].all_zero;
      }
      const auto r = clean_all(m, cfg.separator,
                               [&](const Utterance& u) { return empty.at(u.id); });
      std::cout << render_cleaning_table(r.report);
      if (!report_out.empty()) emit_text(dump_line(to_json(r.report)) + "\n", report_out, g.dry_run);
      emit_manifest(r.manifest, out, g.dry_run);
    };
  });

  // trim / normalize
  std::string out_dir;
  std::optional<double> threshold_db, pad_s, target_peak;
  auto* trim = app.add_subcommand("trim", "Trim leading and trailing silence");
  trim->add_option("manifest", manifest, "Input manifest")->required();
  trim->add_option("-o,--out-dir", out_dir, "Output directory for audio and manifest")
      ->required();
  trim->add_option("--audio-root", audio_root, "Base for audio paths (default: manifest dir)");
  trim->add_option("--threshold-db", threshold_db, "Silence threshold below peak frame");
  trim->add_option("--pad", pad_s, "Silence kept on each side, seconds");
  trim->callback([&] {
    action = [&] {
      auto cfg = base_config(g);
      if (threshold_db) cfg.trim.threshold_db = *threshold_db;
      if (pad_s) cfg.trim.pad_s = *pad_s;
      validate(cfg.trim);
      const auto m = load_manifest(manifest);
      const fs::path root = audio_root_for(audio_root, manifest);
      std::vector<std::optional<double>> durations(m.size());
      parallel_for(m.size(), cfg.workers, [&](size_t i) {
        const auto& u = m.utterances[i];
        const auto audio = decode_wav(root / u.audio_path);
        try {
          const auto t = trim_silence(audio, cfg.trim);
          durations[i] = duration_seconds(t.audio);
          if (!g.dry_run) encode_wav(t.audio, fs::path(out_dir) / u.audio_path);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::FullySilent) throw;
          spdlog::warn("{}: fully silent, dropped", u.id);
        }
      });
      Manifest result{{}, m.split, "trim <- " + m.created_from};
      for (size_t i = 0; i < m.size(); ++i) {
        if (!durations[i]) continue;
        Utterance u = m.utterances[i];
        u.duration_s = *durations[i];
        result.utterances.push_back(std::move(u));
      }
      emit_manifest(result, (fs::path(out_dir) / "manifest.jsonl").string(), g.dry_run);
    };
  });

  auto* normalize = app.add_subcommand("normalize", "Peak-normalize audio");
  normalize->add_option("manifest", manifest, "Input manifest")->required();
  normalize->add_option("-o,--out-dir", out_dir, "Output directory for audio and manifest")
      ->required();
  normalize->add_option("--audio-root", audio_root,
                        "Base for audio paths (default: manifest dir)");
  normalize->add_option("--peak", target_peak, "Target peak amplitude in (0, 1]");
  normalize->callback([&] {
    action = [&] {
      auto cfg = base_config(g);
      if (target_peak) cfg.target_peak = *target_peak;
      const auto m = load_manifest(manifest);
      const fs::path root = audio_root_for(audio_root, manifest);
      std::vector<char> keep(m.size(), 1);
      parallel_for(m.size(), cfg.workers, [&](size_t i) {
        const auto& u = m.utterances[i];
        try {
          const auto n = normalize_volume(decode_wav(root / u.audio_path), cfg.target_peak);
          if (!g.dry_run) encode_wav(n, fs::path(out_dir) / u.audio_path);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::AllZero) throw;
          spdlog::warn("{}: all-zero audio, dropped", u.id);
          keep[i] = 0;
        }
      });
      Manifest result{{}, m.split, "normalize <- " + m.created_from};
      for (size_t i = 0; i < m.size(); ++i) {
        if (keep[i]) result.utterances.push_back(m.utterances[i]);
      }
      emit_manifest(result, (fs::path(out_dir) / "manifest.jsonl").string(), g.dry_run);
    };
  });

  // cer
  std::string hypotheses, endpoint;
  bool casefold = false, no_normalize = false;
  auto* cer_cmd = app.add_subcommand("cer", "Score transcripts against ASR hypotheses");
  cer_cmd->add_option("manifest", manifest, "Input manifest")->required();
  cer_cmd->add_option("-o,--out", out, "CER records (JSONL); stdout if omitted");
  auto* hyp_opt = cer_cmd->add_option("--hypotheses", hypotheses, "Hypotheses (.tsv or .jsonl)");
  auto* ep_opt = cer_cmd->add_option("--asr-endpoint", endpoint, "http:// ASR endpoint");
  hyp_opt->excludes(ep_opt);
  cer_cmd->add_option("--audio-root", audio_root, "Base for audio paths (default: manifest dir)");
  cer_cmd->add_flag("--casefold", casefold, "Lowercase both sides before scoring");
  cer_cmd->add_flag("--no-normalize", no_normalize, "Skip NFC and whitespace normalization");
  cer_cmd->callback([&] {
    action = [&] {
      auto cfg = base_config(g);
      if (casefold) cfg.cer_casefold = true;
      if (no_normalize) cfg.cer_normalize = false;
      if (!hypotheses.empty()) cfg.hypotheses = hypotheses;
      if (!endpoint.empty()) cfg.asr_endpoint = endpoint;
      const auto m = load_manifest(manifest);
      std::vector<HypothesisRecord> hyps;
      if (cfg.hypotheses) {
        hyps = ingest_hypotheses(*cfg.hypotheses);
      } else if (cfg.asr_endpoint) {
        AsrClientOptions asr;
        asr.max_in_flight = cfg.workers;
        auto fetched = fetch_hypotheses(*cfg.asr_endpoint, m,
                                        audio_root_for(audio_root, manifest), asr);
        for (const auto& f : fetched.failures) spdlog::warn("asr: {}: {}", f.id, f.reason);
        hyps = std::move(fetched.records);
      } else {
        throw Error(ErrorKind::ConfigInvalid, "cer needs --hypotheses or --asr-endpoint");
      }
      CerScoringReport rep;
      const auto records =
          score_manifest(m, hyps, CerOptions{cfg.cer_normalize, cfg.cer_casefold}, &rep);
      spdlog::info("scored {}, {} without hypothesis, {} empty references", rep.scored,
                   rep.missing_hypothesis, rep.empty_reference);
      emit_text(serialize_cer_records(records), out, g.dry_run);
    };
  });

  // select
  std::string cer_path;
  std::optional<size_t> top_n;
  auto* select = app.add_subcommand("select", "Keep the N lowest-CER clips per speaker");
  select->add_option("manifest", manifest, "Input manifest")->required();
  select->add_option("--cer", cer_path, "CER records from `cer`")->required();
  select->add_option("-n,--top-n", top_n, "Clips kept per speaker (default 8000)");
  select->add_option("-o,--out", out, "Output manifest")->required();
  select->callback([&] {
    action = [&] {
      auto cfg = base_config(g);
      if (top_n) cfg.cer_top_n = *top_n;
      validate(cfg);
      const auto m = load_manifest(manifest);
      const auto records = parse_cer_records(read_file(cer_path));
      SelectionReport rep;
      auto selected = select_top_n(m, records, cfg.cer_top_n, &rep);
      selected.created_from = "select <- " + m.created_from;
      spdlog::info("selected {}, dropped {}, unscored {}", rep.selected, rep.dropped_by_rank,
                   rep.unscored);
      emit_manifest(selected, out, g.dry_run);
    };
  });

  // tokenize
  std::vector<std::string> tables;
  std::string lang, text_in, input_file, unknown = "error";
  auto* tok = app.add_subcommand("tokenize", "Graphemes to phoneme tokens");
  tok->add_option("--table", tables, "Phoneme table file (repeatable)")->required();
  tok->add_option("--lang", lang, "Default language (default: first table)");
  auto* text_opt = tok->add_option("--text", text_in, "Text to tokenize");
  auto* file_opt = tok->add_option("--input", input_file, "File with one text per line");
  text_opt->excludes(file_opt);
  tok->add_option("--unknown", unknown, "error, skip or unk");
  tok->callback([&] {
    action = [&] {
      base_config(g);
      TableSet set;
      std::string first;
      for (const auto& path : tables) {
        auto t = load_table(path);
        if (first.empty()) first = t.language();
        const std::string code = t.language();
        set.insert_or_assign(code, std::move(t));
      }
      const std::string default_lang = lang.empty() ? first : lang;
      const auto policy = parse_unknown_policy(unknown);
      std::vector<std::string> texts;
      if (!input_file.empty()) {
        const std::string data = read_file(input_file);
        for (auto line : split_lines(data)) {
          if (!is_blank(line)) texts.emplace_back(line);
        }
      } else {
        texts.push_back(text_in);
      }
      for (const auto& t : texts) {
        std::cout << dump_line(to_json(tokenize_code_switched(t, set, default_lang, policy)))
                  << '\n';
      }
    };
  });

  // filter
  std::optional<double> min_duration;
  auto* filter = app.add_subcommand("filter", "Drop clips shorter than a minimum duration");
  filter->add_option("manifest", manifest, "Input manifest")->required();
  filter->add_option("--min-duration", min_duration, "Seconds (default 3)");
  filter->add_option("-o,--out", out, "Output manifest")->required();
  filter->callback([&] {
    action = [&] {
      auto cfg = base_config(g);
      if (min_duration) cfg.min_duration_s = *min_duration;
      validate(cfg);
      const auto m = load_manifest(manifest);
      auto kept = filter_min_duration(m, cfg.min_duration_s);
      kept.created_from = "filter <- " + m.created_from;
      spdlog::info("kept {}, removed {}", kept.size(), m.size() - kept.size());
      emit_manifest(kept, out, g.dry_run);
    };
  });

  // prompt
  std::vector<std::string> speakers;
  auto* prompt = app.add_subcommand("prompt", "Crop a reference prompt per speaker");
  prompt->add_option("manifest", manifest, "Trimmed manifest")->required();
  prompt->add_option("-o,--out-dir", out_dir, "Directory for <speaker>.wav and .json")
      ->required();
  prompt->add_option("--speaker", speakers, "Speakers (default: all)");
  prompt->add_option("--audio-root", audio_root, "Base for audio paths (default: manifest dir)");
  prompt->callback([&] {
    action = [&] {
      const auto cfg = base_config(g);
      validate(cfg.prompt);
      const auto m = load_manifest(manifest);
      const fs::path root = audio_root_for(audio_root, manifest);
      const auto targets = speakers.empty() ? speakers_of(m) : speakers;
      for (const auto& spk : targets) {
        const auto src = select_prompt_source(m, spk, cfg.prompt);
        const auto cropped = crop_prompt(decode_wav(root / src.audio_path), cfg.prompt);
        spdlog::info("{}: prompt from {}", spk, src.id);
        if (g.dry_run) continue;
        encode_wav(cropped, fs::path(out_dir) / (spk + ".wav"));
        write_file(fs::path(out_dir) / (spk + ".json"),
                   prompt_sidecar(spk, src.id, cfg.prompt).dump(2) + "\n");
      }
    };
  });

  // split
  std::optional<double> val_fraction;
  auto* split = app.add_subcommand("split", "Per-speaker train/val split");
  split->add_option("manifest", manifest, "Input manifest")->required();
  split->add_option("-o,--out-dir", out_dir, "Writes train.jsonl and val.jsonl")->required();
  split->add_option("--val-fraction", val_fraction, "Fraction held out (default 0.01)");
  split->callback([&] {
    action = [&] {
      auto cfg = base_config(g);
      if (val_fraction) cfg.split.val_fraction = *val_fraction;
      validate(cfg);
      const auto m = load_manifest(manifest);
      auto [train, val] = split_train_val(m, cfg.split);
      train.created_from = val.created_from = "split <- " + m.created_from;
      emit_manifest(train, (fs::path(out_dir) / "train.jsonl").string(), g.dry_run);
      emit_manifest(val, (fs::path(out_dir) / "val.jsonl").string(), g.dry_run);
    };
  });

  // stats
  std::string format = "table";
  auto* stats = app.add_subcommand("stats", "Per-speaker file counts and hours");
  stats->add_option("manifest", manifest, "Manifest")->required();
  stats->add_option("--format", format, "table, lines or jsonl")
      ->check(CLI::IsMember({"table", "lines", "jsonl"}));
  stats->callback([&] {
    action = [&] {
      base_config(g);
      const auto s = compute_stats(load_manifest(manifest));
      if (format == "jsonl") {
        std::cout << render_stats_jsonl(s);
      } else if (format == "lines") {
        for (const auto& sp : s.speakers) std::cout << render_stats_line(sp) << '\n';
        std::cout << render_stats_line(s.total) << '\n';
      } else {
        std::cout << render_stats_table(s);
      }
    };
  });

  // eval
  std::string synth_emb, truth_emb, synth_manifest, truth_manifest, aggregate = "mean";
  std::string eval_format = "table";
  auto* eval = app.add_subcommand("eval", "CER and speaker-similarity report");
  eval->add_option("--cer", cer_path, "CER records of synthesized speech");
  eval->add_option("--manifest", manifest, "Manifest mapping CER ids to speakers");
  eval->add_option("--synth", synth_emb, "Embeddings of synthesized speech (JSONL)");
  eval->add_option("--truth", truth_emb, "Embeddings of ground-truth speech (JSONL)");
  eval->add_option("--synth-manifest", synth_manifest, "Speakers of synthesized ids");
  eval->add_option("--truth-manifest", truth_manifest, "Speakers of ground-truth ids");
  eval->add_option("--aggregate", aggregate, "mean or max over ground-truth clips");
  eval->add_option("--format", eval_format, "table or json")
      ->check(CLI::IsMember({"table", "json"}));
  eval->add_option("-o,--out", out, "Write the report here instead of stdout");
  eval->callback([&] {
    action = [&] {
      base_config(g);
      EvalReport report;
      bool any = false;
      if (!cer_path.empty()) {
        if (manifest.empty()) throw Error(ErrorKind::ConfigInvalid, "--cer needs --manifest");
        const auto records = parse_cer_records(read_file(cer_path));
        report.merge(cer_report(records, speaker_map(load_manifest(manifest))));
        any = true;
      }
      if (!synth_emb.empty() || !truth_emb.empty()) {
        if (synth_emb.empty() || truth_emb.empty() || synth_manifest.empty() ||
            truth_manifest.empty()) {
          throw Error(ErrorKind::ConfigInvalid,
                      "similarity needs --synth, --truth, --synth-manifest and --truth-manifest");
        }
        const auto synth = load_embeddings(synth_emb);
        const auto truth = load_embeddings(truth_emb);
        report.merge(speaker_similarity_report(
            synth, truth, speaker_map(load_manifest(synth_manifest)),
            speaker_map(load_manifest(truth_manifest)), parse_aggregate(aggregate),
            synth_emb + " vs " + truth_emb));
        any = true;
      }
      if (!any) throw Error(ErrorKind::ConfigInvalid, "eval needs --cer or --synth/--truth");
      const std::string rendered =
          eval_format == "json" ? to_json(report).dump(2) + "\n" : render_eval_table(report);
      emit_text(rendered, out, g.dry_run);
    };
  });

  // sample
  std::string field = "linear", x0_text = "1", target_text, trajectory_out;
  SamplerConfig sampler;
  double field_param = -1.0;
  auto* sample = app.add_subcommand("sample", "Euler integration of an analytic flow field");
  sample->add_option("--field", field, "linear, constant or pull")
      ->check(CLI::IsMember({"linear", "constant", "pull"}));
  sample->add_option("--param", field_param, "Rate (linear) or value (constant)");
  sample->add_option("--target", target_text, "Comma-separated target for the pull field");
  sample->add_option("--x0", x0_text, "Comma-separated initial state");
  sample->add_option("--steps", sampler.steps, "Euler steps (default 10)");
  sample->add_option("--guidance", sampler.guidance_scale, "Guidance scale (default 1)");
  sample->add_option("--trajectory", trajectory_out, "Write every step as JSONL");
  sample->callback([&] {
    action = [&] {
      base_config(g);
      const State x0 = parse_state(x0_text);
      Trajectory traj;
      Trajectory* tp = trajectory_out.empty() ? nullptr : &traj;
      State x;
      if (field == "linear") {
        x = euler_integrate(LinearField{field_param}, x0, sampler, tp);
      } else if (field == "constant") {
        x = euler_integrate(ConstantField{field_param}, x0, sampler, tp);
      } else {
        if (target_text.empty()) throw Error(ErrorKind::ConfigInvalid, "pull needs --target");
        x = euler_integrate(TargetPullField{parse_state(target_text)}, x0, sampler, tp);
      }
      nlohmann::ordered_json j;
      j["steps"] = sampler.steps;
      j["guidance_scale"] = sampler.guidance_scale;
      j["state"] = x;
      std::cout << j.dump() << '\n';
      if (tp) emit_text(serialize_trajectory(traj), trajectory_out, g.dry_run);
    };
  });

  // pipeline
  std::string corpus_root, pipe_manifest, pipe_out;
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage end to end");
  pipeline->add_option("--corpus-root", corpus_root, "Root for relative paths");
  pipeline->add_option("--manifest", pipe_manifest, "Raw manifest, relative to corpus root");
  pipeline->add_option("--out-dir", pipe_out, "Output directory, relative to corpus root");
  pipeline->add_option("--hypotheses", hypotheses, "Hypotheses (.tsv or .jsonl)");
  pipeline->add_option("--asr-endpoint", endpoint, "http:// ASR endpoint");
  pipeline->add_option("--top-n", top_n, "Clips kept per speaker after CER ranking");
  pipeline->add_option("--min-duration", min_duration, "Minimum clip duration, seconds");
  pipeline->add_option("--val-fraction", val_fraction, "Fraction held out for validation");
  pipeline->callback([&] {
    action = [&] {
      auto cfg = base_config(g);
      if (!corpus_root.empty()) cfg.corpus_root = corpus_root;
      if (!pipe_manifest.empty()) cfg.manifest = pipe_manifest;
      if (!pipe_out.empty()) cfg.out_dir = pipe_out;
      if (!hypotheses.empty()) cfg.hypotheses = hypotheses;
      if (!endpoint.empty()) cfg.asr_endpoint = endpoint;
      if (top_n) cfg.cer_top_n = *top_n;
      if (min_duration) cfg.min_duration_s = *min_duration;
      if (val_fraction) cfg.split.val_fraction = *val_fraction;
      PipelineOptions opts;
      opts.dry_run = g.dry_run;
      opts.log = [](LogLevel level, const std::string& msg) {
        spdlog::log(to_spdlog(level), "{}", msg);
      };
      const auto r = run_pipeline(cfg, opts);
      spdlog::info("train {} / val {}", r.train.size(), r.val.size());
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    action();
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return e.is_io() ? 2 : 1;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
