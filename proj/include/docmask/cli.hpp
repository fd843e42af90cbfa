// docmask/cli.hpp -- command line entry point: synth / train / mask / ocr /
// eval / pipeline / viz / fonts subcommands, strict JSON config parsing,
// overlay rendering.
//
// Copyright 2026 The docmask authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "docmask/pipeline.hpp"
#include "docmask/train.hpp"

namespace docmask {

// ---------------------------------------------------------------------------
// Strict config parsing; a misspelled key fails before any work starts.

namespace detail {

inline void require_keys(const nlohmann::json& j,
                         const std::vector<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::invalid_argument("config: unknown key \"" + key + "\" in " +
                                  where);
}

}  // namespace detail

inline MaskConfig mask_config_from_json(const nlohmann::json& j) {
  detail::require_keys(j, {"threshold", "dilation_radius", "fill", "word_gap",
                           "oversize_factor"},
                       "mask");
  MaskConfig c;
  c.threshold = j.value("threshold", c.threshold);
  c.dilation_radius = j.value("dilation_radius", c.dilation_radius);
  c.fill = static_cast<uint8_t>(j.value("fill", static_cast<int>(c.fill)));
  c.word_gap = j.value("word_gap", c.word_gap);
  c.oversize_factor = j.value("oversize_factor", c.oversize_factor);
  c.validate();
  return c;
}

inline nlohmann::json mask_config_to_json(const MaskConfig& c) {
  return nlohmann::json{{"threshold", c.threshold},
                        {"dilation_radius", c.dilation_radius},
                        {"fill", static_cast<int>(c.fill)},
                        {"word_gap", c.word_gap},
                        {"oversize_factor", c.oversize_factor}};
}

inline TrainConfig train_config_from_json(const nlohmann::json& j) {
  detail::require_keys(j,
                       {"learning_rate", "beta1", "beta2", "adam_eps",
                        "batch_size", "steps", "crop_size", "dice_eps", "seed"},
                       "train");
  TrainConfig c;
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.adam_eps = j.value("adam_eps", c.adam_eps);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.steps = j.value("steps", c.steps);
  c.crop_size = j.value("crop_size", c.crop_size);
  c.dice_eps = j.value("dice_eps", c.dice_eps);
  c.seed = j.value("seed", c.seed);
  return c;
}

inline EvalOptions eval_options_from_json(const nlohmann::json& j) {
  detail::require_keys(j, {"iou_threshold", "case_insensitive", "denominator"},
                       "eval");
  EvalOptions o;
  o.iou_threshold = j.value("iou_threshold", o.iou_threshold);
  o.case_insensitive = j.value("case_insensitive", o.case_insensitive);
  const std::string d = j.value("denominator", std::string("gt_plus_fp"));
  if (d == "gt_plus_fp")
    o.denominator = EsDenominator::GtPlusFp;
  else if (d == "gt_only")
    o.denominator = EsDenominator::GtOnly;
  else
    throw std::invalid_argument("config: eval.denominator must be gt_plus_fp or gt_only");
  return o;
}

inline nlohmann::json eval_options_to_json(const EvalOptions& o) {
  return nlohmann::json{
      {"iou_threshold", o.iou_threshold},
      {"case_insensitive", o.case_insensitive},
      {"denominator",
       o.denominator == EsDenominator::GtPlusFp ? "gt_plus_fp" : "gt_only"}};
}

// Everything a full pipeline run needs, resolvable from one JSON file.
struct ToolConfig {
  int version = 1;
  SynthConfig synth;
  TrainConfig train;
  UNetConfig unet;
  MaskConfig mask;
  std::string engine_kind = "reference";
  ExternalEngineConfig engine;
  std::vector<int> reference_heights = {14, 22, 32};
  EvalOptions eval;
  int tile = 256;
  int overlap = 32;
  std::string dataset, checkpoint, report, fonts_dir;
};

inline ToolConfig tool_config_from_json(const nlohmann::json& j) {
  detail::require_keys(j,
                       {"version", "synth", "train", "unet", "mask", "engine",
                        "eval", "tile", "overlap", "paths"},
                       "top level");
  ToolConfig c;
  c.version = j.value("version", 1);
  if (c.version != 1)
    throw std::invalid_argument("config: unsupported version");
  if (j.contains("synth")) c.synth = synth_config_from_json(j["synth"]);
  if (j.contains("train")) c.train = train_config_from_json(j["train"]);
  if (j.contains("unet")) c.unet = unet_config_from_json(j["unet"]);
  if (j.contains("mask")) c.mask = mask_config_from_json(j["mask"]);
  if (j.contains("eval")) c.eval = eval_options_from_json(j["eval"]);
  c.tile = j.value("tile", c.tile);
  c.overlap = j.value("overlap", c.overlap);
  if (j.contains("engine")) {
    const auto& e = j["engine"];
    if (e.is_string()) {
      c.engine_kind = e.get<std::string>();
      if (c.engine_kind != "reference")
        throw std::invalid_argument("config: engine string must be \"reference\"");
    } else {
      detail::require_keys(e, {"kind", "command_template", "timeout", "heights"},
                           "engine");
      c.engine_kind = e.value("kind", std::string("external"));
      if (c.engine_kind == "external") {
        c.engine.command_template = e.at("command_template").get<std::string>();
        c.engine.timeout_sec = e.value("timeout", c.engine.timeout_sec);
        c.engine.validate();
      } else if (c.engine_kind == "reference") {
        c.reference_heights =
            e.value("heights", c.reference_heights);
      } else {
        throw std::invalid_argument("config: engine.kind must be reference or external");
      }
    }
  }
  if (j.contains("paths")) {
    const auto& p = j["paths"];
    detail::require_keys(p, {"dataset", "checkpoint", "report", "fonts"},
                         "paths");
    c.dataset = p.value("dataset", std::string{});
    c.checkpoint = p.value("checkpoint", std::string{});
    c.report = p.value("report", std::string{});
    c.fonts_dir = p.value("fonts", std::string{});
  }
  return c;
}

inline nlohmann::json tool_config_to_json(const ToolConfig& c) {
  nlohmann::json engine;
  if (c.engine_kind == "reference")
    engine = nlohmann::json{{"kind", "reference"}, {"heights", c.reference_heights}};
  else
    engine = nlohmann::json{{"kind", "external"},
                            {"command_template", c.engine.command_template},
                            {"timeout", c.engine.timeout_sec}};
  return nlohmann::json{{"version", c.version},
                        {"synth", synth_config_to_json(c.synth)},
                        {"train", train_config_to_json(c.train)},
                        {"unet", unet_config_to_json(c.unet)},
                        {"mask", mask_config_to_json(c.mask)},
                        {"engine", engine},
                        {"eval", eval_options_to_json(c.eval)},
                        {"tile", c.tile},
                        {"overlap", c.overlap},
                        {"paths",
                         {{"dataset", c.dataset},
                          {"checkpoint", c.checkpoint},
                          {"report", c.report},
                          {"fonts", c.fonts_dir}}}};
}

inline ToolConfig load_tool_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("config: cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config: bad JSON in " + path + ": " + e.what());
  }
  return tool_config_from_json(j);
}

// ---------------------------------------------------------------------------
// Overlay: original | heatmap intensity | masked page, 1-px separators.

inline Raster render_overlay(const Raster& page, const ProbMap& heatmap,
                             const BinaryMap& mask) {
  if (heatmap.width != page.width || heatmap.height != page.height ||
      mask.width != page.width || mask.height != page.height)
    throw std::invalid_argument("render_overlay: dimension mismatch");
  MaskConfig mcfg;
  const Raster masked = apply_mask(page, mask, mcfg);
  const Raster heat = to_raster(heatmap);
  Raster out(3 * page.width + 2, page.height, 128);
  for (int y = 0; y < page.height; ++y) {
    for (int x = 0; x < page.width; ++x) {
      out.at(x, y) = page.at(x, y);
      out.at(page.width + 1 + x, y) = heat.at(x, y);
      out.at(2 * page.width + 2 + x, y) = masked.at(x, y);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subcommand helpers.

namespace cli_detail {

inline FontLibrary make_fonts(const std::string& fonts_dir) {
  FontLibrary fonts = embedded_fonts();
  if (!fonts_dir.empty()) load_font_dir(fonts, fonts_dir);
  return fonts;
}

inline std::unique_ptr<OcrEngine> make_engine(const ToolConfig& cfg,
                                              const FontLibrary& fonts) {
  if (cfg.engine_kind == "reference") {
    auto faces = fonts.pool(true);
    if (faces.empty()) faces = fonts.pool(false);
    return std::make_unique<ReferenceEngine>(
        build_reference_model(faces, cfg.reference_heights));
  }
  return std::make_unique<ExternalEngine>(cfg.engine);
}

inline std::vector<std::filesystem::path> sorted_files(const std::string& dir,
                                                       const std::string& ext) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ext) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

inline std::vector<WordAnnotation> load_gt_file(const std::string& path) {
  if (std::filesystem::path(path).extension() == ".json")
    return read_annotation(path).words;
  return read_quad_gt(path);
}

}  // namespace cli_detail

// Dispatches argv to a subcommand. Exit codes: 0 success, 1 usage error,
// 2 runtime error.
inline int cmd_dispatch(int argc, const char* const* argv) {
  CLI::App app{"document text detection, masking and OCR evaluation toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (strict keys)")
      ->expected(1);

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  int synth_n = 10;
  uint64_t synth_seed = 0;
  std::string synth_out = "dataset";
  int synth_workers = 1;
  int synth_doc_size = -1;
  double synth_hard_negative = -1.0;
  std::string synth_fonts;
  bool synth_print_config = false;
  synth->add_option("--n", synth_n, "number of documents");
  synth->add_option("--seed", synth_seed, "base seed");
  synth->add_option("--out", synth_out, "output directory");
  synth->add_option("--workers", synth_workers, "generator threads");
  synth->add_option("--doc-size", synth_doc_size, "document side in pixels");
  synth->add_option("--hard-negative-prob", synth_hard_negative,
                    "probability a tile is a hard negative");
  synth->add_option("--fonts", synth_fonts, "directory of extra .bfnt faces");
  synth->add_flag("--print-config", synth_print_config,
                  "dump the resolved config and exit");

  // ---- train ----
  auto* train_cmd = app.add_subcommand("train", "train the text detector");
  std::string train_dataset, train_out = "detector.ckpt", train_resume,
              train_loss_csv;
  int train_steps = -1, train_batch = -1, train_crop = -1;
  double train_lr = -1.0;
  uint64_t train_seed = 0;
  bool train_seed_set = false;
  std::string train_channels;
  train_cmd->add_option("--dataset", train_dataset, "dataset manifest.json")
      ->required();
  train_cmd->add_option("--out", train_out, "checkpoint path");
  train_cmd->add_option("--steps", train_steps, "optimizer steps");
  train_cmd->add_option("--batch", train_batch, "batch size");
  train_cmd->add_option("--crop", train_crop, "training crop size");
  train_cmd->add_option("--lr", train_lr, "learning rate");
  train_cmd
      ->add_option_function<uint64_t>(
          "--seed",
          [&](const uint64_t& v) {
            train_seed = v;
            train_seed_set = true;
          },
          "training seed")
      ->expected(1);
  train_cmd->add_option("--channels", train_channels,
                        "encoder channels, e.g. 32,64,128,256");
  train_cmd->add_option("--resume", train_resume, "checkpoint to resume from");
  train_cmd->add_option("--loss-csv", train_loss_csv,
                        "write the step,loss curve here");

  // ---- mask ----
  auto* mask_cmd = app.add_subcommand(
      "mask", "run the detector on a page and blank non-text regions");
  std::string mask_ckpt, mask_in, mask_out = "masked.pgm", mask_heatmap,
              mask_boxes;
  double mask_threshold = -1.0;
  int mask_dilation = -1;
  mask_cmd->add_option("--ckpt", mask_ckpt, "detector checkpoint")->required();
  mask_cmd->add_option("--in", mask_in, "input page (PGM)")->required();
  mask_cmd->add_option("--out", mask_out, "masked page output (PGM)");
  mask_cmd->add_option("--heatmap", mask_heatmap,
                       "also write the probability map (PGM)");
  mask_cmd->add_option("--boxes", mask_boxes,
                       "also write extracted word boxes (JSON)");
  mask_cmd->add_option("--threshold", mask_threshold, "probability cutoff");
  mask_cmd->add_option("--dilation", mask_dilation, "mask dilation radius");

  // ---- ocr ----
  auto* ocr_cmd = app.add_subcommand("ocr", "recognize a page, emit word TSV");
  std::string ocr_in, ocr_out;
  ocr_cmd->add_option("--in", ocr_in, "input page (PGM)")->required();
  ocr_cmd->add_option("--out", ocr_out, "TSV output path (default stdout)");

  // ---- eval ----
  auto* eval_cmd = app.add_subcommand(
      "eval", "score predictions (TSV) against ground truth");
  std::string eval_pred, eval_gt, eval_out;
  eval_cmd->add_option("--pred", eval_pred, "TSV file or directory")->required();
  eval_cmd
      ->add_option("--gt", eval_gt,
                   "annotation JSON, quad-per-line text file, or directory")
      ->required();
  eval_cmd->add_option("--out", eval_out, "report JSON path");

  // ---- pipeline ----
  auto* pipe_cmd = app.add_subcommand(
      "pipeline", "paired masked-vs-unmasked evaluation over a dataset");
  std::string pipe_dataset, pipe_ckpt, pipe_out = "paired_report.json";
  int pipe_limit = 0;
  pipe_cmd->add_option("--dataset", pipe_dataset, "dataset manifest.json")
      ->required();
  pipe_cmd->add_option("--ckpt", pipe_ckpt, "detector checkpoint")->required();
  pipe_cmd->add_option("--out", pipe_out, "paired report JSON path");
  pipe_cmd->add_option("--limit", pipe_limit, "evaluate only the first N docs");

  // ---- viz ----
  auto* viz_cmd = app.add_subcommand(
      "viz", "write an original|heatmap|masked overlay image");
  std::string viz_in, viz_heatmap, viz_ckpt, viz_out = "overlay.pgm";
  viz_cmd->add_option("--in", viz_in, "input page (PGM)")->required();
  viz_cmd->add_option("--heatmap", viz_heatmap,
                      "probability map as PGM (alternative to --ckpt)");
  viz_cmd->add_option("--ckpt", viz_ckpt, "compute the heatmap with this checkpoint");
  viz_cmd->add_option("--out", viz_out, "overlay output (PGM)");

  // ---- fonts ----
  auto* fonts_cmd = app.add_subcommand("fonts", "list or export bundled faces");
  std::string fonts_export;
  fonts_cmd->add_option("--export", fonts_export,
                        "write every bundled face as .bfnt into this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    ToolConfig cfg;
    if (!config_path.empty()) cfg = load_tool_config(config_path);

    if (*synth) {
      if (synth_doc_size > 0) cfg.synth.doc_size = synth_doc_size;
      if (synth_hard_negative >= 0) cfg.synth.hard_negative_prob = synth_hard_negative;
      cfg.synth.validate();
      if (synth_print_config) {
        std::printf("%s\n", tool_config_to_json(cfg).dump(1).c_str());
        return 0;
      }
      const FontLibrary fonts = cli_detail::make_fonts(
          synth_fonts.empty() ? cfg.fonts_dir : synth_fonts);
      TextSampler corpus;
      generate_dataset(synth_n, cfg.synth, fonts, corpus, synth_out, synth_seed,
                       synth_workers);
      std::printf("wrote %d samples to %s\n", synth_n, synth_out.c_str());
      return 0;
    }

    if (*train_cmd) {
      if (train_steps > 0) cfg.train.steps = train_steps;
      if (train_batch > 0) cfg.train.batch_size = train_batch;
      if (train_crop > 0) cfg.train.crop_size = train_crop;
      if (train_lr > 0) cfg.train.learning_rate = train_lr;
      if (train_seed_set) cfg.train.seed = train_seed;
      if (!train_channels.empty()) {
        cfg.unet.encoder_channels.clear();
        std::istringstream ss(train_channels);
        std::string tok;
        while (std::getline(ss, tok, ','))
          cfg.unet.encoder_channels.push_back(std::stoi(tok));
        cfg.unet.levels = static_cast<int>(cfg.unet.encoder_channels.size());
      }
      cfg.unet.validate();
      const TrainSet data = TrainSet::load(train_dataset);
      Checkpoint resume;
      const Checkpoint* resume_ptr = nullptr;
      if (!train_resume.empty()) {
        resume = load_checkpoint(train_resume);
        resume_ptr = &resume;
      }
      Checkpoint ckpt = train(cfg.train, cfg.unet, data, resume_ptr,
                              [](int64_t step, double loss) {
                                if (step % 25 == 0)
                                  std::printf("step %lld loss %.4f\n",
                                              static_cast<long long>(step), loss);
                              });
      save_checkpoint(ckpt, train_out);
      if (!train_loss_csv.empty()) write_loss_csv(ckpt, train_loss_csv);
      std::printf("checkpoint written to %s (final loss %.4f)\n",
                  train_out.c_str(),
                  ckpt.loss_curve.empty() ? 0.0 : ckpt.loss_curve.back());
      return 0;
    }

    if (*mask_cmd) {
      if (mask_threshold > 0) cfg.mask.threshold = mask_threshold;
      if (mask_dilation >= 0) cfg.mask.dilation_radius = mask_dilation;
      cfg.mask.validate();
      const Checkpoint ckpt = load_checkpoint(mask_ckpt);
      const UNetParams params = ckpt.to_params();
      const Raster page = read_pgm(mask_in);
      const ProbMap heatmap = predict_page(params, page, cfg.tile, cfg.overlap);
      const BinaryMap mask = heatmap_to_mask(heatmap, cfg.mask);
      write_pgm(apply_mask(page, mask, cfg.mask), mask_out);
      if (!mask_heatmap.empty()) write_pgm(to_raster(heatmap), mask_heatmap);
      if (!mask_boxes.empty()) {
        nlohmann::json boxes = nlohmann::json::array();
        for (const auto& b : boxes_from_mask(mask, cfg.mask))
          boxes.push_back({b.x0, b.y0, b.x1, b.y1});
        std::ofstream f(mask_boxes);
        if (!f) throw std::runtime_error("cannot open " + mask_boxes);
        f << boxes.dump(1) << "\n";
      }
      std::printf("masked page written to %s\n", mask_out.c_str());
      return 0;
    }

    if (*ocr_cmd) {
      const FontLibrary fonts = cli_detail::make_fonts(cfg.fonts_dir);
      auto engine = cli_detail::make_engine(cfg, fonts);
      const Raster page = read_pgm(ocr_in);
      const std::string tsv = words_to_tsv(engine->recognize(page));
      if (ocr_out.empty()) {
        std::fputs(tsv.c_str(), stdout);
      } else {
        std::ofstream f(ocr_out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + ocr_out);
        f << tsv;
      }
      return 0;
    }

    if (*eval_cmd) {
      std::vector<std::pair<std::string, std::string>> pairs;
      if (std::filesystem::is_directory(eval_pred)) {
        if (!std::filesystem::is_directory(eval_gt))
          throw std::runtime_error("eval: --pred is a directory, --gt must be too");
        auto preds = cli_detail::sorted_files(eval_pred, ".tsv");
        auto gts = cli_detail::sorted_files(eval_gt, ".json");
        if (gts.empty()) gts = cli_detail::sorted_files(eval_gt, ".txt");
        if (preds.size() != gts.size())
          throw std::runtime_error("eval: prediction/ground-truth counts differ");
        for (size_t i = 0; i < preds.size(); ++i)
          pairs.emplace_back(preds[i].string(), gts[i].string());
      } else {
        pairs.emplace_back(eval_pred, eval_gt);
      }
      std::vector<DocEval> docs;
      for (const auto& [pred_path, gt_path] : pairs)
        docs.push_back(evaluate_document(
            read_tsv(pred_path), cli_detail::load_gt_file(gt_path), cfg.eval,
            std::filesystem::path(pred_path).filename().string()));
      const EvalReport report = aggregate_report(std::move(docs), cfg.eval);
      if (!eval_out.empty()) write_report(report, eval_out);
      std::printf("documents %zu  F1 %.4f  ES %.4f\n", report.documents.size(),
                  report.f1, report.mean_edit_score);
      return 0;
    }

    if (*pipe_cmd) {
      const Checkpoint ckpt = load_checkpoint(pipe_ckpt);
      const UNetParams params = ckpt.to_params();
      const FontLibrary fonts = cli_detail::make_fonts(cfg.fonts_dir);
      auto engine = cli_detail::make_engine(cfg, fonts);
      const auto pages = load_dataset_pages(pipe_dataset, pipe_limit);
      PipelineConfigKnobs knobs{cfg.mask, cfg.eval, cfg.tile, cfg.overlap};
      const PairedReport report = run_pipeline(params, *engine, pages, knobs);
      std::ofstream f(pipe_out);
      if (!f) throw std::runtime_error("cannot open " + pipe_out);
      f << paired_report_to_json(report).dump(1) << "\n";
      std::printf(
          "unmasked F1 %.4f ES %.4f | masked F1 %.4f ES %.4f | delta ES %+.4f\n",
          report.unmasked.f1, report.unmasked.mean_edit_score, report.masked.f1,
          report.masked.mean_edit_score, report.delta_es);
      return 0;
    }

    if (*viz_cmd) {
      const Raster page = read_pgm(viz_in);
      ProbMap heatmap;
      if (!viz_ckpt.empty()) {
        const Checkpoint ckpt = load_checkpoint(viz_ckpt);
        heatmap = predict_page(ckpt.to_params(), page, cfg.tile, cfg.overlap);
      } else if (!viz_heatmap.empty()) {
        const Raster h = read_pgm(viz_heatmap);
        if (h.width != page.width || h.height != page.height)
          throw std::runtime_error("viz: heatmap/page dimension mismatch");
        heatmap = ProbMap(h.width, h.height);
        for (size_t i = 0; i < h.data.size(); ++i)
          heatmap.data[i] = h.data[i] / 255.f;
      } else {
        throw std::runtime_error("viz: need --heatmap or --ckpt");
      }
      const BinaryMap mask = heatmap_to_mask(heatmap, cfg.mask);
      write_pgm(render_overlay(page, heatmap, mask), viz_out);
      std::printf("overlay written to %s\n", viz_out.c_str());
      return 0;
    }

    if (*fonts_cmd) {
      const FontLibrary fonts = embedded_fonts();
      if (!fonts_export.empty()) {
        std::filesystem::create_directories(fonts_export);
        for (const auto& face : fonts.faces)
          export_bfnt(face, (std::filesystem::path(fonts_export) /
                             (face.identifier + ".bfnt"))
                                .string());
        std::printf("exported %zu faces to %s\n", fonts.faces.size(),
                    fonts_export.c_str());
      } else {
        for (const auto& face : fonts.faces)
          std::printf("%s\t%s\t%zu glyphs\n", face.identifier.c_str(),
                      face.common ? "common" : "unique", face.glyphs.size());
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}

}  // namespace docmask
