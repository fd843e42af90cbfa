// Acceptance suite: runs every shipping criterion end to end and prints one
// PASS/FAIL line per criterion. Heavyweight artifacts (datasets, trained
// checkpoints) are cached in the --work directory so reruns and --only
// subsets stay cheap.
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

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "docmask/cli.hpp"
#include "docmask/evalkit.hpp"
#include "docmask/infer.hpp"
#include "docmask/maskpipe.hpp"
#include "docmask/ocr.hpp"
#include "docmask/pipeline.hpp"
#include "docmask/sha256.hpp"
#include "docmask/synthgen.hpp"
#include "docmask/train.hpp"

using namespace docmask;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Desk-scale budgets. Dataset sizes and step counts are the scaled-down
// regimen the quality criteria run at; the thresholds themselves are
// asserted inline below.

constexpr int kQualityTrainDocs = 2000;
constexpr int kQualityEvalDocs = 200;
constexpr int kQualityTrainSteps = 1400;
constexpr int kQualityBatch = 2;
constexpr int kQualityCrop = 128;
constexpr double kQualityLr = 1e-3;

constexpr int kAblationSeeds = 10;
constexpr int kAblationTrainDocs = 80;
constexpr int kAblationTestDocs = 16;
constexpr int kAblationSteps = 300;

constexpr int kMaskingEvalDocs = 100;

struct Ctx {
  fs::path work;
  FontLibrary fonts = embedded_fonts();
  TextSampler corpus;
};

// The scaled-down document recipe: default noise families, smaller pages.
SynthConfig desk_config() {
  SynthConfig c;
  c.doc_size = 256;
  c.font_size_min = 10;
  c.font_size_max = 24;
  c.tiles_min = 2;
  c.tiles_max = 6;
  return c;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// ---------------------------------------------------------------------------
// Criterion 1: metric oracles.

// Plain recursion straight from the edit-distance definition, no memo.
int lev_recursive(const char* a, int la, const char* b, int lb) {
  if (la == 0) return lb;
  if (lb == 0) return la;
  const int sub = lev_recursive(a + 1, la - 1, b + 1, lb - 1) +
                  (a[0] == b[0] ? 0 : 1);
  const int del = lev_recursive(a + 1, la - 1, b, lb) + 1;
  const int ins = lev_recursive(a, la, b + 1, lb - 1) + 1;
  return std::min({sub, del, ins});
}

bool criterion1(Ctx&, std::string& note) {
  const auto t0 = std::chrono::steady_clock::now();
  // every ordered pair over {a,b,c} with combined length <= 8
  int64_t pairs = 0;
  for (int la = 0; la <= 8; ++la) {
    for (int lb = 0; la + lb <= 8; ++lb) {
      int64_t na = 1, nb = 1;
      for (int i = 0; i < la; ++i) na *= 3;
      for (int i = 0; i < lb; ++i) nb *= 3;
      std::string a(la, 'a'), b(lb, 'a');
      for (int64_t ca = 0; ca < na; ++ca) {
        int64_t ra = ca;
        for (int i = 0; i < la; ++i) {
          a[i] = static_cast<char>('a' + ra % 3);
          ra /= 3;
        }
        for (int64_t cb = 0; cb < nb; ++cb) {
          int64_t rb = cb;
          for (int i = 0; i < lb; ++i) {
            b[i] = static_cast<char>('a' + rb % 3);
            rb /= 3;
          }
          if (levenshtein(a, b) != lev_recursive(a.data(), la, b.data(), lb)) {
            note = "levenshtein mismatch on '" + a + "' vs '" + b + "'";
            return false;
          }
          ++pairs;
        }
      }
    }
  }

  Rng rng(4242);
  auto random_box = [&](int extent) {
    const int x0 = static_cast<int>(rng.below(extent - 1));
    const int y0 = static_cast<int>(rng.below(extent - 1));
    return Box(x0, y0, x0 + 1 + static_cast<int>(rng.below(extent - x0 - 1)),
               y0 + 1 + static_cast<int>(rng.below(extent - y0 - 1)));
  };
  for (int i = 0; i < 1000; ++i) {
    const Box a = random_box(40), b = random_box(40);
    int64_t inter = 0, uni = 0;
    for (int y = 0; y < 40; ++y)
      for (int x = 0; x < 40; ++x) {
        const bool ia = a.contains(x, y), ib = b.contains(x, y);
        inter += ia && ib;
        uni += ia || ib;
      }
    const double oracle = uni ? static_cast<double>(inter) / uni : 0.0;
    if (std::abs(iou(a, b) - oracle) > 1e-9) {
      note = "iou mismatch vs pixel-count oracle";
      return false;
    }
  }
  const double dt = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "levenshtein OK on %lld pairs (len<=8 over {a,b,c}); iou OK on "
                "1000 box pairs; %.1fs (budget 10s)",
                static_cast<long long>(pairs), dt);
  note = buf;
  return dt < 10.0;
}

// ---------------------------------------------------------------------------
// Criterion 2: gradient check, 32-bit analytic vs central differences of
// the 64-bit forward path; one-sided fallback where a rectifier/pool kink
// sits inside the FD window.

bool criterion2(Ctx&, std::string& note) {
  const auto t0 = std::chrono::steady_clock::now();
  UNetConfig cfg;
  cfg.encoder_channels = {2, 4, 8, 16};
  UNetParamsT<float> pf;
  pf.alloc(cfg);
  pf.init_weights(42);
  Rng brng(99);
  pf.visit([&](const std::string& n, TensorT<float>& t) {
    if (n.back() == 'b')
      for (auto& v : t.data)
        v = static_cast<float>(brng.range_real(-0.05, 0.05));
  });
  UNetWorkT<float> wf;
  wf.resize(cfg, 8, 8);
  Rng rng(7);
  std::vector<float> x(64), g(64);
  for (auto& v : x) v = static_cast<float>(rng.uniform());
  for (auto& v : g) v = rng.bernoulli(0.4) ? 1.f : 0.f;
  UNetParamsT<float> grads;
  grads.alloc(cfg);
  grads.zero();
  unet_forward_item(pf, wf, x.data());
  nn::dice_backward_span(wf.prob.data.data(), g.data(), 64, 1.0, 1.0,
                         wf.g_prob.data.data());
  unet_backward_item(pf, wf, grads);

  UNetParamsT<double> pd;
  pd.alloc(cfg);
  std::vector<TensorT<float>*> pfv, gfv;
  std::vector<TensorT<double>*> pdv;
  pf.visit([&](const std::string&, TensorT<float>& t) { pfv.push_back(&t); });
  grads.visit([&](const std::string&, TensorT<float>& t) { gfv.push_back(&t); });
  pd.visit([&](const std::string&, TensorT<double>& t) { pdv.push_back(&t); });
  for (size_t i = 0; i < pfv.size(); ++i)
    for (size_t j = 0; j < pfv[i]->data.size(); ++j)
      pdv[i]->data[j] = pfv[i]->data[j];
  UNetWorkT<double> wd;
  wd.resize(cfg, 8, 8);
  std::vector<double> xd(x.begin(), x.end()), gd(g.begin(), g.end());
  auto loss_d = [&]() {
    unet_forward_item(pd, wd, xd.data());
    return nn::dice_loss_span(wd.prob.data.data(), gd.data(), 64, 1.0);
  };
  const double l0 = loss_d();

  int64_t total = 0, ok = 0;
  double worst = 0.0;
  for (size_t ti = 0; ti < pdv.size(); ++ti) {
    auto& t = *pdv[ti];
    for (size_t i = 0; i < t.data.size(); ++i) {
      const double save = t.data[i];
      const double h = std::max(1e-6, 1e-5 * std::abs(save));
      t.data[i] = save + h;
      const double lp = loss_d();
      t.data[i] = save - h;
      const double lm = loss_d();
      t.data[i] = save;
      const double an = gfv[ti]->data[i];
      auto rel_of = [&](double fd) {
        return std::abs(fd - an) / std::max({1e-4, std::abs(fd), std::abs(an)});
      };
      double rel = rel_of((lp - lm) / (2 * h));
      if (rel >= 1e-2)
        rel = std::min({rel, rel_of((lp - l0) / h), rel_of((l0 - lm) / h)});
      ++total;
      if (rel < 1e-2) ++ok;
      worst = std::max(worst, rel);
    }
  }
  const double frac = static_cast<double>(ok) / static_cast<double>(total);
  const double dt = seconds_since(t0);
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "%lld params, %.3f%% under 1e-2 (need >=99%%), worst rel %.3g "
                "(need <5e-2); %.1fs (budget 60s)",
                static_cast<long long>(total), 100.0 * frac, worst, dt);
  note = buf;
  return frac >= 0.99 && worst < 5e-2 && dt < 60.0;
}

// ---------------------------------------------------------------------------
// Criterion 3: training sanity, 200 ADAM steps overfitting one fixed
// 256x256 sample.

bool criterion3(Ctx& ctx, std::string& note) {
  const auto t0 = std::chrono::steady_clock::now();
  const DocumentSample doc =
      compose_document(desk_config(), ctx.fonts, ctx.corpus, 31337);
  TrainSet data;
  data.samples.push_back({doc.image, doc.gt});
  TrainConfig t;
  t.learning_rate = 1e-3;  // raised from the 1e-5 default, as recorded here
  t.batch_size = 1;
  t.steps = 200;
  t.crop_size = 128;
  t.seed = 11;
  UNetConfig u;  // the full 32..256 channel stack
  const Checkpoint ckpt = train(t, u, data);
  const float initial = ckpt.loss_curve.front();
  const float final_loss = ckpt.loss_curve.back();
  const double dt = seconds_since(t0);
  char buf[220];
  std::snprintf(buf, sizeof buf,
                "dice %.4f -> %.4f over 200 steps (need < 0.5x; lr raised to "
                "%.0e from default %.0e, crop %d); %.0fs (budget 300s)",
                initial, final_loss, t.learning_rate,
                TrainConfig{}.learning_rate, t.crop_size, dt);
  note = buf;
  return final_loss < 0.5f * initial && dt < 300.0;
}

// ---------------------------------------------------------------------------
// Criterion 4 artifacts, shared with criteria 6 and 7.

fs::path quality_ckpt_path(Ctx& ctx) { return ctx.work / "detector.ckpt"; }

void ensure_quality_datasets(Ctx& ctx) {
  const SynthConfig cfg = desk_config();
  if (!fs::exists(ctx.work / "train" / "manifest.json"))
    generate_dataset(kQualityTrainDocs, cfg, ctx.fonts, ctx.corpus,
                     (ctx.work / "train").string(), 1001, 2);
  if (!fs::exists(ctx.work / "eval" / "manifest.json"))
    generate_dataset(kQualityEvalDocs, cfg, ctx.fonts, ctx.corpus,
                     (ctx.work / "eval").string(), 2002, 2);
}

Checkpoint ensure_quality_checkpoint(Ctx& ctx) {
  const fs::path path = quality_ckpt_path(ctx);
  if (fs::exists(path)) return load_checkpoint(path.string());
  ensure_quality_datasets(ctx);
  const TrainSet data =
      TrainSet::load((ctx.work / "train" / "manifest.json").string());
  TrainConfig t;
  t.learning_rate = kQualityLr;
  t.batch_size = kQualityBatch;
  t.steps = kQualityTrainSteps;
  t.crop_size = kQualityCrop;
  t.seed = 9;
  UNetConfig u;
  Checkpoint ckpt = train(t, u, data, nullptr, [](int64_t s, double l) {
    if (s % 100 == 0) {
      std::printf("    [train] step %lld loss %.4f\n",
                  static_cast<long long>(s), l);
      std::fflush(stdout);
    }
  });
  save_checkpoint(ckpt, path.string());
  write_loss_csv(ckpt, (ctx.work / "detector_loss.csv").string());
  return ckpt;
}

bool criterion4(Ctx& ctx, std::string& note) {
  const auto t0 = std::chrono::steady_clock::now();
  ensure_quality_datasets(ctx);
  const Checkpoint ckpt = ensure_quality_checkpoint(ctx);
  const UNetParams params = ckpt.to_params();

  const auto manifest =
      read_manifest((ctx.work / "eval" / "manifest.json").string());
  const fs::path dir = ctx.work / "eval";
  int64_t ptp = 0, pfp = 0, pfn = 0;
  int64_t btp = 0, bfp = 0, bfn = 0;
  MaskConfig box_cfg;
  box_cfg.dilation_radius = 1;  // tight boxes for IOU scoring
  for (const auto& e : manifest.entries) {
    const Raster img = read_pgm((dir / e.image).string());
    const BinaryMap gt = read_binary_pgm((dir / e.gt).string());
    const ProbMap hm = predict_page(params, img, 256, 0);
    for (size_t k = 0; k < hm.data.size(); ++k) {
      const bool p = hm.data[k] >= 0.5f, g = gt.data[k] != 0;
      ptp += p && g;
      pfp += p && !g;
      pfn += !p && g;
    }
    const auto ann = read_annotation((dir / e.ann).string());
    std::vector<Box> gt_boxes;
    for (const auto& w : ann.words) gt_boxes.push_back(w.box);
    const auto boxes = boxes_from_mask(heatmap_to_mask(hm, box_cfg), box_cfg);
    const MatchResult m = match_boxes(boxes, gt_boxes, 0.5);
    btp += static_cast<int64_t>(m.pairs.size());
    bfp += static_cast<int64_t>(m.unmatched_pred.size());
    bfn += static_cast<int64_t>(m.unmatched_gt.size());
  }
  const auto pixel = detection_f1(ptp, pfp, pfn);
  const auto box = detection_f1(btp, bfp, bfn);
  const double dt = seconds_since(t0);
  char buf[260];
  std::snprintf(buf, sizeof buf,
                "%d train docs, %d steps; pixel F1 %.4f (need >=0.80), box "
                "F1@0.5 %.4f (need >=0.70) over %d held-out docs; %.0fs "
                "(budget 3600s)",
                kQualityTrainDocs, kQualityTrainSteps, pixel.f1, box.f1,
                kQualityEvalDocs, dt);
  note = buf;
  return pixel.f1 >= 0.80 && box.f1 >= 0.70 && dt < 3600.0;
}

// ---------------------------------------------------------------------------
// Criterion 5: hard-negative ablation.

bool criterion5(Ctx& ctx, std::string& note) {
  const auto t0 = std::chrono::steady_clock::now();
  UNetConfig u;
  u.encoder_channels = {8, 16, 32, 64};
  int wins = 0;
  std::string per_seed;
  for (int s = 0; s < kAblationSeeds; ++s) {
    SynthConfig base = desk_config();
    base.doc_size = 128;
    base.tiles_min = 2;
    base.tiles_max = 4;
    base.font_size_min = 10;
    base.font_size_max = 18;

    double rate[2] = {0, 0};
    for (int arm = 0; arm < 2; ++arm) {
      SynthConfig cfg = base;
      cfg.hard_negative_prob =
          arm == 0 ? 0.0 : SynthConfig{}.hard_negative_prob;
      const fs::path dir = ctx.work / ("ablate_s" + std::to_string(s) + "_a" +
                                       std::to_string(arm));
      if (!fs::exists(dir / "manifest.json"))
        generate_dataset(kAblationTrainDocs, cfg, ctx.fonts, ctx.corpus,
                         dir.string(), 5000 + 17 * s + arm, 2);
      const TrainSet data = TrainSet::load((dir / "manifest.json").string());
      TrainConfig t;
      t.learning_rate = 1e-3;
      t.batch_size = 2;
      t.steps = kAblationSteps;
      t.crop_size = 64;
      t.seed = static_cast<uint64_t>(100 + s);
      const Checkpoint ckpt = train(t, u, data);
      const UNetParams params = ckpt.to_params();

      // hard-negative-only pages: every predicted-positive pixel is false
      SynthConfig tcfg = base;
      tcfg.hard_negative_prob = 1.0;
      tcfg.tiles_min = 4;
      tcfg.tiles_max = 8;
      int64_t fp = 0, all = 0;
      for (int d = 0; d < kAblationTestDocs; ++d) {
        const DocumentSample doc =
            compose_document(tcfg, ctx.fonts, ctx.corpus, mix_seed(7000 + s, d));
        const ProbMap hm = predict_page(params, doc.image, 128, 0);
        for (float v : hm.data) fp += v >= 0.5f;
        all += static_cast<int64_t>(hm.data.size());
      }
      rate[arm] = static_cast<double>(fp) / static_cast<double>(all);
    }
    const bool win = rate[1] < rate[0];
    wins += win;
    per_seed += win ? "+" : "-";
    std::printf(
        "    [ablation] seed %d: fp-rate without-hn %.5f with-hn %.5f %s\n", s,
        rate[0], rate[1], win ? "ok" : "MISS");
    std::fflush(stdout);
  }
  const double dt = seconds_since(t0);
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "hard-negative-trained detector had strictly lower FP pixel "
                "rate in %d/%d seeds [%s] (need >=8/10); %.0fs",
                wins, kAblationSeeds, per_seed.c_str(), dt);
  note = buf;
  return wins >= 8;
}

// ---------------------------------------------------------------------------
// Criterion 6: masking improvement with the reference recognizer.

bool criterion6(Ctx& ctx, std::string& note) {
  const auto t0 = std::chrono::steady_clock::now();
  const Checkpoint ckpt = ensure_quality_checkpoint(ctx);
  const UNetParams params = ckpt.to_params();
  const SynthConfig cfg = desk_config();
  if (!fs::exists(ctx.work / "masking_eval" / "manifest.json"))
    generate_dataset(kMaskingEvalDocs, cfg, ctx.fonts, ctx.corpus,
                     (ctx.work / "masking_eval").string(), 3003, 2);
  ReferenceEngine engine(
      build_reference_model(ctx.fonts.pool(true), {14, 22, 32}));
  const auto pages =
      load_dataset_pages((ctx.work / "masking_eval" / "manifest.json").string());
  PipelineConfigKnobs knobs;
  const PairedReport report = run_pipeline(params, engine, pages, knobs);
  {
    std::ofstream f(ctx.work / "masking_report.json");
    f << paired_report_to_json(report).dump(1) << "\n";
  }
  const double dt = seconds_since(t0);
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "mean ES masked %.4f vs unmasked %.4f, delta %+.4f (need "
                ">=+0.05) over %d noisy docs; %.0fs (budget 600s)",
                report.masked.mean_edit_score, report.unmasked.mean_edit_score,
                report.delta_es, kMaskingEvalDocs, dt);
  note = buf;
  return report.delta_es >= 0.05 && dt < 600.0;
}

// ---------------------------------------------------------------------------
// Criterion 7: determinism of synth and of the full pipeline.

int run_cli(std::vector<std::string> args) {
  std::vector<const char*> argv{"docmask"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return cmd_dispatch(static_cast<int>(argv.size()), argv.data());
}

std::string hash_dir(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  Sha256 h;
  for (const auto& f : files) {
    const std::string rel = fs::relative(f, dir).string();
    h.update(rel.data(), rel.size());
    const std::string fh = sha256_file_hex(f.string());
    h.update(fh.data(), fh.size());
  }
  return h.hex_digest();
}

bool criterion7(Ctx& ctx, std::string& note) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path a = ctx.work / "det_a", b = ctx.work / "det_b";
  fs::remove_all(a);
  fs::remove_all(b);
  if (run_cli({"synth", "--n", "10", "--seed", "7", "--out", a.string()}) != 0 ||
      run_cli({"synth", "--n", "10", "--seed", "7", "--out", b.string()}) != 0) {
    note = "synth runs failed";
    return false;
  }
  const std::string ha = hash_dir(a), hb = hash_dir(b);
  const bool synth_ok = ha == hb;

  // full pipeline twice with the reference engine
  ensure_quality_checkpoint(ctx);
  const fs::path r1 = ctx.work / "paired_a.json",
                 r2 = ctx.work / "paired_b.json";
  for (const auto& out : {r1, r2})
    if (run_cli({"pipeline", "--dataset",
                 (ctx.work / "eval" / "manifest.json").string(), "--ckpt",
                 quality_ckpt_path(ctx).string(), "--limit", "10", "--out",
                 out.string()}) != 0) {
      note = "pipeline run failed";
      return false;
    }
  const bool pipe_ok =
      sha256_file_hex(r1.string()) == sha256_file_hex(r2.string());
  const double dt = seconds_since(t0);
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "synth sha256 %s (%s...), paired pipeline reports %s; %.0fs",
                synth_ok ? "identical" : "DIFFER", ha.substr(0, 12).c_str(),
                pipe_ok ? "byte-identical" : "DIFFER", dt);
  note = buf;
  return synth_ok && pipe_ok;
}

// ---------------------------------------------------------------------------
// Criterion 8: format round-trips.

bool criterion8(Ctx& ctx, std::string& note) {
  const fs::path dir = ctx.work / "roundtrip";
  fs::create_directories(dir);

  // checkpoint: save -> load -> save must be byte-stable and tensor-exact
  UNetConfig u;
  u.encoder_channels = {4, 8, 16, 32};
  UNetParams params;
  params.alloc(u);
  params.init_weights(2024);
  Checkpoint c = checkpoint_from_params(params);
  c.step = 7;
  c.loss_curve = {1.f, 0.5f, 0.25f};
  c.dataset_config_hash = "cafe";
  const std::string p1 = (dir / "a.ckpt").string();
  const std::string p2 = (dir / "b.ckpt").string();
  save_checkpoint(c, p1);
  const Checkpoint r = load_checkpoint(p1);
  bool ok = r.tensors.size() == c.tensors.size();
  for (const auto& [name, t] : c.tensors)
    ok = ok && r.tensors.count(name) && r.tensors.at(name).data == t.data;
  save_checkpoint(r, p2);
  const bool ckpt_ok = ok && sha256_file_hex(p1) == sha256_file_hex(p2);

  // report JSON
  DocEval d;
  d.id = "x";
  d.tp = 3;
  d.fp = 1;
  d.fn = 2;
  d.precision = 0.75;
  d.recall = 0.6;
  d.f1 = 2 * 0.75 * 0.6 / 1.35;
  d.edit_score = 0.8125;
  const EvalReport rep = aggregate_report({d});
  const std::string rp = (dir / "report.json").string();
  write_report(rep, rp);
  const bool report_ok = report_to_json(read_report(rp)) == report_to_json(rep);

  // PGM
  Rng rng(5);
  Raster img(41, 23);
  for (auto& v : img.data) v = static_cast<uint8_t>(rng.below(256));
  const std::string ip = (dir / "img.pgm").string();
  write_pgm(img, ip);
  const bool pgm_ok = read_pgm(ip) == img;

  note = std::string("checkpoint ") + (ckpt_ok ? "bit-exact" : "BROKEN") +
         ", report JSON " + (report_ok ? "exact" : "BROKEN") + ", PGM " +
         (pgm_ok ? "exact" : "BROKEN");
  return ckpt_ok && report_ok && pgm_ok;
}

// ---------------------------------------------------------------------------
// Criterion 9: oversized-detection splitting.

class LineSpanEngine : public OcrEngine {
 public:
  LineSpanEngine(int full_width, std::string line_text)
      : full_width_(full_width), line_text_(std::move(line_text)) {}

  std::vector<OcrWord> recognize(const Raster& page) override {
    int minx = page.width, miny = page.height, maxx = -1, maxy = -1;
    for (int y = 0; y < page.height; ++y)
      for (int x = 0; x < page.width; ++x)
        if (page.at(x, y) < 128) {
          minx = std::min(minx, x);
          maxx = std::max(maxx, x);
          miny = std::min(miny, y);
          maxy = std::max(maxy, y);
        }
    if (maxx < minx) return {};
    const Box ink(minx, miny, maxx + 1, maxy + 1);
    if (page.width == full_width_)  // document-level call: one giant word
      return {OcrWord(line_text_, ink, 0.5)};
    ++region_calls_;
    return {OcrWord("part" + std::to_string(region_calls_), ink, 0.9)};
  }
  std::string name() const override { return "line-span-stub"; }
  int region_calls() const { return region_calls_; }

 private:
  int full_width_;
  std::string line_text_;
  int region_calls_ = 0;
};

bool criterion9(Ctx& ctx, std::string& note) {
  // a page with three words on one line
  const auto& face = ctx.fonts.faces[0];
  const TextTile tile = render_text_tile("alpha beta gamma", face, 20, 3);
  Raster page(256, 64, 255);
  for (int y = 0; y < tile.image.height && y < 64; ++y)
    for (int x = 0; x < tile.image.width && x < 256; ++x)
      page.at(x + 8, y + 8) = tile.image.at(x, y);
  std::vector<Box> det_boxes;
  for (const auto& w : tile.words)
    det_boxes.push_back(
        Box(w.box.x0 + 8, w.box.y0 + 8, w.box.x1 + 8, w.box.y1 + 8));
  if (det_boxes.size() != 3) {
    note = "setup failed to produce 3 detector boxes";
    return false;
  }

  LineSpanEngine engine(page.width, "alphabetagamma");
  MaskConfig cfg;
  // direct check of the split decision
  const auto initial = engine.recognize(page);
  const SplitResult split = split_oversized(initial, det_boxes, cfg);
  const bool split_ok =
      split.kept.empty() && split.regions_to_reprocess.size() == 3;

  const auto words = recognize_with_splitting(engine, page, det_boxes, cfg);
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "line-spanning word -> %zu re-process regions (need 3), final "
                "output %zu words (need 3), %d region calls",
                split.regions_to_reprocess.size(), words.size(),
                engine.region_calls());
  note = buf;
  return split_ok && words.size() == 3 && engine.region_calls() == 3;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path work = "acceptance_work";
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--work") && i + 1 < argc) {
      work = argv[++i];
    } else if (!std::strcmp(argv[i], "--only") && i + 1 < argc) {
      const std::string list = argv[++i];
      size_t pos = 0;
      while (pos < list.size()) {
        only.insert(std::atoi(list.c_str() + pos));
        pos = list.find(',', pos);
        if (pos == std::string::npos) break;
        ++pos;
      }
    } else {
      std::fprintf(stderr, "usage: %s [--work DIR] [--only N,M,...]\n",
                   argv[0]);
      return 2;
    }
  }
  fs::create_directories(work);
  Ctx ctx;
  ctx.work = work;

  using Fn = std::function<bool(Ctx&, std::string&)>;
  const std::vector<std::pair<const char*, Fn>> criteria = {
      {"metric oracle equivalence", criterion1},
      {"gradient check", criterion2},
      {"training sanity", criterion3},
      {"desk-scale detector quality", criterion4},
      {"hard-negative ablation", criterion5},
      {"masking improvement", criterion6},
      {"determinism", criterion7},
      {"format round-trips", criterion8},
      {"oversized-detection splitting", criterion9},
  };

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int num = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(num)) continue;
    std::printf("[criterion %d] %s ...\n", num, criteria[i].first);
    std::fflush(stdout);
    std::string note;
    bool ok = false;
    try {
      ok = criteria[i].second(ctx, note);
    } catch (const std::exception& e) {
      note = std::string("exception: ") + e.what();
    }
    std::printf("[criterion %d] %s: %s -- %s\n", num, ok ? "PASS" : "FAIL",
                criteria[i].first, note.c_str());
    std::fflush(stdout);
    failures += !ok;
  }
  if (failures)
    std::printf("%d criterion(s) FAILED\n", failures);
  else
    std::printf("all selected criteria passed\n");
  return failures == 0 ? 0 : 1;
}
