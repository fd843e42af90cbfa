// docmask/train.hpp -- dice-loss training loop with ADAM, random crop
// sampling from a dataset manifest, and resumable optimizer state.
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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "docmask/checkpoint.hpp"
#include "docmask/raster.hpp"
#include "docmask/rng.hpp"
#include "docmask/unet.hpp"

namespace docmask {

struct TrainConfig {
  double learning_rate = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int batch_size = 4;
  int steps = 1000;
  int crop_size = 256;
  double dice_eps = 1.0;
  uint64_t seed = 0;

  void validate(const UNetConfig& ucfg) const {
    if (learning_rate <= 0)
      throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
    if (batch_size < 1 || steps < 1)
      throw std::invalid_argument("TrainConfig: batch_size/steps must be >= 1");
    if (crop_size % ucfg.stride_alignment())
      throw std::invalid_argument(
          "TrainConfig: crop_size must be a multiple of " +
          std::to_string(ucfg.stride_alignment()));
    if (dice_eps <= 0)
      throw std::invalid_argument("TrainConfig: dice_eps must be > 0");
  }
};

inline nlohmann::json train_config_to_json(const TrainConfig& t) {
  return nlohmann::json{{"learning_rate", t.learning_rate},
                        {"beta1", t.beta1},
                        {"beta2", t.beta2},
                        {"adam_eps", t.adam_eps},
                        {"batch_size", t.batch_size},
                        {"steps", t.steps},
                        {"crop_size", t.crop_size},
                        {"dice_eps", t.dice_eps},
                        {"seed", t.seed}};
}

// An image/ground-truth pair held in memory.
struct TrainSample {
  Raster image;
  BinaryMap gt;
};

struct TrainSet {
  std::vector<TrainSample> samples;
  std::string config_hash;

  // Loads every sample referenced by a dataset manifest (paths relative to
  // the manifest's directory).
  static TrainSet load(const std::string& manifest_path) {
    std::ifstream f(manifest_path);
    if (!f)
      throw std::runtime_error("train: cannot open manifest " + manifest_path);
    nlohmann::json m;
    try {
      m = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("train: bad manifest " + manifest_path + ": " +
                               e.what());
    }
    const auto dir = std::filesystem::path(manifest_path).parent_path();
    TrainSet set;
    set.config_hash = m.value("config_hash", std::string{});
    for (const auto& e : m.at("entries")) {
      TrainSample s;
      s.image = read_pgm((dir / e.at("image").get<std::string>()).string());
      s.gt = read_binary_pgm((dir / e.at("gt").get<std::string>()).string());
      if (s.gt.width != s.image.width || s.gt.height != s.image.height)
        throw std::runtime_error("train: image/gt size mismatch at index " +
                                 std::to_string(e.at("index").get<int>()));
      set.samples.push_back(std::move(s));
    }
    return set;
  }
};

namespace detail {

// Copies a crop_size^2 window at (x0,y0) into float buffers; regions past
// the sample edge read as white paper / empty ground truth.
inline void fill_crop(const TrainSample& s, int x0, int y0, int crop,
                      float* img, float* gt) {
  for (int y = 0; y < crop; ++y) {
    for (int x = 0; x < crop; ++x) {
      int sx = x0 + x, sy = y0 + y;
      bool inside = sx < s.image.width && sy < s.image.height;
      img[y * crop + x] = inside ? s.image.at(sx, sy) / 255.f : 1.f;
      gt[y * crop + x] = inside && s.gt.at(sx, sy) ? 1.f : 0.f;
    }
  }
}

}  // namespace detail

using TrainProgressFn = std::function<void(int64_t step, double loss)>;

// Runs the training loop and returns a checkpoint carrying weights, ADAM
// moments and the loss curve. Fixed seeds give identical loss curves for
// any thread count; a non-finite loss aborts with the offending step.
inline Checkpoint train(const TrainConfig& tcfg, const UNetConfig& ucfg,
                        const TrainSet& data,
                        const Checkpoint* resume = nullptr,
                        const TrainProgressFn& progress = {}) {
  tcfg.validate(ucfg);
  if (static_cast<int>(data.samples.size()) < tcfg.batch_size)
    throw std::invalid_argument("train: need at least batch_size samples");

  UNetParams params, grads, adam_m, adam_v;
  int64_t start_step = 0;
  std::vector<float> curve;
  if (resume) {
    if (!(resume->config == ucfg))
      throw std::invalid_argument("train: resume checkpoint config mismatch");
    params = resume->to_params();
    adam_m.alloc(ucfg);
    adam_v.alloc(ucfg);
    adam_m.visit([&](const std::string& name, Tensor& t) {
      auto it = resume->tensors.find("adam.m." + name);
      if (it != resume->tensors.end()) t = it->second;
    });
    adam_v.visit([&](const std::string& name, Tensor& t) {
      auto it = resume->tensors.find("adam.v." + name);
      if (it != resume->tensors.end()) t = it->second;
    });
    start_step = resume->step;
    curve = resume->loss_curve;
  } else {
    params.alloc(ucfg);
    params.init_weights(tcfg.seed);
    adam_m.alloc(ucfg);
    adam_v.alloc(ucfg);
  }
  grads.alloc(ucfg);

  UNetWork work;
  work.resize(ucfg, tcfg.crop_size, tcfg.crop_size);
  const int64_t crop_n =
      static_cast<int64_t>(tcfg.crop_size) * tcfg.crop_size;
  std::vector<float> img(crop_n), gt(crop_n);

  for (int64_t step = start_step; step < start_step + tcfg.steps; ++step) {
    // Stateless per-step stream so resumed runs draw the same crops.
    Rng rng(mix_seed(tcfg.seed, static_cast<uint64_t>(step)));
    grads.zero();
    double loss = 0.0;
    for (int b = 0; b < tcfg.batch_size; ++b) {
      const auto& s =
          data.samples[rng.below(data.samples.size())];
      int x0 = 0, y0 = 0;
      if (s.image.width > tcfg.crop_size)
        x0 = static_cast<int>(rng.below(s.image.width - tcfg.crop_size + 1));
      if (s.image.height > tcfg.crop_size)
        y0 = static_cast<int>(rng.below(s.image.height - tcfg.crop_size + 1));
      detail::fill_crop(s, x0, y0, tcfg.crop_size, img.data(), gt.data());
      unet_forward_item(params, work, img.data());
      loss += nn::dice_loss_span(work.prob.data.data(), gt.data(), crop_n,
                                 tcfg.dice_eps) /
              tcfg.batch_size;
      nn::dice_backward_span(work.prob.data.data(), gt.data(), crop_n,
                             tcfg.dice_eps, 1.0 / tcfg.batch_size,
                             work.g_prob.data.data());
      unet_backward_item(params, work, grads);
    }
    if (!std::isfinite(loss))
      throw std::runtime_error("train: non-finite loss at step " +
                               std::to_string(step));
    // ADAM with bias correction.
    const int64_t t = step + 1;
    const double bc1 = 1.0 - std::pow(tcfg.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(tcfg.beta2, static_cast<double>(t));
    auto update = [&](Tensor& p, const Tensor& g, Tensor& m, Tensor& v) {
      for (size_t i = 0; i < p.data.size(); ++i) {
        const double gi = g.data[i];
        const double mi = tcfg.beta1 * m.data[i] + (1.0 - tcfg.beta1) * gi;
        const double vi =
            tcfg.beta2 * v.data[i] + (1.0 - tcfg.beta2) * gi * gi;
        m.data[i] = static_cast<float>(mi);
        v.data[i] = static_cast<float>(vi);
        p.data[i] -= static_cast<float>(tcfg.learning_rate * (mi / bc1) /
                                        (std::sqrt(vi / bc2) + tcfg.adam_eps));
      }
    };
    for (int l = 0; l < ucfg.levels; ++l) {
      update(params.enc1[l].w, grads.enc1[l].w, adam_m.enc1[l].w, adam_v.enc1[l].w);
      update(params.enc1[l].b, grads.enc1[l].b, adam_m.enc1[l].b, adam_v.enc1[l].b);
      update(params.enc2[l].w, grads.enc2[l].w, adam_m.enc2[l].w, adam_v.enc2[l].w);
      update(params.enc2[l].b, grads.enc2[l].b, adam_m.enc2[l].b, adam_v.enc2[l].b);
    }
    for (int l = 0; l < ucfg.levels - 1; ++l) {
      update(params.up[l].w, grads.up[l].w, adam_m.up[l].w, adam_v.up[l].w);
      update(params.up[l].b, grads.up[l].b, adam_m.up[l].b, adam_v.up[l].b);
      update(params.dec1[l].w, grads.dec1[l].w, adam_m.dec1[l].w, adam_v.dec1[l].w);
      update(params.dec1[l].b, grads.dec1[l].b, adam_m.dec1[l].b, adam_v.dec1[l].b);
      update(params.dec2[l].w, grads.dec2[l].w, adam_m.dec2[l].w, adam_v.dec2[l].w);
      update(params.dec2[l].b, grads.dec2[l].b, adam_m.dec2[l].b, adam_v.dec2[l].b);
    }
    update(params.head.w, grads.head.w, adam_m.head.w, adam_v.head.w);
    update(params.head.b, grads.head.b, adam_m.head.b, adam_v.head.b);

    curve.push_back(static_cast<float>(loss));
    if (progress) progress(step, loss);
  }

  Checkpoint out = checkpoint_from_params(params);
  adam_m.visit([&](const std::string& name, Tensor& t) {
    out.tensors["adam.m." + name] = t;
  });
  adam_v.visit([&](const std::string& name, Tensor& t) {
    out.tensors["adam.v." + name] = t;
  });
  out.step = start_step + tcfg.steps;
  out.loss_curve = std::move(curve);
  out.dataset_config_hash = data.config_hash;
  out.train_config = train_config_to_json(tcfg);
  return out;
}

// Writes the "step,loss" CSV for a training run.
inline void write_loss_csv(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("train: cannot open " + path);
  f << "step,loss\n";
  for (size_t i = 0; i < ckpt.loss_curve.size(); ++i)
    f << i << "," << ckpt.loss_curve[i] << "\n";
}

}  // namespace docmask
