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

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "docmask/checkpoint.hpp"
#include "docmask/infer.hpp"
#include "docmask/train.hpp"
#include "docmask/unet.hpp"

using namespace docmask;

namespace {

UNetConfig mini_config() {
  UNetConfig cfg;
  cfg.encoder_channels = {2, 4, 8, 16};
  return cfg;
}

Tensor random_input(int64_t b, int64_t h, int64_t w, uint64_t seed) {
  Tensor x({b, 1, h, w});
  Rng rng(seed);
  for (auto& v : x.data) v = static_cast<float>(rng.uniform());
  return x;
}

}  // namespace

TEST_CASE("dice_loss worked examples") {
  Tensor ones({1, 1, 10, 10}, 1.f), zeros({1, 1, 10, 10}, 0.f);
  CHECK(dice_loss(ones, ones, 1.0) == Catch::Approx(0.0).margin(1e-12));
  CHECK(dice_loss(zeros, zeros, 1.0) == Catch::Approx(0.0).margin(1e-12));
  CHECK(dice_loss(ones, zeros, 1.0) ==
        Catch::Approx(1.0 - 1.0 / 101.0).epsilon(1e-9));

  Tensor other({1, 1, 5, 5}, 1.f);
  CHECK_THROWS_AS(dice_loss(ones, other, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(dice_loss(ones, ones, 0.0), std::invalid_argument);
}

TEST_CASE("dice_loss stays in [0,1) and is 0 only on exact binary matches") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor p({1, 1, 6, 6}), g({1, 1, 6, 6});
    for (auto& v : p.data) v = static_cast<float>(rng.uniform());
    for (auto& v : g.data) v = rng.bernoulli(0.5) ? 1.f : 0.f;
    const double l = dice_loss(p, g, 1.0);
    CHECK(l >= 0.0);
    CHECK(l < 1.0);
  }
  Tensor b({1, 1, 4, 4});
  Rng rng2(4);
  for (auto& v : b.data) v = rng2.bernoulli(0.5) ? 1.f : 0.f;
  CHECK(dice_loss(b, b, 1.0) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("unet config validation") {
  UNetConfig bad = mini_config();
  bad.encoder_channels = {4, 4, 8, 16};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = mini_config();
  bad.levels = 3;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK(mini_config().stride_alignment() == 8);
}

TEST_CASE("forward pass: shape, range, determinism") {
  UNetParams params;
  params.alloc(mini_config());
  params.init_weights(77);
  const Tensor x = random_input(1, 16, 24, 5);
  const Tensor y1 = unet_forward(params, x);
  REQUIRE(y1.shape == std::vector<int64_t>{1, 1, 16, 24});
  for (float v : y1.data) {
    CHECK(v > 0.f);
    CHECK(v < 1.f);
  }
  const Tensor y2 = unet_forward(params, x);
  CHECK(y1.data == y2.data);  // bit-identical

  CHECK_THROWS(unet_forward(params, random_input(1, 20, 20, 5)));  // not /8
}

TEST_CASE("forward-pass spatial shape invariance over random sizes") {
  UNetParams params;
  params.alloc(mini_config());
  params.init_weights(8);
  Rng rng(41);
  for (int trial = 0; trial < 4; ++trial) {
    const int64_t h = 8 * (1 + static_cast<int64_t>(rng.below(5)));
    const int64_t w = 8 * (1 + static_cast<int64_t>(rng.below(5)));
    const Tensor y = unet_forward(params, random_input(1, h, w, trial));
    CHECK(y.shape == std::vector<int64_t>{1, 1, h, w});
  }
}

TEST_CASE("all-zero weights give a uniform 0.5 output") {
  UNetParams params;
  params.alloc(mini_config());  // zero-initialized
  const Tensor y = unet_forward(params, random_input(2, 8, 8, 9));
  for (float v : y.data) CHECK(v == 0.5f);
}

TEST_CASE("analytic gradients match finite differences on a mini net") {
  // Double precision end to end keeps the FD reference clean; the full
  // 32-bit sweep runs in the acceptance suite.
  UNetConfig cfg = mini_config();
  UNetParamsT<double> p;
  p.alloc(cfg);
  p.init_weights(3);
  Rng brng(12);
  p.visit([&](const std::string& name, TensorT<double>& t) {
    if (name.back() == 'b')
      for (auto& v : t.data) v = brng.range_real(-0.05, 0.05);
  });
  UNetWorkT<double> work;
  work.resize(cfg, 8, 8);
  Rng rng(21);
  std::vector<double> x(64), gt(64);
  for (auto& v : x) v = rng.uniform();
  for (auto& v : gt) v = rng.bernoulli(0.4) ? 1.0 : 0.0;

  UNetParamsT<double> grads;
  grads.alloc(cfg);
  grads.zero();
  unet_forward_item(p, work, x.data());
  nn::dice_backward_span(work.prob.data.data(), gt.data(), 64, 1.0, 1.0,
                         work.g_prob.data.data());
  unet_backward_item(p, work, grads);

  auto loss_at = [&]() {
    unet_forward_item(p, work, x.data());
    return nn::dice_loss_span(work.prob.data.data(), gt.data(), 64, 1.0);
  };
  std::vector<TensorT<double>*> pv, gv;
  p.visit([&](const std::string&, TensorT<double>& t) { pv.push_back(&t); });
  grads.visit([&](const std::string&, TensorT<double>& t) { gv.push_back(&t); });
  int checked = 0;
  for (size_t ti = 0; ti < pv.size(); ++ti) {
    auto& t = *pv[ti];
    for (size_t i = 0; i < t.data.size(); i += 11) {  // sampled sweep
      const double save = t.data[i];
      const double h = std::max(1e-6, 1e-5 * std::abs(save));
      t.data[i] = save + h;
      const double lp = loss_at();
      t.data[i] = save - h;
      const double lm = loss_at();
      t.data[i] = save;
      const double fd = (lp - lm) / (2 * h);
      const double an = gv[ti]->data[i];
      const double rel =
          std::abs(fd - an) / std::max({1e-6, std::abs(fd), std::abs(an)});
      REQUIRE(rel < 1e-3);
      ++checked;
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("checkpoint round-trip is bit exact, failures are distinct") {
  const auto dir = std::filesystem::temp_directory_path() / "docmask_ckpt_test";
  std::filesystem::create_directories(dir);
  UNetParams params;
  params.alloc(mini_config());
  params.init_weights(123);
  Checkpoint c = checkpoint_from_params(params);
  c.step = 42;
  c.loss_curve = {0.9f, 0.5f, 0.31f};
  c.dataset_config_hash = "deadbeef";
  const std::string path = (dir / "a.ckpt").string();
  save_checkpoint(c, path);
  const Checkpoint r = load_checkpoint(path);
  CHECK(r.step == 42);
  CHECK(r.loss_curve == c.loss_curve);
  CHECK(r.dataset_config_hash == "deadbeef");
  REQUIRE(r.tensors.size() == c.tensors.size());
  for (const auto& [name, t] : c.tensors) {
    REQUIRE(r.tensors.count(name));
    CHECK(r.tensors.at(name).shape == t.shape);
    CHECK(r.tensors.at(name).data == t.data);  // bit-identical floats
  }

  SECTION("bad magic") {
    const std::string bad = (dir / "bad_magic.ckpt").string();
    std::ofstream f(bad, std::ios::binary);
    f << "NOPE then some bytes";
    f.close();
    CHECK_THROWS_WITH(load_checkpoint(bad),
                      Catch::Matchers::ContainsSubstring("bad magic"));
  }
  SECTION("truncation") {
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    const std::string trunc = (dir / "trunc.ckpt").string();
    std::ofstream f(trunc, std::ios::binary);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 64));
    f.close();
    CHECK_THROWS_WITH(load_checkpoint(trunc),
                      Catch::Matchers::ContainsSubstring("truncated"));
  }
  SECTION("config/tensor shape mismatch names the tensor") {
    Checkpoint wrong = c;
    UNetConfig bigger = mini_config();
    bigger.encoder_channels = {4, 8, 16, 32};  // file stores 2-channel tensors
    wrong.config = bigger;
    const std::string wpath = (dir / "wrong.ckpt").string();
    save_checkpoint(wrong, wpath);
    CHECK_THROWS_WITH(load_checkpoint(wpath),
                      Catch::Matchers::ContainsSubstring("expected shape") &&
                          Catch::Matchers::ContainsSubstring("found"));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("predict_page degenerate tiling equals a single padded pass") {
  UNetParams params;
  params.alloc(mini_config());
  params.init_weights(55);
  Rng rng(17);
  Raster page(30, 22);
  for (auto& v : page.data) v = static_cast<uint8_t>(rng.below(256));

  const int tile = 32;
  const ProbMap tiled = predict_page(params, page, tile, 8);

  // direct route: pad to the tile with white, one forward pass, crop
  Tensor x({1, 1, tile, tile}, 1.f);
  for (int y = 0; y < page.height; ++y)
    for (int x0 = 0; x0 < page.width; ++x0)
      x.data[y * tile + x0] = page.at(x0, y) / 255.f;
  const Tensor y = unet_forward(params, x);
  for (int yy = 0; yy < page.height; ++yy)
    for (int xx = 0; xx < page.width; ++xx)
      CHECK(std::abs(tiled.at(xx, yy) - y.data[yy * tile + xx]) < 1e-6f);
}

TEST_CASE("predict_page with zero overlap partitions the page") {
  UNetParams params;
  params.alloc(mini_config());
  params.init_weights(56);
  Rng rng(18);
  Raster page(40, 24);
  for (auto& v : page.data) v = static_cast<uint8_t>(rng.below(256));
  const ProbMap out = predict_page(params, page, 16, 0);
  CHECK(out.width == 40);
  CHECK(out.height == 24);
  for (float v : out.data) {
    CHECK(v > 0.f);
    CHECK(v < 1.f);
  }
  CHECK_THROWS_AS(predict_page(params, page, 16, 16), std::invalid_argument);
  CHECK_THROWS_AS(predict_page(params, page, 12, 0), std::invalid_argument);
}

TEST_CASE("training halves the loss on a tiny overfit and is deterministic") {
  TrainSet data;
  Rng rng(90);
  TrainSample s;
  s.image = Raster(32, 32, 255);
  s.gt = BinaryMap(32, 32);
  for (int y = 8; y < 24; ++y)
    for (int x = 8; x < 24; ++x) {
      s.image.at(x, y) = 30;
      s.gt.at(x, y) = 1;
    }
  data.samples.push_back(s);

  TrainConfig tcfg;
  tcfg.learning_rate = 1e-3;
  tcfg.batch_size = 1;
  tcfg.steps = 40;
  tcfg.crop_size = 32;
  tcfg.seed = 1;
  UNetConfig ucfg;
  ucfg.encoder_channels = {8, 16, 32, 64};  // the 2-channel net is too weak
  const Checkpoint a = train(tcfg, ucfg, data);
  const Checkpoint b = train(tcfg, ucfg, data);
  REQUIRE(a.loss_curve.size() == 40);
  CHECK(a.loss_curve == b.loss_curve);  // identical curves, same seed
  CHECK(a.loss_curve.back() < 0.5f * a.loss_curve.front());
  CHECK(a.has_optimizer_state());

  SECTION("resume continues the curve deterministically") {
    TrainConfig half = tcfg;
    half.steps = 20;
    const Checkpoint first = train(half, ucfg, data);
    const Checkpoint second = train(half, ucfg, data, &first);
    REQUIRE(second.loss_curve.size() == 40);
    for (int i = 0; i < 40; ++i)
      CHECK(second.loss_curve[i] == Catch::Approx(a.loss_curve[i]).margin(1e-6));
  }
}

TEST_CASE("training defaults follow the published recipe") {
  TrainConfig t;
  CHECK(t.learning_rate == 1e-5);
  CHECK(t.beta1 == 0.9);
  CHECK(t.beta2 == 0.999);
  CHECK(t.adam_eps == 1e-8);
  CHECK(t.dice_eps == 1.0);
  UNetConfig u;
  CHECK(u.encoder_channels == std::vector<int>{32, 64, 128, 256});
  CHECK(u.levels == 4);
}

TEST_CASE("train rejects bad configs and tiny datasets") {
  TrainSet data;  // empty
  TrainConfig t;
  t.steps = 1;
  CHECK_THROWS(train(t, mini_config(), data));
  t.crop_size = 12;  // not a multiple of 8
  CHECK_THROWS_AS(t.validate(mini_config()), std::invalid_argument);
}
