// docmask/checkpoint.hpp -- binary weight container: "MDCK" magic, u32
// version, JSON header (config + tensor table), raw little-endian f32
// payloads. Round-trips are bit-exact.
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

#include <cstdint>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "docmask/tensor.hpp"
#include "docmask/unet.hpp"

namespace docmask {

inline constexpr uint32_t kCheckpointVersion = 1;

inline nlohmann::json unet_config_to_json(const UNetConfig& c) {
  return nlohmann::json{{"levels", c.levels},
                        {"encoder_channels", c.encoder_channels},
                        {"convs_per_level", c.convs_per_level},
                        {"kernel", c.kernel},
                        {"input_channels", c.input_channels},
                        {"output_channels", c.output_channels}};
}

inline UNetConfig unet_config_from_json(const nlohmann::json& j) {
  UNetConfig c;
  c.levels = j.at("levels").get<int>();
  c.encoder_channels = j.at("encoder_channels").get<std::vector<int>>();
  c.convs_per_level = j.value("convs_per_level", 2);
  c.kernel = j.value("kernel", 3);
  c.input_channels = j.value("input_channels", 1);
  c.output_channels = j.value("output_channels", 1);
  c.validate();
  return c;
}

struct Checkpoint {
  UNetConfig config;
  std::map<std::string, Tensor> tensors;  // params plus adam.{m,v}.<param>
  int64_t step = 0;
  std::vector<float> loss_curve;
  std::string dataset_config_hash;
  nlohmann::json train_config;  // echo of the producing run, may be null

  bool has_optimizer_state() const {
    for (const auto& [name, t] : tensors)
      if (name.rfind("adam.", 0) == 0) return true;
    return false;
  }

  // Extracts model weights, enforcing exactly the shapes the config implies.
  UNetParams to_params() const {
    UNetParams p;
    p.alloc(config);
    p.visit([&](const std::string& name, Tensor& t) {
      auto it = tensors.find(name);
      if (it == tensors.end())
        throw std::runtime_error("checkpoint: missing tensor " + name);
      if (it->second.shape != t.shape)
        throw std::runtime_error("checkpoint: tensor " + name +
                                 ": expected shape " + shape_str(t.shape) +
                                 ", found " + shape_str(it->second.shape));
      t = it->second;
    });
    return p;
  }
};

inline Checkpoint checkpoint_from_params(UNetParams& params) {
  Checkpoint c;
  c.config = params.cfg;
  params.visit([&](const std::string& name, Tensor& t) {
    c.tensors[name] = t;
  });
  return c;
}

namespace detail {

template <typename T>
void write_pod(std::ostream& f, T v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& f, const std::string& what) {
  T v;
  f.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!f) throw std::runtime_error("checkpoint: truncated file reading " + what);
  return v;
}

}  // namespace detail

inline void save_checkpoint(const Checkpoint& c, const std::string& path) {
  nlohmann::json table = nlohmann::json::array();
  uint64_t offset = 0;
  for (const auto& [name, t] : c.tensors) {
    table.push_back({{"name", name}, {"shape", t.shape}, {"offset", offset}});
    offset += t.data.size() * sizeof(float);
  }
  nlohmann::json header{{"config", unet_config_to_json(c.config)},
                        {"step", c.step},
                        {"loss_curve", c.loss_curve},
                        {"dataset_config_hash", c.dataset_config_hash},
                        {"train_config", c.train_config},
                        {"tensors", table}};
  const std::string hs = header.dump();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("checkpoint: cannot open " + path);
  f.write("MDCK", 4);
  detail::write_pod<uint32_t>(f, kCheckpointVersion);
  detail::write_pod<uint64_t>(f, hs.size());
  f.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  for (const auto& [name, t] : c.tensors)
    f.write(reinterpret_cast<const char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * sizeof(float)));
  if (!f) throw std::runtime_error("checkpoint: short write to " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[4] = {};
  f.read(magic, 4);
  if (!f || std::string(magic, 4) != "MDCK")
    throw std::runtime_error("checkpoint: bad magic in " + path +
                             " (not a checkpoint file)");
  const auto version = detail::read_pod<uint32_t>(f, "version");
  if (version != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version " +
                             std::to_string(version) + " in " + path);
  const auto header_len = detail::read_pod<uint64_t>(f, "header length");
  std::string hs(header_len, '\0');
  f.read(hs.data(), static_cast<std::streamsize>(header_len));
  if (!f) throw std::runtime_error("checkpoint: truncated header in " + path);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(hs);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("checkpoint: corrupt header in " + path + ": " +
                             e.what());
  }
  Checkpoint c;
  c.config = unet_config_from_json(header.at("config"));
  c.step = header.value("step", int64_t{0});
  c.loss_curve = header.value("loss_curve", std::vector<float>{});
  c.dataset_config_hash = header.value("dataset_config_hash", std::string{});
  c.train_config = header.value("train_config", nlohmann::json{});
  for (const auto& entry : header.at("tensors")) {
    Tensor t(entry.at("shape").get<std::vector<int64_t>>());
    f.seekg(static_cast<std::streamoff>(4 + 4 + 8 + header_len +
                                        entry.at("offset").get<uint64_t>()));
    f.read(reinterpret_cast<char*>(t.data.data()),
           static_cast<std::streamsize>(t.data.size() * sizeof(float)));
    if (!f)
      throw std::runtime_error("checkpoint: truncated payload for tensor " +
                               entry.at("name").get<std::string>() + " in " +
                               path);
    c.tensors[entry.at("name").get<std::string>()] = std::move(t);
  }

  // Validate: every model tensor present with the config-implied shape, and
  // nothing unexpected beyond optimizer moments.
  UNetParams expected;
  expected.alloc(c.config);
  std::map<std::string, std::vector<int64_t>> want;
  expected.visit([&](const std::string& name, Tensor& t) {
    want[name] = t.shape;
  });
  for (const auto& [name, t] : c.tensors) {
    std::string base = name;
    if (name.rfind("adam.m.", 0) == 0 || name.rfind("adam.v.", 0) == 0)
      base = name.substr(7);
    auto it = want.find(base);
    if (it == want.end())
      throw std::runtime_error("checkpoint: unexpected tensor " + name);
    if (t.shape != it->second)
      throw std::runtime_error("checkpoint: tensor " + name +
                               ": expected shape " + shape_str(it->second) +
                               ", found " + shape_str(t.shape));
  }
  for (const auto& [name, shape] : want)
    if (!c.tensors.count(name))
      throw std::runtime_error("checkpoint: missing tensor " + name);
  return c;
}

}  // namespace docmask
