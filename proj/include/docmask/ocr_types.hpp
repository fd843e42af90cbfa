// docmask/ocr_types.hpp -- recognized-word carrier shared by the OCR
// adapters, the mask pipeline and the evaluation kit.
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

#include <stdexcept>
#include <string>

#include "docmask/raster.hpp"

namespace docmask {

struct OcrWord {
  std::string text;
  Box box;
  double confidence = 0.0;  // in [0,1]

  OcrWord() = default;
  OcrWord(std::string t, Box b, double conf)
      : text(std::move(t)), box(b), confidence(conf) {
    if (text.empty()) throw std::invalid_argument("OcrWord: empty text");
    if (confidence < 0.0 || confidence > 1.0)
      throw std::invalid_argument("OcrWord: confidence out of [0,1]");
  }
};

}  // namespace docmask
