// docmask/textgen.hpp -- deterministic text sampler: words, numbers,
// domains, dates, phone numbers and URLs from a bundled inventory.
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

#include <string>
#include <vector>

#include "docmask/rng.hpp"
#include "docmask/wordlist.hpp"

namespace docmask {

enum class TokenKind { Word, Number, Domain, Date, Phone, Url };

class TextSampler {
 public:
  std::string sample_token(Rng& rng, TokenKind kind) const {
    switch (kind) {
      case TokenKind::Word: return word(rng);
      case TokenKind::Number: return number(rng);
      case TokenKind::Domain: return domain(rng);
      case TokenKind::Date: return date(rng);
      case TokenKind::Phone: return phone(rng);
      case TokenKind::Url: return url(rng);
    }
    return {};
  }

  TokenKind sample_kind(Rng& rng) const {
    // word 55%, number 15%, date 10%, domain 8%, phone 7%, url 5%
    static const std::vector<double> w{0.55, 0.15, 0.08, 0.10, 0.07, 0.05};
    return static_cast<TokenKind>(rng.pick_weighted(w));
  }

  std::string sample_token(Rng& rng) const {
    return sample_token(rng, sample_kind(rng));
  }

  // Space-separated token run.
  std::string sample_text(Rng& rng, int tokens) const {
    std::string out;
    for (int i = 0; i < tokens; ++i) {
      if (i) out += ' ';
      out += sample_token(rng);
    }
    return out;
  }

 private:
  std::string word(Rng& rng) const {
    std::string w = textdata::kWords[rng.below(textdata::kWordCount)];
    const double style = rng.uniform();
    if (style < 0.30 && !w.empty()) {
      w[0] = static_cast<char>(std::toupper(w[0]));
    } else if (style < 0.42) {
      for (auto& c : w) c = static_cast<char>(std::toupper(c));
    }
    return w;
  }

  std::string digits(Rng& rng, int n) const {
    std::string s;
    for (int i = 0; i < n; ++i) s += static_cast<char>('0' + rng.below(10));
    return s;
  }

  std::string number(Rng& rng) const {
    switch (rng.below(5)) {
      case 0: return digits(rng, 1 + static_cast<int>(rng.below(6)));
      case 1: return digits(rng, 1 + static_cast<int>(rng.below(4))) + "." +
                     digits(rng, 2);
      case 2: return digits(rng, 1 + static_cast<int>(rng.below(3))) + "," +
                     digits(rng, 3);
      case 3: return "$" + digits(rng, 1 + static_cast<int>(rng.below(3))) +
                     "." + digits(rng, 2);
      default: return digits(rng, 1 + static_cast<int>(rng.below(2))) + "%";
    }
  }

  std::string bare_word(Rng& rng) const {
    return textdata::kWords[rng.below(textdata::kWordCount)];
  }

  std::string domain(Rng& rng) const {
    static const char* tlds[] = {".com", ".org", ".net", ".io", ".co", ".info"};
    std::string d = bare_word(rng);
    if (rng.bernoulli(0.3)) d += bare_word(rng);
    d += tlds[rng.below(6)];
    if (rng.bernoulli(0.35)) d = "www." + d;
    return d;
  }

  std::string date(Rng& rng) const {
    static const char* months[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                   "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    const int y = 1990 + static_cast<int>(rng.below(40));
    const int m = 1 + static_cast<int>(rng.below(12));
    const int d = 1 + static_cast<int>(rng.below(28));
    char buf[32];
    switch (rng.below(4)) {
      case 0:
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
        return buf;
      case 1:
        std::snprintf(buf, sizeof buf, "%02d/%02d/%04d", d, m, y);
        return buf;
      case 2:
        std::snprintf(buf, sizeof buf, "%s %d, %04d", months[m - 1], d, y);
        return buf;
      default:
        std::snprintf(buf, sizeof buf, "%d %s %04d", d, months[m - 1], y);
        return buf;
    }
  }

  std::string phone(Rng& rng) const {
    switch (rng.below(3)) {
      case 0: return "+" + digits(rng, 1 + static_cast<int>(rng.below(2))) + "-" +
                     digits(rng, 3) + "-" + digits(rng, 4);
      case 1: return "(" + digits(rng, 3) + ") " + digits(rng, 3) + "-" +
                     digits(rng, 4);
      default: return digits(rng, 3) + "-" + digits(rng, 4);
    }
  }

  std::string url(Rng& rng) const {
    std::string u = rng.bernoulli(0.7) ? "https://" : "http://";
    u += domain(rng);
    if (rng.bernoulli(0.6)) u += "/" + bare_word(rng);
    if (rng.bernoulli(0.3)) u += "?" + std::string(1, 'a' + static_cast<char>(rng.below(26))) + "=" + digits(rng, 2);
    return u;
  }
};

}  // namespace docmask
