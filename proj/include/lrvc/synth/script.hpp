// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lrvc/compute/init.hpp"
#include "lrvc/core/errors.hpp"

namespace lrvc::synth {

/// Pseudo-phoneme: a formant target triple held for `duration_ms`.
/// Silence tokens switch the voice source off.
struct Token {
  std::string symbol;
  double f1 = 0, f2 = 0, f3 = 0;
  double duration_ms = 0;

  bool silent() const noexcept { return symbol == "sil"; }
  friend bool operator==(const Token&, const Token&) = default;
};

struct UtteranceScript {
  std::vector<Token> tokens;

  double duration_seconds() const {
    double ms = 0;
    for (const auto& t : tokens) ms += t.duration_ms;
    return ms / 1000.0;
  }
  std::size_t silence_count() const {
    std::size_t n = 0;
    for (const auto& t : tokens) n += t.silent();
    return n;
  }
  /// Compact text form, e.g. "a:180 sil:90 i:140".
  std::string to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < tokens.size(); ++i)
      os << (i ? " " : "") << tokens[i].symbol << ':' << static_cast<int>(tokens[i].duration_ms);
    return os.str();
  }
  friend bool operator==(const UtteranceScript&, const UtteranceScript&) = default;
};

struct Vowel {
  const char* symbol;
  double f1, f2, f3;
};

/// Reference formant targets (Hz) before the speaker's formant shift.
inline constexpr std::array<Vowel, 10> kVowels{{
    {"i", 270, 2290, 3010},
    {"I", 390, 1990, 2550},
    {"e", 530, 1840, 2480},
    {"ae", 660, 1720, 2410},
    {"a", 730, 1090, 2440},
    {"o", 570, 840, 2410},
    {"U", 440, 1020, 2240},
    {"u", 300, 870, 2240},
    {"A", 520, 1190, 2390},
    {"r", 490, 1350, 1690},
}};

inline constexpr double kMinUtteranceSeconds = 2.5;

/// Random script of at least 8 tokens lasting between `min_seconds` and
/// `max_seconds`. Starts and ends voiced; silences never repeat back to back.
inline UtteranceScript generate_script(std::uint64_t seed, double min_seconds = kMinUtteranceSeconds,
                                       double max_seconds = 4.0) {
  if (min_seconds < kMinUtteranceSeconds || max_seconds < min_seconds)
    throw ArgumentError("generate_script: need 2.5 <= min_seconds <= max_seconds");
  std::mt19937_64 rng(mix_seed(seed, 0x5c));
  const double target = uniform(rng, min_seconds, max_seconds);
  UtteranceScript script;
  double total_ms = 0;
  auto vowel = [&] {
    const auto& v = kVowels[static_cast<std::size_t>(rng() % kVowels.size())];
    return Token{v.symbol, v.f1, v.f2, v.f3, uniform(rng, 100.0, 260.0)};
  };
  while (total_ms < target * 1000.0 || script.tokens.size() < 8) {
    const bool can_pause = !script.tokens.empty() && !script.tokens.back().silent();
    Token t = (can_pause && uniform01(rng) < 0.2) ? Token{"sil", 0, 0, 0, uniform(rng, 80.0, 150.0)} : vowel();
    total_ms += t.duration_ms;
    script.tokens.push_back(t);
  }
  if (script.tokens.back().silent()) {
    Token t = vowel();
    script.tokens.push_back(t);
  }
  for (auto& t : script.tokens) t.duration_ms = std::round(t.duration_ms);
  return script;
}

}  // namespace lrvc::synth
