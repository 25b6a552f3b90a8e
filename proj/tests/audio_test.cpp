// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "lrvc/audio.hpp"
#include "lrvc/compute/init.hpp"

namespace lrvc {
namespace {

AudioSegment tone(double hz, double seconds, int rate, double amplitude = 0.5) {
  AudioSegment s{std::vector<float>(static_cast<std::size_t>(seconds * rate)), rate};
  for (std::size_t i = 0; i < s.samples.size(); ++i)
    s.samples[i] = static_cast<float>(amplitude * std::sin(2 * std::numbers::pi * hz * i / rate));
  return s;
}

/// Frequency of the largest magnitude bin, refined by parabolic interpolation.
double fft_peak_hz(const AudioSegment& s) {
  std::vector<float> x = s.samples;
  std::size_t n = 1;
  while (n < 4 * x.size()) n <<= 1;
  x.resize(n, 0.0f);
  Eigen::FFT<float> fft;
  fft.SetFlag(Eigen::FFT<float>::HalfSpectrum);
  std::vector<std::complex<float>> spec;
  fft.fwd(spec, x);
  std::size_t best = 1;
  for (std::size_t k = 1; k + 1 < spec.size(); ++k)
    if (std::abs(spec[k]) > std::abs(spec[best])) best = k;
  const double a = std::log(std::abs(spec[best - 1]) + 1e-20), b = std::log(std::abs(spec[best]) + 1e-20),
               c = std::log(std::abs(spec[best + 1]) + 1e-20);
  const double shift = 0.5 * (a - c) / (a - 2 * b + c);
  return (static_cast<double>(best) + shift) * s.sample_rate / static_cast<double>(n);
}

double energy(const std::vector<float>& x) {
  double e = 0;
  for (float v : x) e += static_cast<double>(v) * v;
  return e;
}

AudioSegment pulse_train(double f0, double seconds, int rate) {
  AudioSegment s{std::vector<float>(static_cast<std::size_t>(seconds * rate)), rate};
  const double period = rate / f0;
  // Exponentially decaying pulse each period, then a gentle resonance.
  double phase = 0;
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    s.samples[i] = static_cast<float>(std::exp(-phase / (0.1 * period)));
    phase += 1.0;
    if (phase >= period) phase -= period;
  }
  double y1 = 0, y2 = 0;
  const double r = std::exp(-std::numbers::pi * 100.0 / rate), w = 2 * std::numbers::pi * 600.0 / rate;
  for (float& v : s.samples) {
    const double y = v + 2 * r * std::cos(w) * y1 - r * r * y2;
    y2 = y1;
    y1 = y;
    v = static_cast<float>(y);
  }
  normalize_peak(s);
  return s;
}

TEST(Wav, RoundTripWithinQuantizationBound) {
  const AudioSegment s = tone(440, 1.0, 24000, 0.99);
  std::stringstream buf;
  write_wav(buf, s);
  const AudioSegment back = read_wav(buf);
  ASSERT_EQ(back.sample_rate, 24000);
  ASSERT_EQ(back.size(), s.size());
  double worst = 0;
  for (std::size_t i = 0; i < s.size(); ++i) worst = std::max(worst, std::abs(double(back.samples[i]) - s.samples[i]));
  EXPECT_LE(worst, 1.0 / 32768.0);
}

TEST(Wav, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "lrvc_wav_test.wav";
  save_wav(tone(1000, 0.1, 16000), path);
  EXPECT_EQ(load_wav(path).size(), 1600u);
  std::filesystem::remove(path);
}

TEST(Wav, EmptyFileIsFormatError) {
  std::stringstream empty;
  EXPECT_THROW(read_wav(empty), FormatError);
}

TEST(Wav, StereoIsUnsupported) {
  std::stringstream buf;
  write_wav(buf, tone(440, 0.01, 16000));
  std::string bytes = buf.str();
  bytes[22] = 2;  // channel count
  std::stringstream stereo(bytes);
  try {
    read_wav(stereo);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("channel count"), std::string::npos);
  }
}

TEST(Wav, EightBitIsUnsupported) {
  std::stringstream buf;
  write_wav(buf, tone(440, 0.01, 16000));
  std::string bytes = buf.str();
  bytes[34] = 8;  // bits per sample
  std::stringstream narrow(bytes);
  EXPECT_THROW(read_wav(narrow), FormatError);
}

TEST(Wav, MissingFileIsIoError) { EXPECT_THROW(load_wav("/nonexistent/x.wav"), IoError); }

TEST(Decimate, ToneFrequencyPreserved) {
  const AudioSegment out = decimate(tone(1000, 1.0, 48000), 3);
  EXPECT_EQ(out.sample_rate, 16000);
  EXPECT_EQ(out.size(), 16000u);
  EXPECT_NEAR(fft_peak_hz(out), 1000.0, 10.0);
}

TEST(Decimate, AliasingToneAttenuated) {
  const AudioSegment in = tone(20000, 1.0, 48000);
  const AudioSegment out = decimate(in, 3);
  // Per-sample energy: the input is 3x longer than the output.
  const double in_power = energy(in.samples) / in.size();
  const double out_power = energy(out.samples) / out.size();
  EXPECT_LE(10 * std::log10(out_power / in_power), -40.0);
}

TEST(Decimate, DcPreserved) {
  AudioSegment dc{std::vector<float>(4800, 0.5f), 48000};
  for (int factor : {2, 3}) {
    const AudioSegment out = decimate(dc, factor);
    for (float v : out.samples) ASSERT_NEAR(v, 0.5f, 0.005f);
  }
}

TEST(Decimate, UnsupportedFactor) {
  AudioSegment s{std::vector<float>(480, 0.1f), 48000};
  EXPECT_THROW(decimate(s, 5), ArgumentError);
  EXPECT_THROW(decimate(s, 1), ArgumentError);
}

TEST(Decimate, TwoStageMatchesSingleStage) {
  AudioSegment mix = tone(300, 0.5, 48000, 0.3);
  const AudioSegment b = tone(1700, 0.5, 48000, 0.2);
  for (std::size_t i = 0; i < mix.size(); ++i) mix.samples[i] += b.samples[i];
  const AudioSegment staged = decimate(decimate(mix, 2), 3);
  const AudioSegment direct = decimate(mix, 6);
  ASSERT_EQ(staged.size(), direct.size());
  std::vector<float> diff(staged.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = staged.samples[i] - direct.samples[i];
  EXPECT_LT(rms(diff), 1e-3);
}

TEST(Resample, RationalTwoThirds) {
  const AudioSegment out = resample_to(tone(500, 0.5, 24000), 16000);
  EXPECT_EQ(out.sample_rate, 16000);
  EXPECT_EQ(out.size(), 8000u);
  EXPECT_NEAR(fft_peak_hz(out), 500.0, 5.0);
}

TEST(Mel, TwoSecondsGives160By80) {
  const MelFrames mel = mel_spectrogram(tone(220, 2.0, 24000));
  EXPECT_EQ(mel.frames.shape(), (Shape{160, 80}));
  EXPECT_TRUE(mel.frames.all_finite());
}

TEST(Mel, SilenceSitsOnLogFloor) {
  const MelFrames mel = mel_spectrogram(AudioSegment{std::vector<float>(24000, 0.0f), 24000});
  for (float v : mel.frames.values()) ASSERT_EQ(v, static_cast<float>(std::log(1e-10f)));
}

TEST(Mel, ToneLandsInNearestBand) {
  // Independent band-centre oracle: HTK mel points linearly spaced between
  // 80 Hz and 7600 Hz, 82 points, centres at points 1..80.
  auto to_mel = [](double f) { return 2595 * std::log10(1 + f / 700); };
  const double lo = to_mel(80), hi = to_mel(7600);
  int nearest = 0;
  double best = 1e9;
  for (int m = 0; m < 80; ++m) {
    const double centre = 700 * (std::pow(10, (lo + (hi - lo) * (m + 1) / 81.0) / 2595) - 1);
    if (std::abs(centre - 440) < best) {
      best = std::abs(centre - 440);
      nearest = m;
    }
  }
  const MelFrames mel = mel_spectrogram(tone(440, 1.0, 24000));
  const std::size_t mid = mel.size() / 2;
  int argmax = 0;
  for (int m = 1; m < 80; ++m)
    if (mel.frames(mid, static_cast<std::size_t>(m)) > mel.frames(mid, static_cast<std::size_t>(argmax))) argmax = m;
  EXPECT_EQ(argmax, nearest);
}

TEST(Mel, WrongRateRejected) { EXPECT_THROW(mel_spectrogram(tone(440, 1.0, 16000)), ArgumentError); }

TEST(Mel, Deterministic) {
  const AudioSegment s = pulse_train(150, 1.0, 24000);
  EXPECT_EQ(mel_spectrogram(s).frames, mel_spectrogram(s).frames);
}

TEST(GriffinLim, TonePeakRecovered) {
  const MelFrames mel = mel_spectrogram(tone(440, 1.0, 24000));
  const AudioSegment audio = griffin_lim(mel);
  EXPECT_EQ(audio.size(), mel.size() * 300);
  EXPECT_NEAR(fft_peak_hz(audio), 440.0, 0.05 * 440.0);
}

TEST(GriffinLim, SilenceStaysSilent) {
  const MelFrames mel = mel_spectrogram(AudioSegment{std::vector<float>(12000, 0.0f), 24000});
  EXPECT_LT(rms(griffin_lim(mel).samples), 1e-3);
}

TEST(GriffinLim, MelRoundTripIsClose) {
  const AudioSegment src = pulse_train(140, 1.0, 24000);
  MelAnalyzer analyzer;
  const MelFrames mel = analyzer(src);
  const MelFrames again = analyzer(griffin_lim(mel));
  double err = 0;
  for (std::size_t i = 0; i < mel.frames.size(); ++i) err += std::abs(mel.frames[i] - again.frames[i]);
  EXPECT_LT(err / mel.frames.size(), 0.5);
}

TEST(Pitch, GlottalPulseTrain) {
  const auto f0 = estimate_f0(pulse_train(120, 1.0, 16000));
  ASSERT_TRUE(f0.has_value());
  EXPECT_NEAR(*f0, 120.0, 3.0);
}

TEST(Pitch, SawtoothHasNoOctaveError) {
  AudioSegment s{std::vector<float>(24000), 24000};
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double phase = std::fmod(220.0 * i / 24000.0, 1.0);
    s.samples[i] = static_cast<float>(0.8 * (2 * phase - 1));
  }
  const auto f0 = estimate_f0(s);
  ASSERT_TRUE(f0.has_value());
  EXPECT_NEAR(*f0, 220.0, 5.0);
}

TEST(Pitch, WhiteNoiseIsUnvoiced) {
  std::mt19937_64 rng(1);
  AudioSegment s{std::vector<float>(16000), 16000};
  for (float& v : s.samples) v = static_cast<float>(uniform(rng, -0.5, 0.5));
  EXPECT_FALSE(estimate_f0(s).has_value());
}

TEST(Pitch, ScaleInvariant) {
  AudioSegment s = pulse_train(180, 1.0, 48000);
  const auto a = estimate_f0(s);
  for (float& v : s.samples) v *= 0.5f;
  const auto b = estimate_f0(s);
  ASSERT_TRUE(a && b);
  EXPECT_LT(std::abs(*a - *b), 1.0);
}

TEST(Rvf, RoundTripBitIdentical) {
  std::mt19937_64 rng(2);
  Tensor<float> t({100, 256});
  for (auto& v : t.values()) v = static_cast<float>(normal(rng));
  std::stringstream buf;
  write_rvf(buf, t);
  EXPECT_EQ(read_rvf(buf, 256), t);
}

TEST(Rvf, WrongDimsNamed) {
  std::stringstream buf;
  write_rvf(buf, Tensor<float>({4, 768}));
  try {
    read_rvf(buf, 256);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("768"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("256"), std::string::npos);
  }
}

TEST(Rvf, TruncatedPayload) {
  std::stringstream buf;
  write_rvf(buf, Tensor<float>({10, 256}));
  std::string bytes = buf.str();
  bytes.resize(bytes.size() - 7);
  std::stringstream cut(bytes);
  EXPECT_THROW(read_rvf(cut, 256), FormatError);
}

TEST(Rvf, BadMagic) {
  std::stringstream buf("RVF2xxxxxxxxxxxx");
  EXPECT_THROW(read_rvf(buf), FormatError);
}

}  // namespace
}  // namespace lrvc
