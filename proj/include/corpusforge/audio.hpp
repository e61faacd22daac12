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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corpusforge/error.hpp"
#include "corpusforge/util.hpp"

namespace corpusforge {

/// Decoded mono audio. Samples are nominally in [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 0;

  size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

inline double duration_seconds(const AudioBuffer& a) {
  if (a.sample_rate <= 0) return 0.0;
  return static_cast<double>(a.samples.size()) / a.sample_rate;
}

// ---------------------------------------------------------------------------
// WAV (RIFF, PCM 16-bit, mono)

namespace detail {

inline uint16_t read_u16(const char* p) {
  return static_cast<uint16_t>(static_cast<unsigned char>(p[0]) |
                               (static_cast<unsigned char>(p[1]) << 8));
}

inline uint32_t read_u32(const char* p) {
  return static_cast<uint32_t>(static_cast<unsigned char>(p[0])) |
         (static_cast<uint32_t>(static_cast<unsigned char>(p[1])) << 8) |
         (static_cast<uint32_t>(static_cast<unsigned char>(p[2])) << 16) |
         (static_cast<uint32_t>(static_cast<unsigned char>(p[3])) << 24);
}

inline void put_u16(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

inline void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

}  // namespace detail

/// Header facts of a PCM16 mono WAV image, plus where its samples live.
struct WavInfo {
  int sample_rate = 0;
  size_t num_samples = 0;
  size_t data_offset = 0;
};

/// Validates the RIFF structure and format without decoding samples. An
/// empty data chunk is reported as num_samples == 0, not as an error.
inline WavInfo probe_wav_bytes(std::string_view bytes, const std::string& name = "<memory>") {
  if (bytes.size() < 12 || bytes.substr(0, 4) != "RIFF" ||
      bytes.substr(8, 4) != "WAVE") {
    throw Error(ErrorKind::CorruptHeader, name + ": not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  WavInfo info;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string_view id = bytes.substr(pos, 4);
    const uint32_t size = detail::read_u32(bytes.data() + pos + 4);
    const size_t body = pos + 8;
    if (id == "fmt ") {
      if (size < 16 || body + size > bytes.size()) {
        throw Error(ErrorKind::CorruptHeader, name + ": truncated fmt chunk");
      }
      const char* p = bytes.data() + body;
      const uint16_t format = detail::read_u16(p);
      const uint16_t channels = detail::read_u16(p + 2);
      const uint32_t rate = detail::read_u32(p + 4);
      const uint16_t bits = detail::read_u16(p + 14);
      if (format != 1) {
        throw Error(ErrorKind::UnsupportedFormat,
                    name + ": audio format " + std::to_string(format) + " is not PCM");
      }
      if (channels != 1) {
        throw Error(ErrorKind::UnsupportedFormat,
                    name + ": " + std::to_string(channels) +
                        " channels, only mono is supported");
      }
      if (bits != 16) {
        throw Error(ErrorKind::UnsupportedFormat,
                    name + ": " + std::to_string(bits) +
                        " bits per sample, only 16 is supported");
      }
      if (rate == 0 || rate > 0x7FFFFFFF) {
        throw Error(ErrorKind::CorruptHeader, name + ": invalid sample rate");
      }
      info.sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) {
        throw Error(ErrorKind::CorruptHeader, name + ": data chunk before fmt chunk");
      }
      if (body + size > bytes.size()) {
        throw Error(ErrorKind::CorruptHeader, name + ": truncated data chunk");
      }
      info.num_samples = size / 2;
      info.data_offset = body;
      return info;
    }
    // Chunks are word aligned.
    pos = body + size + (size & 1u);
  }
  throw Error(ErrorKind::CorruptHeader,
              name + (have_fmt ? ": missing data chunk" : ": missing fmt chunk"));
}

/// Decodes an in-memory WAV image; int16 values map to [-1, 1) by division
/// by 32768. `name` only labels error messages.
inline AudioBuffer decode_wav_bytes(std::string_view bytes,
                                    const std::string& name = "<memory>") {
  const WavInfo info = probe_wav_bytes(bytes, name);
  if (info.num_samples == 0) {
    throw Error(ErrorKind::EmptyAudio, name + ": zero-length data chunk");
  }
  AudioBuffer out;
  out.sample_rate = info.sample_rate;
  out.samples.resize(info.num_samples);
  const char* p = bytes.data() + info.data_offset;
  for (size_t i = 0; i < info.num_samples; ++i) {
    const auto v = static_cast<int16_t>(detail::read_u16(p + 2 * i));
    out.samples[i] = static_cast<double>(v) / 32768.0;
  }
  return out;
}

inline AudioBuffer decode_wav(const std::filesystem::path& path) {
  return decode_wav_bytes(read_file(path), path.string());
}

/// Maps a sample to int16 by round(x * 32768) with saturation to
/// [-32768, 32767]; the inverse of the decoder's division by 32768.
inline int16_t to_pcm16(double x) {
  if (!std::isfinite(x)) x = 0.0;
  const double scaled = std::round(x * 32768.0);
  return static_cast<int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

inline std::string encode_wav_bytes(const AudioBuffer& a) {
  if (a.sample_rate <= 0) {
    throw Error(ErrorKind::UnsupportedFormat, "sample rate must be positive");
  }
  const auto data_bytes = static_cast<uint32_t>(a.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  detail::put_u32(out, 36 + data_bytes);
  out += "WAVE";
  out += "fmt ";
  detail::put_u32(out, 16);
  detail::put_u16(out, 1);  // PCM
  detail::put_u16(out, 1);  // mono
  detail::put_u32(out, static_cast<uint32_t>(a.sample_rate));
  detail::put_u32(out, static_cast<uint32_t>(a.sample_rate) * 2);
  detail::put_u16(out, 2);
  detail::put_u16(out, 16);
  out += "data";
  detail::put_u32(out, data_bytes);
  for (double x : a.samples) {
    detail::put_u16(out, static_cast<uint16_t>(to_pcm16(x)));
  }
  return out;
}

inline void encode_wav(const AudioBuffer& a, const std::filesystem::path& path) {
  write_file(path, encode_wav_bytes(a));
}

// ---------------------------------------------------------------------------
// Silence trimming

struct TrimSpec {
  double threshold_db = 50.0;
  double pad_s = 0.2;
  size_t frame_len = 2048;
  size_t hop_len = 512;
};

inline void validate(const TrimSpec& spec) {
  if (!(spec.threshold_db > 0.0)) {
    throw Error(ErrorKind::ConfigInvalid, "trim.threshold_db must be positive");
  }
  if (!(spec.pad_s >= 0.0)) {
    throw Error(ErrorKind::ConfigInvalid, "trim.pad_s must be >= 0");
  }
  if (spec.frame_len < 1) {
    throw Error(ErrorKind::ConfigInvalid, "trim.frame_len must be >= 1");
  }
  if (spec.hop_len < 1 || spec.hop_len > spec.frame_len) {
    throw Error(ErrorKind::ConfigInvalid, "trim.hop_len must be in [1, frame_len]");
  }
}

struct TrimResult {
  AudioBuffer audio;
  /// Content bounds in the original signal, end exclusive.
  size_t start_sample = 0;
  size_t end_sample = 0;
};

/// Per-frame RMS. Frame k covers samples [(k+1)*hop - frame_len, (k+1)*hop),
/// so every frame ends on a hop boundary; samples outside the signal count as
/// zero. Frames continue while they overlap the signal, so the last one
/// starts within the final hop.
inline std::vector<double> frame_rms(std::span<const double> x, size_t frame_len,
                                     size_t hop_len) {
  const size_t n = x.size();
  if (n == 0) return {};
  const size_t frames = (n + frame_len - 1) / hop_len;
  std::vector<double> rms(frames);
  for (size_t k = 0; k < frames; ++k) {
    const size_t stop = std::min(n, (k + 1) * hop_len);
    const size_t begin = (k + 1) * hop_len > frame_len ? (k + 1) * hop_len - frame_len : 0;
    double acc = 0.0;
    for (size_t i = begin; i < stop; ++i) acc += x[i] * x[i];
    rms[k] = std::sqrt(acc / static_cast<double>(frame_len));
  }
  return rms;
}

/// Locates the non-silent region and pads it with silence on both sides.
///
/// A frame is non-silent when its RMS is within threshold_db of the loudest
/// frame. The first non-silent frame k follows silent frames, so the onset
/// lies in its last hop, [k*hop, (k+1)*hop). The last non-silent frame j is
/// followed by a silent frame starting at (j+2)*hop - frame_len, so the
/// offset lies in the hop before that sample. Both bounds are within one hop.
inline TrimResult trim_silence(const AudioBuffer& a, const TrimSpec& spec = {}) {
  validate(spec);
  if (a.empty()) {
    throw Error(ErrorKind::EmptyAudio, "cannot trim an empty buffer");
  }
  const size_t n = a.samples.size();
  const auto rms = frame_rms(a.samples, spec.frame_len, spec.hop_len);
  const double reference = *std::max_element(rms.begin(), rms.end());
  if (!(reference > 0.0)) {
    throw Error(ErrorKind::FullySilent, "no frame above the silence threshold");
  }
  // 20*log10(r/ref) > -threshold  <=>  r > ref * 10^(-threshold/20)
  const double floor = reference * std::pow(10.0, -spec.threshold_db / 20.0);
  size_t first = rms.size();
  size_t last = 0;
  for (size_t k = 0; k < rms.size(); ++k) {
    if (rms[k] > floor) {
      first = std::min(first, k);
      last = k;
    }
  }
  if (first == rms.size()) {
    throw Error(ErrorKind::FullySilent, "no frame above the silence threshold");
  }
  const size_t hop = spec.hop_len;
  size_t start = std::min(n, first * hop);
  size_t end = n;
  if (last + 1 < rms.size()) {
    const size_t next_begin =
        (last + 2) * hop > spec.frame_len ? (last + 2) * hop - spec.frame_len : 0;
    end = std::min(n, next_begin);
  }
  if (start >= end) {
    // Content narrower than the frame geometry can resolve; keep the span of
    // the non-silent frames.
    start = (first + 1) * hop > spec.frame_len ? (first + 1) * hop - spec.frame_len : 0;
    end = std::min(n, (last + 1) * hop);
  }

  TrimResult result;
  result.start_sample = start;
  result.end_sample = end;
  const auto pad = static_cast<size_t>(std::llround(spec.pad_s * a.sample_rate));
  result.audio.sample_rate = a.sample_rate;
  result.audio.samples.assign(pad + (end - start) + pad, 0.0);
  std::copy(a.samples.begin() + static_cast<std::ptrdiff_t>(start),
            a.samples.begin() + static_cast<std::ptrdiff_t>(end),
            result.audio.samples.begin() + static_cast<std::ptrdiff_t>(pad));
  return result;
}

// ---------------------------------------------------------------------------
// Volume normalization

inline constexpr double kDefaultTargetPeak = 0.995;

inline double peak_amplitude(std::span<const double> x) {
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  return peak;
}

/// Peak normalization: scales the buffer so max|x| equals target_peak.
inline AudioBuffer normalize_volume(const AudioBuffer& a,
                                    double target_peak = kDefaultTargetPeak) {
  if (!(target_peak > 0.0 && target_peak <= 1.0)) {
    throw Error(ErrorKind::ConfigInvalid, "target_peak must be in (0, 1]");
  }
  const double peak = peak_amplitude(a.samples);
  if (!(peak > 0.0)) {
    throw Error(ErrorKind::AllZero, "cannot normalize a silent buffer");
  }
  AudioBuffer out{a.samples, a.sample_rate};
  const double gain = target_peak / peak;
  for (double& v : out.samples) v *= gain;
  return out;
}

}  // namespace corpusforge
