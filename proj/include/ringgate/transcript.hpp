#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ringgate/audio.hpp"

namespace ringgate::stt {

struct TranscriptDoc {
  std::string doc_id;
  std::vector<std::string> tokens;  // normalized
  enum class Source { ScreenedCall, CorpusFile } source = Source::ScreenedCall;
};

// Substitution-only error model standing in for an imperfect transcriber:
// each caller token independently becomes "<unk>" with probability
// word_error_rate. Token count and timing are preserved. Deterministic
// given the seed.
struct AsrNoise {
  double word_error_rate = 0.0;
  uint64_t seed = 0;
};

inline constexpr const char* kUnknownToken = "<unk>";

struct PromptRecord {
  double time_s = 0.0;
  std::string text;
};

// Interleaves caller tokens (from frame annotations) with the prompts the
// assistant played, in time order, one line per speaker turn. Assistant
// lines are prefixed "VA: ", caller lines "CALLER: ".
std::string transcribe(std::span<const audio::AudioFrame> frames,
                       std::span<const PromptRecord> prompts,
                       const AsrNoise& noise);

// The caller-only token sequence after noise, in stream order.
std::vector<std::string> caller_tokens(std::span<const audio::AudioFrame> frames,
                                       const AsrNoise& noise);

}  // namespace ringgate::stt
