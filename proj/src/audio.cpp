#include "ringgate/audio.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ringgate/text.hpp"

namespace ringgate::audio {

int64_t offset_to_frame(double seconds, int frame_ms) {
  return std::llround(seconds * 1000.0) / frame_ms;
}

int64_t span_frames(size_t word_count, double rate_wps, int frame_ms) {
  if (word_count == 0) return 0;
  double frames = static_cast<double>(word_count) / rate_wps * 1000.0 /
                  static_cast<double>(frame_ms);
  // Guard against ties landing just above an integer (1/2.5 etc.).
  return std::max<int64_t>(1, static_cast<int64_t>(std::ceil(frames - 1e-9)));
}

namespace {

struct RenderedSpan {
  size_t script_index;
  int64_t first_frame;
  int64_t frames;          // voiced frames
  int64_t occupied_frames; // voiced + trailing pause
  std::vector<std::string> words;
};

}  // namespace

std::vector<AudioFrame> render_utterances(std::span<const Utterance> script,
                                          double total_duration_s, int frame_ms) {
  if (frame_ms <= 0) throw std::invalid_argument("frame_ms must be positive");
  if (total_duration_s < 0) throw std::invalid_argument("negative stream duration");

  const int64_t total_frames =
      static_cast<int64_t>(std::ceil(total_duration_s * 1000.0 / frame_ms - 1e-9));

  std::vector<RenderedSpan> spans;
  spans.reserve(script.size());
  for (size_t i = 0; i < script.size(); ++i) {
    const Utterance& u = script[i];
    if (u.start_offset_s < 0) {
      throw std::invalid_argument("utterance " + std::to_string(i) +
                                  " has negative start offset");
    }
    if (u.speaking_rate_wps <= 0) {
      throw std::invalid_argument("utterance " + std::to_string(i) +
                                  " has non-positive speaking rate");
    }
    if (u.trailing_pause_s < 0) {
      throw std::invalid_argument("utterance " + std::to_string(i) +
                                  " has negative trailing pause");
    }
    RenderedSpan s;
    s.script_index = i;
    s.words = normalize_tokens(u.text);
    s.first_frame = offset_to_frame(u.start_offset_s, frame_ms);
    s.frames = span_frames(s.words.size(), u.speaking_rate_wps, frame_ms);
    s.occupied_frames =
        s.frames + offset_to_frame(u.trailing_pause_s, frame_ms);
    if (s.first_frame + s.frames > total_frames) {
      throw std::invalid_argument("utterance " + std::to_string(i) +
                                  " extends past the end of the stream");
    }
    spans.push_back(std::move(s));
  }

  std::vector<const RenderedSpan*> ordered;
  ordered.reserve(spans.size());
  for (const auto& s : spans) ordered.push_back(&s);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const RenderedSpan* a, const RenderedSpan* b) {
                     return a->first_frame < b->first_frame;
                   });
  for (size_t i = 1; i < ordered.size(); ++i) {
    const RenderedSpan* prev = ordered[i - 1];
    const RenderedSpan* cur = ordered[i];
    if (cur->first_frame < prev->first_frame + prev->occupied_frames) {
      throw std::invalid_argument(
          "utterances " + std::to_string(prev->script_index) + " and " +
          std::to_string(cur->script_index) + " overlap");
    }
  }

  std::vector<AudioFrame> frames(static_cast<size_t>(total_frames));
  for (int64_t f = 0; f < total_frames; ++f) {
    frames[static_cast<size_t>(f)] = silent_frame(static_cast<uint32_t>(f), frame_ms);
  }
  for (const auto& s : spans) {
    for (int64_t f = 0; f < s.frames; ++f) {
      frames[static_cast<size_t>(s.first_frame + f)].energy = kVoicedEnergy;
    }
    const int64_t n = static_cast<int64_t>(s.words.size());
    for (int64_t w = 0; w < n; ++w) {
      int64_t f = s.first_frame + (w * s.frames) / n;
      frames[static_cast<size_t>(f)].tokens.push_back(s.words[static_cast<size_t>(w)]);
    }
  }
  return frames;
}

bool vad(const AudioFrame& frame, const VadConfig& config) {
  return frame.energy >= config.voice_threshold;
}

bool VadGate::update(const AudioFrame& frame) {
  if (frame.energy >= config_.voice_threshold) {
    hang_left_ = config_.hangover_frames;
    return true;
  }
  if (hang_left_ > 0) {
    --hang_left_;
    return true;
  }
  return false;
}

double silence_seconds(std::span<const AudioFrame> frames, double window_start_s,
                       double window_len_s, const VadConfig& config) {
  if (window_len_s < 0) throw std::invalid_argument("negative window length");
  if (frames.empty() && window_len_s == 0) return 0.0;
  const int frame_ms = frames.empty() ? kDefaultFrameMs : frames[0].duration_ms;
  const int64_t start_f = offset_to_frame(window_start_s, frame_ms);
  const int64_t len_f = offset_to_frame(window_len_s, frame_ms);
  if (start_f < 0 || start_f + len_f > static_cast<int64_t>(frames.size())) {
    throw std::out_of_range("silence window exceeds the stream");
  }
  VadGate gate(config);
  int64_t silent = 0;
  for (int64_t f = 0; f < start_f + len_f; ++f) {
    bool voiced = gate.update(frames[static_cast<size_t>(f)]);
    if (f >= start_f && !voiced) ++silent;
  }
  return static_cast<double>(silent) * frame_ms / 1000.0;
}

}  // namespace ringgate::audio
