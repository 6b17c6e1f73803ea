#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ringgate::audio {

// All call audio in the simulator is a stream of fixed-duration frames.
// A frame carries a synthetic loudness value plus the words spoken inside
// it, so detection stages downstream see ground truth instead of DSP.
inline constexpr int kDefaultFrameMs = 100;

// Loudness assigned to frames inside a speech span. Always above the
// default VAD threshold.
inline constexpr double kVoicedEnergy = 1.0;

struct AudioFrame {
  uint32_t index = 0;
  uint16_t duration_ms = kDefaultFrameMs;
  double energy = 0.0;
  std::vector<std::string> tokens;

  bool operator==(const AudioFrame&) const = default;
};

// One scripted stretch of caller speech. Words are spread in order over
// ceil(word_count / speaking_rate_wps / frame_duration) frames starting at
// start_offset_s; trailing_pause_s extends the occupied interval with
// silence (used only for overlap checks).
struct Utterance {
  std::string text;
  double start_offset_s = 0.0;
  double speaking_rate_wps = 2.5;
  double trailing_pause_s = 0.0;
};

struct VadConfig {
  double voice_threshold = 0.5;
  int hangover_frames = 0;
};

// Renders a script into exactly ceil(total_duration_s / frame_duration)
// frames. Frames inside an utterance span carry kVoicedEnergy and the
// utterance's words in order; all other frames are silent. Throws
// std::invalid_argument on negative offsets, overlapping utterances
// (message names the offending pair) or spans exceeding the stream.
std::vector<AudioFrame> render_utterances(std::span<const Utterance> script,
                                          double total_duration_s,
                                          int frame_ms = kDefaultFrameMs);

// Single-frame decision, no stream context: voiced iff energy >= threshold
// (boundary inclusive).
bool vad(const AudioFrame& frame, const VadConfig& config);

// Stream-context VAD: a voiced frame keeps the gate open for
// hangover_frames after energy drops.
class VadGate {
 public:
  explicit VadGate(VadConfig config) : config_(config) {}

  bool update(const AudioFrame& frame);
  void reset() { hang_left_ = 0; }

 private:
  VadConfig config_;
  int hang_left_ = 0;
};

// Seconds of unvoiced audio inside [window_start_s, window_start_s +
// window_len_s), evaluated with stream context from the start of the
// stream. Throws std::out_of_range if the window is not fully inside the
// stream.
double silence_seconds(std::span<const AudioFrame> frames, double window_start_s,
                       double window_len_s, const VadConfig& config);

// Frame helpers shared by the renderer and the session clock.
int64_t offset_to_frame(double seconds, int frame_ms = kDefaultFrameMs);
int64_t span_frames(size_t word_count, double rate_wps, int frame_ms = kDefaultFrameMs);

inline AudioFrame silent_frame(uint32_t index, int frame_ms = kDefaultFrameMs) {
  return AudioFrame{index, static_cast<uint16_t>(frame_ms), 0.0, {}};
}

}  // namespace ringgate::audio
