#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ringgate/audio.hpp"
#include "ringgate/intercept.hpp"
#include "ringgate/spotter.hpp"
#include "ringgate/transcript.hpp"

namespace ringgate::screen {

// Screening timeline constants, all in seconds from pickup:
//   [0, greeting_s)            greeting prompt, asks for the callee's name
//   [t1_s, t1_s + t3_s)        reminder prompt; caller silence is measured
//                              over this window (>= t3/2 silent -> human)
//   [t2_s - closing, t2_s)     closing prompt
//   t2_s                       hangup when no name was heard
// A recognized name at any t < t2_s forwards the call instead.
struct TimerConfig {
  double t1_s = 20.0;
  double t2_s = 35.0;
  double t3_s = 5.0;
  double grace_s = 10.0;
  double greeting_s = 5.0;
  double caller_name_window_s = 5.0;

  // Throws std::invalid_argument unless
  // 0 < greeting_s < t1_s < t1_s + t3_s <= t2_s and
  // grace_s == t2_s - (t1_s + t3_s).
  void validate() const;
};

enum class CallLabel { Human, Robocall };
enum class LabelBasis { None, SilenceRule, KeywordOverride };

const char* to_string(CallLabel label);
const char* to_string(LabelBasis basis);

// Human iff silence_s >= t3_s / 2, boundary inclusive. Throws
// std::invalid_argument outside [0, t3_s].
CallLabel label_from_silence(double silence_s, double t3_s);

// True iff the normalized transcript contains the exact token "press" or
// "enter".
bool keyword_override(const std::string& transcript);

struct ScreeningOutcome {
  enum class Disposition {
    Forwarded,
    BlockedHuman,
    BlockedRobocall,
    WhitelistPass,
    BlacklistDrop,
  };

  Disposition disposition = Disposition::BlockedRobocall;
  std::optional<kws::KeywordHit> hit;   // Forwarded only
  std::string caller_name_transcript;   // Forwarded only
  std::vector<audio::AudioFrame> recording;  // screened calls only
  std::string transcript;                    // screened calls only
  LabelBasis label_basis = LabelBasis::None;

  bool blocked() const {
    return disposition == Disposition::BlockedHuman ||
           disposition == Disposition::BlockedRobocall;
  }
};

const char* to_string(ScreeningOutcome::Disposition d);
std::optional<ScreeningOutcome::Disposition> disposition_from_string(
    const std::string& name);

struct CalleeEvent {
  enum class Kind { Ring, BlockedNotification };

  Kind kind = Kind::Ring;
  double time_s = 0.0;
  uint64_t session_id = 0;
  // Ring
  std::string transcript;
  std::string caller_name;
  // BlockedNotification
  CallLabel label = CallLabel::Human;
  std::string recording_ref;
  std::string transcript_ref;
};

struct TimingTrace {
  double pickup_s = -1.0;
  double reminder_start_s = -1.0;
  double closing_start_s = -1.0;
  double hangup_s = -1.0;
  double ring_s = -1.0;
  double hit_s = -1.0;
  double caller_hangup_s = -1.0;
};

// Drives one screened session on the virtual clock. The host calls
// emit() at the start of every tick (possibly sending the returned
// prompt frame / hangup), then feeds the caller's frame for the same
// tick through ingest(). Name spotting stays active during prompts.
class ScreeningEngine {
 public:
  struct Config {
    kws::NameModel names;
    TimerConfig timers;
    audio::VadConfig vad;
    stt::AsrNoise noise;
    uint64_t spot_seed = 0;
    int frame_ms = audio::kDefaultFrameMs;
  };

  struct TickOutput {
    std::optional<audio::AudioFrame> prompt_frame;
    std::optional<std::string> prompt_started;  // text, when a prompt begins
    bool hangup = false;  // blocked: hang up after this tick's output
    bool ring = false;    // forwarded: notify the callee now
  };

  explicit ScreeningEngine(Config config);

  TickOutput emit(uint64_t tick);
  void ingest(const audio::AudioFrame& frame);
  void on_caller_hangup(uint64_t tick);

  bool finished() const { return finished_; }
  const ScreeningOutcome& outcome() const { return outcome_; }
  const TimingTrace& trace() const { return trace_; }
  const std::vector<stt::PromptRecord>& prompts() const { return prompts_; }

  // Prompt scripts. Chosen so none of them contains an override keyword.
  static const char* kGreetingText;
  static const char* kReminderText;
  static const char* kClosingText;
  static const char* kAskCallerNameText;
  static constexpr double kAskCallerNameSeconds = 2.0;

 private:
  enum class Mode { Screening, ForwardAsk, ForwardCapture, Done };

  struct ActivePrompt {
    uint64_t start_tick = 0;
    uint64_t ticks = 0;
    std::vector<std::vector<std::string>> tokens_by_offset;
  };

  void start_prompt(uint64_t tick, const std::string& text, double duration_s,
                    TickOutput& out);
  std::optional<audio::AudioFrame> prompt_frame_for(uint64_t tick);
  double measure_window_silence() const;
  void finalize_blocked(uint64_t tick);
  void finalize_forwarded(uint64_t tick);
  double seconds(uint64_t tick) const;

  Config config_;
  uint64_t t1_ticks_, t2_ticks_, t3_ticks_, greeting_ticks_, closing_ticks_,
      capture_ticks_, ask_ticks_;

  Mode mode_ = Mode::Screening;
  std::optional<ActivePrompt> active_prompt_;
  std::vector<stt::PromptRecord> prompts_;
  std::vector<audio::AudioFrame> caller_frames_;
  std::optional<kws::KeywordHit> hit_;
  std::optional<CallLabel> silence_label_;
  double measured_silence_s_ = -1.0;
  uint64_t ask_end_tick_ = 0;
  uint64_t capture_start_tick_ = 0;
  uint64_t capture_end_tick_ = 0;
  bool finished_ = false;
  ScreeningOutcome outcome_;
  TimingTrace trace_;
};

// Screening policy as loaded from a policy file.
struct Policy {
  intercept::ScreeningList lists;
  kws::NameModel names;
  TimerConfig timers;
  audio::VadConfig vad;
  stt::AsrNoise noise;
  uint64_t seed = 0;
};

// Policy file: UTF-8 "key = value" lines, '#' comments. Keys: names
// (comma-separated), t1, t2, t3, grace, lists (path, resolved relative to
// the policy file), miss_probability, seed. Unknown keys are rejected.
Policy load_policy(const std::filesystem::path& path);
Policy parse_policy(const std::string& content, const std::string& origin,
                    const std::filesystem::path& base_dir);

// Persists screened-call artifacts:
//   <root>/robocaller/<session>.frames + .txt
//   <root>/human/<session>.frames + .txt
//   <root>/forwarded/<session>.frames + .txt
//   <root>/notifications.log   (time \t label \t session \t transcript path)
// Paths written into the log and returned to callers are relative to the
// root so output trees are byte-comparable.
class OutcomeStore {
 public:
  explicit OutcomeStore(std::filesystem::path root);

  struct StoredPaths {
    std::string frames_rel;
    std::string transcript_rel;
  };

  // Whitelist/blacklist outcomes persist nothing and return nullopt.
  std::optional<StoredPaths> store(uint64_t session_id, const ScreeningOutcome& outcome);

  void append_notification(double time_s, CallLabel label, uint64_t session_id,
                           const std::string& transcript_rel);

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
};

}  // namespace ringgate::screen
