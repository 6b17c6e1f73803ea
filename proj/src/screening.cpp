#include "ringgate/screening.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ringgate/text.hpp"

namespace ringgate::screen {

const char* ScreeningEngine::kGreetingText =
    "hello this call is being screened please say the name of the person you "
    "are trying to reach";
const char* ScreeningEngine::kReminderText =
    "sorry i did not catch that please tell me who you are calling for";
const char* ScreeningEngine::kClosingText =
    "no name was given so this call cannot be completed goodbye";
const char* ScreeningEngine::kAskCallerNameText = "and who may i say is calling";

void TimerConfig::validate() const {
  if (!(0 < greeting_s && greeting_s < t1_s && t1_s < t1_s + t3_s &&
        t1_s + t3_s <= t2_s)) {
    throw std::invalid_argument(
        "timers must satisfy 0 < greeting < t1 < t1 + t3 <= t2");
  }
  if (t3_s <= 0) throw std::invalid_argument("t3 must be positive");
  if (caller_name_window_s <= 0) {
    throw std::invalid_argument("caller_name_window must be positive");
  }
  if (std::abs(t1_s + t3_s + grace_s - t2_s) > 1e-9) {
    throw std::invalid_argument("grace must equal t2 - (t1 + t3)");
  }
}

const char* to_string(CallLabel label) {
  return label == CallLabel::Human ? "human" : "robocaller";
}

const char* to_string(LabelBasis basis) {
  switch (basis) {
    case LabelBasis::None: return "none";
    case LabelBasis::SilenceRule: return "silence_rule";
    case LabelBasis::KeywordOverride: return "keyword_override";
  }
  return "?";
}

const char* to_string(ScreeningOutcome::Disposition d) {
  switch (d) {
    case ScreeningOutcome::Disposition::Forwarded: return "forwarded";
    case ScreeningOutcome::Disposition::BlockedHuman: return "blocked_human";
    case ScreeningOutcome::Disposition::BlockedRobocall: return "blocked_robocall";
    case ScreeningOutcome::Disposition::WhitelistPass: return "whitelist_pass";
    case ScreeningOutcome::Disposition::BlacklistDrop: return "blacklist_drop";
  }
  return "?";
}

std::optional<ScreeningOutcome::Disposition> disposition_from_string(
    const std::string& name) {
  using D = ScreeningOutcome::Disposition;
  if (name == "forwarded") return D::Forwarded;
  if (name == "blocked_human") return D::BlockedHuman;
  if (name == "blocked_robocall") return D::BlockedRobocall;
  if (name == "whitelist_pass") return D::WhitelistPass;
  if (name == "blacklist_drop") return D::BlacklistDrop;
  return std::nullopt;
}

CallLabel label_from_silence(double silence_s, double t3_s) {
  if (silence_s < 0 || silence_s > t3_s + 1e-9) {
    throw std::invalid_argument("silence outside [0, t3]");
  }
  return silence_s >= t3_s / 2.0 - 1e-9 ? CallLabel::Human : CallLabel::Robocall;
}

bool keyword_override(const std::string& transcript) {
  for (const auto& tok : normalize_tokens(transcript)) {
    if (tok == "press" || tok == "enter") return true;
  }
  return false;
}

ScreeningEngine::ScreeningEngine(Config config) : config_(std::move(config)) {
  config_.names.validate();
  config_.timers.validate();
  const int fm = config_.frame_ms;
  t1_ticks_ = static_cast<uint64_t>(audio::offset_to_frame(config_.timers.t1_s, fm));
  t2_ticks_ = static_cast<uint64_t>(audio::offset_to_frame(config_.timers.t2_s, fm));
  t3_ticks_ = static_cast<uint64_t>(audio::offset_to_frame(config_.timers.t3_s, fm));
  greeting_ticks_ =
      static_cast<uint64_t>(audio::offset_to_frame(config_.timers.greeting_s, fm));
  // Closing prompt ends exactly at t2; its length mirrors the greeting but
  // never reaches back into the reminder window.
  closing_ticks_ = std::min(greeting_ticks_,
                            t2_ticks_ - (t1_ticks_ + t3_ticks_));
  capture_ticks_ = static_cast<uint64_t>(
      audio::offset_to_frame(config_.timers.caller_name_window_s, fm));
  ask_ticks_ = static_cast<uint64_t>(
      audio::offset_to_frame(kAskCallerNameSeconds, fm));
}

double ScreeningEngine::seconds(uint64_t tick) const {
  return static_cast<double>(tick) * config_.frame_ms / 1000.0;
}

void ScreeningEngine::start_prompt(uint64_t tick, const std::string& text,
                                   double duration_s, TickOutput& out) {
  ActivePrompt prompt;
  prompt.start_tick = tick;
  prompt.ticks = static_cast<uint64_t>(
      audio::offset_to_frame(duration_s, config_.frame_ms));
  if (prompt.ticks == 0) return;
  auto words = normalize_tokens(text);
  prompt.tokens_by_offset.assign(prompt.ticks, {});
  const int64_t n = static_cast<int64_t>(words.size());
  for (int64_t w = 0; w < n; ++w) {
    int64_t off = (w * static_cast<int64_t>(prompt.ticks)) / n;
    prompt.tokens_by_offset[static_cast<size_t>(off)].push_back(words[static_cast<size_t>(w)]);
  }
  active_prompt_ = std::move(prompt);
  prompts_.push_back({seconds(tick), text});
  out.prompt_started = text;
}

std::optional<audio::AudioFrame> ScreeningEngine::prompt_frame_for(uint64_t tick) {
  if (!active_prompt_) return std::nullopt;
  if (tick >= active_prompt_->start_tick + active_prompt_->ticks) {
    active_prompt_.reset();
    return std::nullopt;
  }
  const uint64_t off = tick - active_prompt_->start_tick;
  audio::AudioFrame frame;
  frame.index = static_cast<uint32_t>(tick);
  frame.duration_ms = static_cast<uint16_t>(config_.frame_ms);
  frame.energy = audio::kVoicedEnergy;
  frame.tokens = active_prompt_->tokens_by_offset[static_cast<size_t>(off)];
  return frame;
}

double ScreeningEngine::measure_window_silence() const {
  // Pad the received stream with silence to cover the whole window;
  // frames never sent (caller hangup) count as silence.
  const uint64_t window_end = t1_ticks_ + t3_ticks_;
  std::vector<audio::AudioFrame> padded = caller_frames_;
  while (padded.size() < window_end) {
    padded.push_back(audio::silent_frame(static_cast<uint32_t>(padded.size()),
                                         config_.frame_ms));
  }
  return audio::silence_seconds(padded, config_.timers.t1_s, config_.timers.t3_s,
                                config_.vad);
}

ScreeningEngine::TickOutput ScreeningEngine::emit(uint64_t tick) {
  TickOutput out;
  if (finished_) return out;

  if (trace_.pickup_s < 0) trace_.pickup_s = seconds(tick);

  switch (mode_) {
    case Mode::Screening: {
      if (hit_) {
        active_prompt_.reset();  // stop talking, forward instead
        mode_ = Mode::ForwardAsk;
        ask_end_tick_ = tick + ask_ticks_;
        start_prompt(tick, kAskCallerNameText, kAskCallerNameSeconds, out);
        out.prompt_frame = prompt_frame_for(tick);
        return out;
      }
      if (tick == t2_ticks_) {
        finalize_blocked(tick);
        trace_.hangup_s = seconds(tick);
        out.hangup = true;
        return out;
      }
      if (tick == 0) {
        start_prompt(tick, kGreetingText, config_.timers.greeting_s, out);
      } else if (tick == t1_ticks_) {
        start_prompt(tick, kReminderText, config_.timers.t3_s, out);
        trace_.reminder_start_s = seconds(tick);
      } else if (tick == t1_ticks_ + t3_ticks_) {
        measured_silence_s_ = measure_window_silence();
        silence_label_ = label_from_silence(measured_silence_s_, config_.timers.t3_s);
      }
      if (tick == t2_ticks_ - closing_ticks_) {
        start_prompt(tick, kClosingText, seconds(closing_ticks_), out);
        trace_.closing_start_s = seconds(tick);
      }
      out.prompt_frame = prompt_frame_for(tick);
      return out;
    }
    case Mode::ForwardAsk: {
      if (tick >= ask_end_tick_) {
        mode_ = Mode::ForwardCapture;
        capture_start_tick_ = tick;
        capture_end_tick_ = tick + capture_ticks_;
        return out;
      }
      out.prompt_frame = prompt_frame_for(tick);
      return out;
    }
    case Mode::ForwardCapture: {
      if (tick >= capture_end_tick_) {
        finalize_forwarded(tick);
        out.ring = true;
      }
      return out;
    }
    case Mode::Done:
      return out;
  }
  return out;
}

void ScreeningEngine::ingest(const audio::AudioFrame& frame) {
  if (finished_) return;
  caller_frames_.push_back(frame);
  if (hit_) return;
  if (mode_ != Mode::Screening) return;
  const double upto =
      (static_cast<double>(frame.index) + 1.0) * config_.frame_ms / 1000.0;
  auto found = kws::spot(caller_frames_, config_.names, upto, config_.spot_seed);
  if (found && found->time_s < config_.timers.t2_s - 1e-9) {
    hit_ = *found;
    trace_.hit_s = found->time_s;
  }
}

void ScreeningEngine::on_caller_hangup(uint64_t tick) {
  if (finished_) return;
  trace_.caller_hangup_s = seconds(tick);
  if (hit_) {
    finalize_forwarded(tick);
  } else {
    finalize_blocked(tick);
  }
}

void ScreeningEngine::finalize_blocked(uint64_t tick) {
  (void)tick;
  if (!silence_label_) {
    measured_silence_s_ = measure_window_silence();
    silence_label_ = label_from_silence(measured_silence_s_, config_.timers.t3_s);
  }
  outcome_.recording = caller_frames_;
  outcome_.transcript = stt::transcribe(caller_frames_, prompts_, config_.noise);
  CallLabel label = *silence_label_;
  LabelBasis basis = LabelBasis::SilenceRule;
  if (label == CallLabel::Human && keyword_override(outcome_.transcript)) {
    label = CallLabel::Robocall;
    basis = LabelBasis::KeywordOverride;
  }
  outcome_.disposition = label == CallLabel::Human
                             ? ScreeningOutcome::Disposition::BlockedHuman
                             : ScreeningOutcome::Disposition::BlockedRobocall;
  outcome_.label_basis = basis;
  mode_ = Mode::Done;
  finished_ = true;
}

void ScreeningEngine::finalize_forwarded(uint64_t tick) {
  outcome_.disposition = ScreeningOutcome::Disposition::Forwarded;
  outcome_.hit = hit_;
  outcome_.label_basis = LabelBasis::None;
  outcome_.recording = caller_frames_;
  outcome_.transcript = stt::transcribe(caller_frames_, prompts_, config_.noise);

  // Caller-name capture is best effort: whatever was said in the window.
  std::vector<std::string> name_tokens;
  size_t pos = 0;
  std::vector<std::string> noisy = stt::caller_tokens(caller_frames_, config_.noise);
  for (const auto& frame : caller_frames_) {
    for (size_t i = 0; i < frame.tokens.size(); ++i, ++pos) {
      if (frame.index >= capture_start_tick_ && frame.index < capture_end_tick_) {
        name_tokens.push_back(noisy[pos]);
      }
    }
  }
  outcome_.caller_name_transcript = join_tokens(name_tokens);

  trace_.ring_s = seconds(tick);
  mode_ = Mode::Done;
  finished_ = true;
}

Policy parse_policy(const std::string& content, const std::string& origin,
                    const std::filesystem::path& base_dir) {
  Policy policy;
  bool have_names = false;
  std::istringstream in(content);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto fail = [&](const std::string& why) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": " + why);
    };
    // trim
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    auto trim = [](std::string s) {
      auto a = s.find_first_not_of(" \t\r");
      auto b = s.find_last_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      return s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    auto parse_double = [&](const std::string& v) {
      try {
        size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
      } catch (const std::exception&) {
        fail("invalid number \"" + v + "\"");
        return 0.0;
      }
    };
    if (key == "names") {
      policy.names.names.clear();
      std::istringstream parts(value);
      std::string name;
      while (std::getline(parts, name, ',')) {
        auto words = normalize_tokens(name);
        if (!words.empty()) policy.names.names.push_back(join_tokens(words));
      }
      if (policy.names.names.empty()) fail("names requires at least one name");
      have_names = true;
    } else if (key == "t1") {
      policy.timers.t1_s = parse_double(value);
    } else if (key == "t2") {
      policy.timers.t2_s = parse_double(value);
    } else if (key == "t3") {
      policy.timers.t3_s = parse_double(value);
    } else if (key == "grace") {
      policy.timers.grace_s = parse_double(value);
    } else if (key == "lists") {
      policy.lists = intercept::load_lists(base_dir / value);
    } else if (key == "miss_probability") {
      policy.names.miss_probability = parse_double(value);
    } else if (key == "seed") {
      try {
        policy.seed = std::stoull(value);
      } catch (const std::exception&) {
        fail("invalid seed \"" + value + "\"");
      }
    } else {
      fail("unknown key \"" + key + "\"");
    }
  }
  if (!have_names) {
    throw std::runtime_error(origin + ": missing required key \"names\"");
  }
  policy.names.validate();
  policy.timers.validate();
  return policy;
}

Policy load_policy(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open policy file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_policy(buf.str(), path.filename().string(),
                      path.has_parent_path() ? path.parent_path()
                                             : std::filesystem::path("."));
}

OutcomeStore::OutcomeStore(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
}

std::optional<OutcomeStore::StoredPaths> OutcomeStore::store(
    uint64_t session_id, const ScreeningOutcome& outcome) {
  using D = ScreeningOutcome::Disposition;
  std::string folder;
  switch (outcome.disposition) {
    case D::BlockedRobocall: folder = "robocaller"; break;
    case D::BlockedHuman: folder = "human"; break;
    case D::Forwarded: folder = "forwarded"; break;
    case D::WhitelistPass:
    case D::BlacklistDrop:
      return std::nullopt;
  }
  std::filesystem::create_directories(root_ / folder);
  const std::string stem = std::to_string(session_id);
  StoredPaths paths;
  paths.frames_rel = folder + "/" + stem + ".frames";
  paths.transcript_rel = folder + "/" + stem + ".txt";

  std::vector<uint8_t> bytes;
  for (const auto& frame : outcome.recording) {
    wire::encode_frame_into(frame, bytes);
  }
  std::ofstream frames_out(root_ / paths.frames_rel, std::ios::binary);
  if (!frames_out) {
    throw std::runtime_error("cannot write " + (root_ / paths.frames_rel).string());
  }
  frames_out.write(reinterpret_cast<const char*>(bytes.data()),
                   static_cast<std::streamsize>(bytes.size()));

  std::ofstream txt_out(root_ / paths.transcript_rel, std::ios::binary);
  if (!txt_out) {
    throw std::runtime_error("cannot write " +
                             (root_ / paths.transcript_rel).string());
  }
  txt_out << outcome.transcript;
  return paths;
}

void OutcomeStore::append_notification(double time_s, CallLabel label,
                                       uint64_t session_id,
                                       const std::string& transcript_rel) {
  std::ofstream log(root_ / "notifications.log", std::ios::app);
  if (!log) throw std::runtime_error("cannot append to notifications.log");
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", time_s);
  log << buf << '\t' << to_string(label) << '\t' << session_id << '\t'
      << transcript_rel << '\n';
}

}  // namespace ringgate::screen
