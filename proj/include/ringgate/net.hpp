#pragma once

#include <atomic>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ringgate/audio.hpp"
#include "ringgate/intercept.hpp"
#include "ringgate/screening.hpp"
#include "ringgate/session.hpp"
#include "ringgate/wire.hpp"

namespace ringgate::net {

// The whole network runs on one virtual clock advanced by the harness;
// message delivery is lossless and happens within the sending tick. Each
// tick is one audio frame long.
class VirtualClock {
 public:
  explicit VirtualClock(int frame_ms = audio::kDefaultFrameMs)
      : frame_ms_(frame_ms) {}

  uint64_t ticks() const { return ticks_.load(std::memory_order_acquire); }
  void advance(uint64_t n = 1) { ticks_.fetch_add(n, std::memory_order_acq_rel); }

  double seconds() const {
    return static_cast<double>(ticks()) * frame_ms_ / 1000.0;
  }
  int frame_ms() const { return frame_ms_; }
  uint64_t to_ticks(double seconds) const {
    return static_cast<uint64_t>(audio::offset_to_frame(seconds, frame_ms_));
  }

 private:
  std::atomic<uint64_t> ticks_{0};
  int frame_ms_;
};

class Endpoint {
 public:
  virtual ~Endpoint() = default;
  virtual void deliver(const wire::WireMessage& msg) = 0;
};

// Session setup and message routing between dialers and handlers.
// Session ids are unique per broker; unknown addresses swallow INVITEs
// (the dialer times out, reason "unreachable").
class Broker {
 public:
  explicit Broker(VirtualClock& clock, uint64_t first_session_id = 1)
      : clock_(clock), next_session_(first_session_id) {}

  void bind(const std::string& address, Endpoint* handler);
  uint64_t open_session(const std::string& address, Endpoint* dialer);

  void to_handler(uint64_t session_id, const wire::WireMessage& msg);
  void to_dialer(uint64_t session_id, const wire::WireMessage& msg);

  VirtualClock& clock() { return clock_; }

 private:
  struct Route {
    Endpoint* dialer = nullptr;
    Endpoint* handler = nullptr;
  };

  VirtualClock& clock_;
  std::map<std::string, Endpoint*> bindings_;
  std::map<uint64_t, Route> routes_;
  uint64_t next_session_ = 1;
};

struct MsgLogEntry {
  uint64_t tick;
  bool outbound;
  wire::MsgKind kind;
};

// Caller-side endpoint (the dial service). place_call() sends the INVITE;
// once the far side answers, step_send() streams one scripted AUDIO frame
// per tick, substituting silence while muted or after the script ends.
class PhoneCallDialer : public Endpoint {
 public:
  class CallHandle {
   public:
    uint64_t session_id() const { return session_id_; }
    SessionPhase phase() const { return sm_.phase(); }
    bool terminated() const { return sm_.terminated(); }
    const std::string& end_reason() const { return end_reason_; }
    bool answered() const { return answered_; }
    uint64_t connect_tick() const { return connect_tick_; }
    size_t audio_sent() const { return audio_sent_; }
    size_t script_frames() const { return frames_.size(); }

    // Drains arrived messages and checks the invite timeout. Call once
    // per tick, after the far side has emitted.
    void poll();
    // Sends this tick's AUDIO frame when the call is up.
    void step_send();

    // Scenario hooks: silence own frames while clock tick < mute_until.
    void mute_until(uint64_t tick) { mute_until_ = std::max(mute_until_, tick); }
    void request_hangup();

    const std::vector<std::pair<uint64_t, audio::AudioFrame>>& prompts() const {
      return prompts_;
    }
    const SessionStateMachine& session() const { return sm_; }
    const std::vector<MsgLogEntry>& log() const { return log_; }

   private:
    friend class PhoneCallDialer;

    PhoneCallDialer* owner_ = nullptr;
    uint64_t session_id_ = 0;
    uint64_t invite_tick_ = 0;
    uint64_t connect_tick_ = 0;
    uint64_t mute_until_ = 0;
    bool answered_ = false;
    size_t audio_sent_ = 0;
    std::string end_reason_;
    SessionStateMachine sm_;
    std::vector<audio::AudioFrame> frames_;
    std::deque<wire::WireMessage> inbox_;
    std::vector<std::pair<uint64_t, audio::AudioFrame>> prompts_;
    std::vector<MsgLogEntry> log_;

    void send(wire::WireMessage msg);
  };

  explicit PhoneCallDialer(Broker& broker) : broker_(broker) {}

  // Renders the script (validating it) and sends the INVITE.
  CallHandle& place_call(const std::string& callee_address,
                         const wire::CallerId& caller,
                         std::span<const audio::Utterance> script,
                         double script_duration_s);

  void deliver(const wire::WireMessage& msg) override;

  static constexpr uint64_t kInviteTimeoutTicks = 300;  // 30 s

 private:
  Broker& broker_;
  std::map<uint64_t, std::unique_ptr<CallHandle>> calls_;
};

// Callee-side endpoint. Dispatches every INVITE on caller id: whitelisted
// callers ring through, blacklisted callers are denied, unknown callers
// are silently answered and screened. The callee event log records what
// the user would see.
class IncomingCallHandler : public Endpoint {
 public:
  struct Config {
    intercept::ScreeningList lists;
    kws::NameModel names;
    screen::TimerConfig timers;
    audio::VadConfig vad;
    stt::AsrNoise noise;
    uint64_t seed = 0;
    screen::OutcomeStore* store = nullptr;  // optional persistence
  };

  struct SessionResult {
    uint64_t session_id = 0;
    wire::CallerId caller;
    screen::ScreeningOutcome outcome;
    screen::TimingTrace trace;
    bool complete = false;
  };

  IncomingCallHandler(Broker& broker, std::string address, Config config);

  // Phase 1 of a tick: dispatch INVITEs, run engine emit phases, send
  // PROMPT/RINGING/ANSWER/HANGUP/DENY.
  void emit_tick();
  // Phase 3 of a tick: consume arrived AUDIO/HANGUP.
  void ingest_tick();

  const std::vector<screen::CalleeEvent>& events() const { return events_; }
  const std::map<uint64_t, SessionResult>& results() const { return results_; }
  bool all_terminated() const;

  void deliver(const wire::WireMessage& msg) override;

  static constexpr uint64_t kCalleeAcceptDelayTicks = 10;  // 1 s to pick up

 private:
  enum class Mode { Screen, Pass };

  struct HandlerSession {
    uint64_t id = 0;
    wire::CallerId caller;
    Mode mode = Mode::Screen;
    SessionStateMachine sm;
    std::unique_ptr<screen::ScreeningEngine> engine;
    uint64_t pickup_tick = 0;
    uint64_t accept_at = UINT64_MAX;
    uint64_t handoff_hangup_at = UINT64_MAX;
    std::optional<screen::OutcomeStore::StoredPaths> paths;
  };

  void handle_invite(const wire::WireMessage& msg);
  void run_engine_emit(HandlerSession& session);
  void finish_screening(HandlerSession& session, bool caller_present);
  HandlerSession* find(uint64_t session_id);

  Broker& broker_;
  std::string address_;
  Config config_;
  std::deque<wire::WireMessage> invites_;
  std::deque<wire::WireMessage> inbox_;
  std::map<uint64_t, HandlerSession> sessions_;
  std::map<uint64_t, SessionResult> results_;
  std::vector<screen::CalleeEvent> events_;
};

}  // namespace ringgate::net
