#include "ringgate/net.hpp"

#include <algorithm>

namespace ringgate::net {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void Broker::bind(const std::string& address, Endpoint* handler) {
  bindings_[address] = handler;
}

uint64_t Broker::open_session(const std::string& address, Endpoint* dialer) {
  uint64_t id = next_session_++;
  Route route;
  route.dialer = dialer;
  auto it = bindings_.find(address);
  route.handler = it == bindings_.end() ? nullptr : it->second;
  routes_[id] = route;
  return id;
}

void Broker::to_handler(uint64_t session_id, const wire::WireMessage& msg) {
  auto it = routes_.find(session_id);
  if (it == routes_.end()) {
    throw ProtocolError("message for unknown session " + std::to_string(session_id));
  }
  if (it->second.handler) it->second.handler->deliver(msg);
  // No handler bound: the callee address does not exist; the dialer will
  // time out with reason "unreachable".
}

void Broker::to_dialer(uint64_t session_id, const wire::WireMessage& msg) {
  auto it = routes_.find(session_id);
  if (it == routes_.end() || !it->second.dialer) {
    throw ProtocolError("no dialer for session " + std::to_string(session_id));
  }
  it->second.dialer->deliver(msg);
}

// ── PhoneCallDialer ─────────────────────────────────────────────────────────

PhoneCallDialer::CallHandle& PhoneCallDialer::place_call(
    const std::string& callee_address, const wire::CallerId& caller,
    std::span<const audio::Utterance> script, double script_duration_s) {
  auto handle = std::make_unique<CallHandle>();
  handle->owner_ = this;
  handle->frames_ = audio::render_utterances(script, script_duration_s,
                                             broker_.clock().frame_ms());
  handle->session_id_ = broker_.open_session(callee_address, this);
  handle->invite_tick_ = broker_.clock().ticks();
  handle->sm_.advance(SessionPhase::Inviting, handle->invite_tick_);

  wire::WireMessage invite;
  invite.kind = wire::MsgKind::Invite;
  invite.session_id = handle->session_id_;
  invite.caller = caller;
  handle->log_.push_back({handle->invite_tick_, true, wire::MsgKind::Invite});
  broker_.to_handler(handle->session_id_, invite);

  auto& ref = *handle;
  calls_[handle->session_id_] = std::move(handle);
  return ref;
}

void PhoneCallDialer::deliver(const wire::WireMessage& msg) {
  auto it = calls_.find(msg.session_id);
  if (it == calls_.end()) {
    throw ProtocolError("dialer got message for unknown session " +
                        std::to_string(msg.session_id));
  }
  it->second->inbox_.push_back(msg);
}

void PhoneCallDialer::CallHandle::send(wire::WireMessage msg) {
  msg.session_id = session_id_;
  log_.push_back({owner_->broker_.clock().ticks(), true, msg.kind});
  owner_->broker_.to_handler(session_id_, msg);
}

void PhoneCallDialer::CallHandle::poll() {
  const uint64_t now = owner_->broker_.clock().ticks();
  while (!inbox_.empty()) {
    wire::WireMessage msg = std::move(inbox_.front());
    inbox_.pop_front();
    if (sm_.terminated()) continue;  // late traffic for a dead session
    log_.push_back({now, false, msg.kind});
    switch (msg.kind) {
      case wire::MsgKind::Ringing:
        sm_.advance(SessionPhase::RingingCallee, now);
        break;
      case wire::MsgKind::Answer:
        if (sm_.phase() == SessionPhase::Inviting) {
          // Answered with no ring event: a screener picked up.
          sm_.advance(SessionPhase::Screening, now);
        } else if (sm_.phase() == SessionPhase::RingingCallee) {
          sm_.advance(SessionPhase::Connected, now);
        } else {
          throw ProtocolError("duplicate ANSWER in phase " +
                              std::string(to_string(sm_.phase())));
        }
        if (!answered_) {
          answered_ = true;
          connect_tick_ = now;
        }
        break;
      case wire::MsgKind::Prompt:
        prompts_.emplace_back(now, wire::decode_frame(msg.payload));
        break;
      case wire::MsgKind::Hangup:
        end_reason_ = "remote_hangup";
        sm_.advance(SessionPhase::Terminated, now);
        break;
      case wire::MsgKind::Deny:
        end_reason_ = "denied";
        sm_.advance(SessionPhase::Terminated, now);
        break;
      case wire::MsgKind::Invite:
      case wire::MsgKind::Audio:
        throw ProtocolError(std::string("dialer received ") + to_string(msg.kind));
    }
  }
  if (!sm_.terminated() && !answered_ && now - invite_tick_ >= kInviteTimeoutTicks) {
    end_reason_ = "unreachable";
    sm_.advance(SessionPhase::Terminated, now);
  }
}

void PhoneCallDialer::CallHandle::step_send() {
  if (!answered_ || sm_.terminated()) return;
  const uint64_t now = owner_->broker_.clock().ticks();
  const uint64_t idx = now - connect_tick_;
  audio::AudioFrame frame;
  if (now < mute_until_ || idx >= frames_.size()) {
    frame = audio::silent_frame(static_cast<uint32_t>(idx),
                                owner_->broker_.clock().frame_ms());
  } else {
    frame = frames_[idx];
    frame.index = static_cast<uint32_t>(idx);
  }
  wire::WireMessage msg;
  msg.kind = wire::MsgKind::Audio;
  msg.payload = wire::encode_frame(frame);
  send(std::move(msg));
  ++audio_sent_;
}

void PhoneCallDialer::CallHandle::request_hangup() {
  if (sm_.terminated()) return;
  wire::WireMessage msg;
  msg.kind = wire::MsgKind::Hangup;
  send(std::move(msg));
  end_reason_ = "local_hangup";
  sm_.advance(SessionPhase::Terminated, owner_->broker_.clock().ticks());
}

// ── IncomingCallHandler ─────────────────────────────────────────────────────

IncomingCallHandler::IncomingCallHandler(Broker& broker, std::string address,
                                         Config config)
    : broker_(broker), address_(std::move(address)), config_(std::move(config)) {
  config_.names.validate();
  config_.timers.validate();
  broker_.bind(address_, this);
}

void IncomingCallHandler::deliver(const wire::WireMessage& msg) {
  switch (msg.kind) {
    case wire::MsgKind::Invite:
      invites_.push_back(msg);
      break;
    case wire::MsgKind::Audio:
    case wire::MsgKind::Hangup:
      inbox_.push_back(msg);
      break;
    default:
      throw ProtocolError(std::string("handler received ") + to_string(msg.kind));
  }
}

IncomingCallHandler::HandlerSession* IncomingCallHandler::find(uint64_t session_id) {
  auto it = sessions_.find(session_id);
  return it == sessions_.end() ? nullptr : &it->second;
}

bool IncomingCallHandler::all_terminated() const {
  for (const auto& [id, session] : sessions_) {
    if (!session.sm.terminated()) return false;
  }
  return invites_.empty();
}

void IncomingCallHandler::handle_invite(const wire::WireMessage& msg) {
  const uint64_t now = broker_.clock().ticks();
  if (!msg.caller) throw ProtocolError("INVITE without caller id");
  if (sessions_.contains(msg.session_id)) {
    throw ProtocolError("duplicate INVITE for session " +
                        std::to_string(msg.session_id));
  }

  HandlerSession session;
  session.id = msg.session_id;
  session.caller = *msg.caller;
  session.sm.advance(SessionPhase::Inviting, now);

  SessionResult result;
  result.session_id = session.id;
  result.caller = session.caller;

  switch (intercept::initial_disposition(session.caller, config_.lists)) {
    case intercept::InitialDisposition::DropBlacklisted: {
      // Dropped silently for the callee; the caller is told to go away.
      wire::WireMessage deny;
      deny.kind = wire::MsgKind::Deny;
      deny.session_id = session.id;
      broker_.to_dialer(session.id, deny);
      session.sm.advance(SessionPhase::Terminated, now);
      result.outcome.disposition = screen::ScreeningOutcome::Disposition::BlacklistDrop;
      result.complete = true;
      break;
    }
    case intercept::InitialDisposition::PassWhitelisted: {
      session.mode = Mode::Pass;
      session.sm.advance(SessionPhase::RingingCallee, now);
      session.accept_at = now + kCalleeAcceptDelayTicks;
      wire::WireMessage ringing;
      ringing.kind = wire::MsgKind::Ringing;
      ringing.session_id = session.id;
      broker_.to_dialer(session.id, ringing);
      screen::CalleeEvent ring;
      ring.kind = screen::CalleeEvent::Kind::Ring;
      ring.time_s = broker_.clock().seconds();
      ring.session_id = session.id;
      events_.push_back(ring);
      result.outcome.disposition = screen::ScreeningOutcome::Disposition::WhitelistPass;
      result.complete = true;
      break;
    }
    case intercept::InitialDisposition::ScreenUnknown: {
      session.mode = Mode::Screen;
      session.sm.advance(SessionPhase::Screening, now);
      session.pickup_tick = now;
      wire::WireMessage answer;
      answer.kind = wire::MsgKind::Answer;
      answer.session_id = session.id;
      broker_.to_dialer(session.id, answer);

      screen::ScreeningEngine::Config engine_config;
      engine_config.names = config_.names;
      engine_config.timers = config_.timers;
      engine_config.vad = config_.vad;
      engine_config.noise = config_.noise;
      engine_config.noise.seed = splitmix64(config_.seed ^ (session.id * 0x9e37ULL));
      engine_config.spot_seed = splitmix64(config_.seed ^ session.id);
      engine_config.frame_ms = broker_.clock().frame_ms();
      session.engine = std::make_unique<screen::ScreeningEngine>(engine_config);
      break;
    }
  }
  results_[session.id] = std::move(result);
  sessions_[session.id] = std::move(session);
}

void IncomingCallHandler::finish_screening(HandlerSession& session, bool caller_present) {
  const uint64_t now = broker_.clock().ticks();
  auto& result = results_[session.id];
  result.outcome = session.engine->outcome();
  result.trace = session.engine->trace();
  result.complete = true;

  if (config_.store) {
    session.paths = config_.store->store(session.id, result.outcome);
  }

  if (result.outcome.blocked()) {
    const auto label = result.outcome.disposition ==
                               screen::ScreeningOutcome::Disposition::BlockedHuman
                           ? screen::CallLabel::Human
                           : screen::CallLabel::Robocall;
    screen::CalleeEvent note;
    note.kind = screen::CalleeEvent::Kind::BlockedNotification;
    note.time_s = broker_.clock().seconds();
    note.session_id = session.id;
    note.label = label;
    if (session.paths) {
      note.recording_ref = session.paths->frames_rel;
      note.transcript_ref = session.paths->transcript_rel;
    }
    events_.push_back(note);
    if (config_.store && session.paths) {
      config_.store->append_notification(note.time_s, label, session.id,
                                         session.paths->transcript_rel);
    }
    if (caller_present) {
      wire::WireMessage hangup;
      hangup.kind = wire::MsgKind::Hangup;
      hangup.session_id = session.id;
      broker_.to_dialer(session.id, hangup);
    }
    session.sm.advance(SessionPhase::Terminated, now);
  } else {
    // Forwarded: ring the callee with the conversation so far.
    screen::CalleeEvent ring;
    ring.kind = screen::CalleeEvent::Kind::Ring;
    ring.time_s = broker_.clock().seconds();
    ring.session_id = session.id;
    ring.transcript = result.outcome.transcript;
    ring.caller_name = result.outcome.caller_name_transcript;
    events_.push_back(ring);
    session.sm.advance(SessionPhase::RingingCallee, now);
    if (caller_present) {
      wire::WireMessage ringing;
      ringing.kind = wire::MsgKind::Ringing;
      ringing.session_id = session.id;
      broker_.to_dialer(session.id, ringing);
      session.accept_at = now + kCalleeAcceptDelayTicks;
    } else {
      // Caller is already gone; nobody will pick up.
      session.sm.advance(SessionPhase::Terminated, now);
    }
  }
}

void IncomingCallHandler::run_engine_emit(HandlerSession& session) {
  const uint64_t now = broker_.clock().ticks();
  auto out = session.engine->emit(now - session.pickup_tick);
  if (out.prompt_frame) {
    wire::WireMessage prompt;
    prompt.kind = wire::MsgKind::Prompt;
    prompt.session_id = session.id;
    prompt.payload = wire::encode_frame(*out.prompt_frame);
    broker_.to_dialer(session.id, prompt);
  }
  if (out.hangup || out.ring) {
    finish_screening(session, /*caller_present=*/true);
  }
}

void IncomingCallHandler::emit_tick() {
  const uint64_t now = broker_.clock().ticks();
  while (!invites_.empty()) {
    wire::WireMessage msg = std::move(invites_.front());
    invites_.pop_front();
    handle_invite(msg);
  }
  for (auto& [id, session] : sessions_) {
    if (session.sm.terminated()) continue;
    if (session.sm.phase() == SessionPhase::RingingCallee &&
        now >= session.accept_at) {
      // Callee picks up; for screened calls the handoff ends our part.
      session.sm.advance(SessionPhase::Connected, now);
      wire::WireMessage answer;
      answer.kind = wire::MsgKind::Answer;
      answer.session_id = session.id;
      broker_.to_dialer(session.id, answer);
      if (session.mode == Mode::Screen) {
        session.handoff_hangup_at = now + 1;
      }
      continue;
    }
    if (session.sm.phase() == SessionPhase::Connected &&
        now >= session.handoff_hangup_at) {
      wire::WireMessage hangup;
      hangup.kind = wire::MsgKind::Hangup;
      hangup.session_id = session.id;
      broker_.to_dialer(session.id, hangup);
      session.sm.advance(SessionPhase::Terminated, now);
      continue;
    }
    if (session.mode == Mode::Screen &&
        session.sm.phase() == SessionPhase::Screening) {
      run_engine_emit(session);
    }
  }
}

void IncomingCallHandler::ingest_tick() {
  while (!inbox_.empty()) {
    wire::WireMessage msg = std::move(inbox_.front());
    inbox_.pop_front();
    HandlerSession* session = find(msg.session_id);
    if (!session) {
      throw ProtocolError("handler got message for unknown session " +
                          std::to_string(msg.session_id));
    }
    if (session->sm.terminated()) continue;
    const uint64_t now = broker_.clock().ticks();
    if (msg.kind == wire::MsgKind::Audio) {
      if (session->mode == Mode::Screen && session->engine &&
          !session->engine->finished()) {
        session->engine->ingest(wire::decode_frame(msg.payload));
      }
      // Pass-through audio goes straight to the callee; nothing to do.
    } else if (msg.kind == wire::MsgKind::Hangup) {
      if (session->mode == Mode::Screen && session->engine &&
          !session->engine->finished()) {
        session->engine->on_caller_hangup(now - session->pickup_tick);
        finish_screening(*session, /*caller_present=*/false);
      } else {
        session->sm.advance(SessionPhase::Terminated, now);
      }
    }
  }
}

}  // namespace ringgate::net
