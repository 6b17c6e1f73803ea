#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ringgate::net {

// Call session lifecycle. The only legal transitions are
//   Idle -> Inviting -> {Screening | RingingCallee | Terminated}
//   Screening -> {RingingCallee | Terminated}
//   RingingCallee -> {Connected | Terminated}
//   Connected -> Terminated
// Anything else is a protocol violation and throws; sessions are never
// silently repaired.
enum class SessionPhase {
  Idle,
  Inviting,
  Screening,
  RingingCallee,
  Connected,
  Terminated,
};

const char* to_string(SessionPhase phase);

bool transition_allowed(SessionPhase from, SessionPhase to);

class ProtocolError : public std::runtime_error {
 public:
  explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

class SessionStateMachine {
 public:
  struct Step {
    uint64_t tick;
    SessionPhase from;
    SessionPhase to;
  };

  SessionPhase phase() const { return phase_; }
  bool terminated() const { return phase_ == SessionPhase::Terminated; }

  // Throws ProtocolError if the transition is not in the relation.
  void advance(SessionPhase to, uint64_t tick);

  const std::vector<Step>& trace() const { return trace_; }

 private:
  SessionPhase phase_ = SessionPhase::Idle;
  std::vector<Step> trace_;
};

}  // namespace ringgate::net
