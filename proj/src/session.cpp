#include "ringgate/session.hpp"

namespace ringgate::net {

const char* to_string(SessionPhase phase) {
  switch (phase) {
    case SessionPhase::Idle: return "Idle";
    case SessionPhase::Inviting: return "Inviting";
    case SessionPhase::Screening: return "Screening";
    case SessionPhase::RingingCallee: return "RingingCallee";
    case SessionPhase::Connected: return "Connected";
    case SessionPhase::Terminated: return "Terminated";
  }
  return "?";
}

bool transition_allowed(SessionPhase from, SessionPhase to) {
  switch (from) {
    case SessionPhase::Idle:
      return to == SessionPhase::Inviting;
    case SessionPhase::Inviting:
      return to == SessionPhase::Screening || to == SessionPhase::RingingCallee ||
             to == SessionPhase::Terminated;
    case SessionPhase::Screening:
      return to == SessionPhase::RingingCallee || to == SessionPhase::Terminated;
    case SessionPhase::RingingCallee:
      return to == SessionPhase::Connected || to == SessionPhase::Terminated;
    case SessionPhase::Connected:
      return to == SessionPhase::Terminated;
    case SessionPhase::Terminated:
      return false;
  }
  return false;
}

void SessionStateMachine::advance(SessionPhase to, uint64_t tick) {
  if (!transition_allowed(phase_, to)) {
    throw ProtocolError(std::string("illegal session transition ") +
                        to_string(phase_) + " -> " + to_string(to));
  }
  trace_.push_back({tick, phase_, to});
  phase_ = to;
}

}  // namespace ringgate::net
