#include "ringgate/session.hpp"

#include <gtest/gtest.h>

#include "ringgate/net.hpp"

namespace ringgate::net {
namespace {

using Phase = SessionPhase;

TEST(Transitions, RelationIsExact) {
  const Phase all[] = {Phase::Idle,          Phase::Inviting, Phase::Screening,
                       Phase::RingingCallee, Phase::Connected, Phase::Terminated};
  auto ok = [](Phase a, Phase b) { return transition_allowed(a, b); };
  for (Phase from : all) {
    for (Phase to : all) {
      const bool expected =
          (from == Phase::Idle && to == Phase::Inviting) ||
          (from == Phase::Inviting &&
           (to == Phase::Screening || to == Phase::RingingCallee ||
            to == Phase::Terminated)) ||
          (from == Phase::Screening &&
           (to == Phase::RingingCallee || to == Phase::Terminated)) ||
          (from == Phase::RingingCallee &&
           (to == Phase::Connected || to == Phase::Terminated)) ||
          (from == Phase::Connected && to == Phase::Terminated);
      EXPECT_EQ(ok(from, to), expected)
          << to_string(from) << " -> " << to_string(to);
    }
  }
}

TEST(Transitions, IllegalStepThrowsAndKeepsTrace) {
  SessionStateMachine sm;
  sm.advance(Phase::Inviting, 0);
  sm.advance(Phase::Screening, 1);
  EXPECT_THROW(sm.advance(Phase::Inviting, 2), ProtocolError);
  EXPECT_EQ(sm.phase(), Phase::Screening);
  ASSERT_EQ(sm.trace().size(), 2u);
  EXPECT_EQ(sm.trace()[1].to, Phase::Screening);
}

// Minimal world: a handler configured to screen every unknown caller.
struct World {
  VirtualClock clock;
  Broker broker{clock};
  IncomingCallHandler::Config config;
  std::unique_ptr<IncomingCallHandler> handler;
  PhoneCallDialer dialer{broker};

  explicit World(intercept::ScreeningList lists = {}) {
    config.lists = std::move(lists);
    config.names.names = {"taylor"};
    handler = std::make_unique<IncomingCallHandler>(broker, "callee", config);
  }

  void run_tick(PhoneCallDialer::CallHandle& call) {
    handler->emit_tick();
    call.poll();
    if (!call.terminated()) call.step_send();
    handler->ingest_tick();
    clock.advance();
  }
};

std::vector<audio::Utterance> babble_35s() {
  std::string text;
  for (int i = 0; i < 87; ++i) text += "blah ";  // 87 / 2.5 wps = 34.8 s
  return {audio::Utterance{text, 0.0, 2.5, 0.0}};
}

TEST(Dialer, DeniedCallSendsNoAudio) {
  intercept::ScreeningList lists;
  lists.blacklist.insert(wire::CallerId{"9005550001"});
  World world(lists);
  auto& call = world.dialer.place_call("callee", wire::CallerId{"9005550001"},
                                       babble_35s(), 35.0);
  for (int i = 0; i < 5 && !call.terminated(); ++i) world.run_tick(call);
  EXPECT_TRUE(call.terminated());
  EXPECT_EQ(call.end_reason(), "denied");
  EXPECT_EQ(call.audio_sent(), 0u);
  // The callee never saw a ring.
  for (const auto& ev : world.handler->events()) {
    EXPECT_NE(ev.kind, screen::CalleeEvent::Kind::Ring);
  }
}

TEST(Dialer, ScreenedCallStreams350FramesThenHangup) {
  World world;
  auto& call = world.dialer.place_call("callee", wire::CallerId{"3015550100"},
                                       babble_35s(), 35.0);
  for (int i = 0; i < 400 && !call.terminated(); ++i) world.run_tick(call);
  EXPECT_TRUE(call.terminated());
  EXPECT_EQ(call.end_reason(), "remote_hangup");
  // 35 s at one frame per tick.
  EXPECT_EQ(call.audio_sent(), 350u);
  // Hangup arrived at exactly t2 on the virtual clock.
  const auto& log = call.log();
  auto hangup = std::find_if(log.begin(), log.end(), [](const MsgLogEntry& e) {
    return !e.outbound && e.kind == wire::MsgKind::Hangup;
  });
  ASSERT_NE(hangup, log.end());
  EXPECT_EQ(hangup->tick, 350u);
}

TEST(Dialer, PromptsArriveWithinSameTick) {
  World world;
  auto& call = world.dialer.place_call("callee", wire::CallerId{"3015550100"},
                                       babble_35s(), 35.0);
  world.run_tick(call);  // tick 0: INVITE handled, ANSWER + greeting frame
  ASSERT_FALSE(call.prompts().empty());
  EXPECT_EQ(call.prompts().front().first, 0u);  // greeting heard at t = 0
  EXPECT_TRUE(call.answered());
  EXPECT_EQ(call.connect_tick(), 0u);
}

TEST(Dialer, ConcurrentCallsGetDistinctSessions) {
  World world;
  auto& a = world.dialer.place_call("callee", wire::CallerId{"3015550101"},
                                    babble_35s(), 35.0);
  auto& b = world.dialer.place_call("callee", wire::CallerId{"3015550102"},
                                    babble_35s(), 35.0);
  EXPECT_NE(a.session_id(), b.session_id());
  for (int i = 0; i < 400 && !(a.terminated() && b.terminated()); ++i) {
    world.handler->emit_tick();
    a.poll();
    b.poll();
    if (!a.terminated()) a.step_send();
    if (!b.terminated()) b.step_send();
    world.handler->ingest_tick();
    world.clock.advance();
  }
  EXPECT_TRUE(a.terminated());
  EXPECT_TRUE(b.terminated());
  EXPECT_EQ(world.handler->results().size(), 2u);
}

TEST(Dialer, UnknownAddressTimesOutUnreachable) {
  VirtualClock clock;
  Broker broker(clock);
  PhoneCallDialer dialer(broker);
  auto& call = dialer.place_call("nobody-home", wire::CallerId{"3015550100"},
                                 {}, 0.0);
  for (int i = 0; i < 400 && !call.terminated(); ++i) {
    call.poll();
    clock.advance();
  }
  EXPECT_TRUE(call.terminated());
  EXPECT_EQ(call.end_reason(), "unreachable");
  EXPECT_EQ(call.session().trace().back().tick, 300u);  // 30 s
}

TEST(Dialer, CallerHangupTerminatesBothSides) {
  World world;
  auto& call = world.dialer.place_call("callee", wire::CallerId{"3015550100"},
                                       babble_35s(), 35.0);
  for (int i = 0; i < 50; ++i) world.run_tick(call);
  call.request_hangup();
  world.handler->ingest_tick();
  EXPECT_TRUE(call.terminated());
  EXPECT_TRUE(world.handler->all_terminated());
  const auto& result = world.handler->results().begin()->second;
  EXPECT_TRUE(result.complete);
  EXPECT_TRUE(result.outcome.blocked());
}

TEST(Handler, RejectsWrongDirectionTraffic) {
  World world;
  wire::WireMessage prompt;
  prompt.kind = wire::MsgKind::Prompt;
  prompt.session_id = 1;
  prompt.payload = wire::encode_frame(audio::silent_frame(0));
  EXPECT_THROW(world.handler->deliver(prompt), ProtocolError);
}

}  // namespace
}  // namespace ringgate::net
