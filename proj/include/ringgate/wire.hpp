#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ringgate/audio.hpp"

namespace ringgate::wire {

// Signaling message layout (all integers big-endian):
//
//   offset  size  field
//   0       2     magic 0x52 0x47 ("RG")
//   2       1     version (0x01)
//   3       1     kind (MsgKind, 1..7)
//   4       8     session id
//   12      1     caller id length (0 when absent)
//   13      n     caller id ASCII digits
//   13+n    4     payload length
//   17+n    m     payload
//
// AUDIO and PROMPT carry exactly one serialized AudioFrame as payload;
// every other kind carries none. Only INVITE carries a caller id.

inline constexpr uint8_t kMagic0 = 0x52;
inline constexpr uint8_t kMagic1 = 0x47;
inline constexpr uint8_t kVersion = 0x01;
inline constexpr size_t kMaxPayload = size_t{1} << 20;

struct CallerId {
  std::string digits;  // 7..15 decimal digits, no separators

  static bool valid(std::string_view digits);
  // Throws std::invalid_argument on malformed input.
  static CallerId parse(std::string_view digits);

  bool operator==(const CallerId&) const = default;
  auto operator<=>(const CallerId&) const = default;
};

enum class MsgKind : uint8_t {
  Invite = 1,
  Ringing = 2,
  Answer = 3,
  Audio = 4,
  Prompt = 5,
  Hangup = 6,
  Deny = 7,
};

const char* to_string(MsgKind kind);

struct WireMessage {
  MsgKind kind = MsgKind::Hangup;
  uint64_t session_id = 0;
  std::optional<CallerId> caller;
  std::vector<uint8_t> payload;

  bool operator==(const WireMessage&) const = default;
};

enum class DecodeErrorKind {
  BadMagic,
  BadVersion,
  BadKind,
  Truncated,
  BadCallerId,
};

const char* to_string(DecodeErrorKind kind);

class DecodeError : public std::runtime_error {
 public:
  DecodeError(DecodeErrorKind kind, std::string field);

  DecodeErrorKind kind() const { return kind_; }
  // Field being read when the error was detected ("magic", "session_id", ...).
  const std::string& field() const { return field_; }

 private:
  DecodeErrorKind kind_;
  std::string field_;
};

// Throws std::invalid_argument when the message violates its invariants
// (payload on a non-audio kind, caller id outside INVITE, oversize payload).
std::vector<uint8_t> encode_message(const WireMessage& msg);

// Inverse of encode_message on its image; throws DecodeError otherwise.
WireMessage decode_message(std::span<const uint8_t> bytes);

// AudioFrame payload codec: u32 index, u16 duration_ms, f64 energy (IEEE-754
// bits), u16 token count, then per token u16 length + UTF-8 bytes. This is
// also the on-disk record format of .frames recordings.
std::vector<uint8_t> encode_frame(const audio::AudioFrame& frame);
void encode_frame_into(const audio::AudioFrame& frame, std::vector<uint8_t>& out);
audio::AudioFrame decode_frame(std::span<const uint8_t> bytes);
// Streaming variant for concatenated records; advances *consumed.
audio::AudioFrame decode_frame_at(std::span<const uint8_t> bytes, size_t* consumed);

}  // namespace ringgate::wire
