#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "ringgate/wire.hpp"

namespace ringgate::wire {

// Length-delimited transport for carrying WireMessages over a reliable
// byte stream: each message is prefixed by a 4-byte big-endian length.
// The in-process broker does not use this; it exists for byte-oriented
// transports and for .frames-style capture files.

inline constexpr size_t kMaxFrameBytes = kMaxPayload + 64;

// Appends one length-prefixed message to the buffer.
void write_framed(std::vector<uint8_t>& out, const WireMessage& msg);

// Incremental reader: feed arbitrary chunks, poll complete messages.
class FrameReader {
 public:
  void feed(std::span<const uint8_t> bytes);

  // Returns the next complete message, or nullopt if more bytes are
  // needed. Throws DecodeError on a corrupt frame or an oversize length
  // prefix.
  std::optional<WireMessage> poll();

  size_t buffered() const { return buf_.size(); }

 private:
  std::deque<uint8_t> buf_;
};

}  // namespace ringgate::wire
