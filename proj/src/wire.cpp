#include "ringgate/wire.hpp"

#include <bit>
#include <cctype>

namespace ringgate::wire {

namespace {

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v >> 24));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<uint8_t>(v >> shift));
  }
}

class Reader {
 public:
  explicit Reader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  uint8_t u8(const char* field) {
    need(1, field);
    return bytes_[pos_++];
  }

  uint16_t u16(const char* field) {
    need(2, field);
    uint16_t v = static_cast<uint16_t>(bytes_[pos_] << 8 | bytes_[pos_ + 1]);
    pos_ += 2;
    return v;
  }

  uint32_t u32(const char* field) {
    need(4, field);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = v << 8 | bytes_[pos_ + i];
    pos_ += 4;
    return v;
  }

  uint64_t u64(const char* field) {
    need(8, field);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = v << 8 | bytes_[pos_ + i];
    pos_ += 8;
    return v;
  }

  std::span<const uint8_t> raw(size_t n, const char* field) {
    need(n, field);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  size_t pos() const { return pos_; }
  size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(size_t n, const char* field) {
    if (bytes_.size() - pos_ < n) {
      throw DecodeError(DecodeErrorKind::Truncated, field);
    }
  }

  std::span<const uint8_t> bytes_;
  size_t pos_ = 0;
};

}  // namespace

bool CallerId::valid(std::string_view digits) {
  if (digits.size() < 7 || digits.size() > 15) return false;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

CallerId CallerId::parse(std::string_view digits) {
  if (!valid(digits)) {
    throw std::invalid_argument("caller id must be 7-15 decimal digits, got \"" +
                                std::string(digits) + "\"");
  }
  return CallerId{std::string(digits)};
}

const char* to_string(MsgKind kind) {
  switch (kind) {
    case MsgKind::Invite: return "INVITE";
    case MsgKind::Ringing: return "RINGING";
    case MsgKind::Answer: return "ANSWER";
    case MsgKind::Audio: return "AUDIO";
    case MsgKind::Prompt: return "PROMPT";
    case MsgKind::Hangup: return "HANGUP";
    case MsgKind::Deny: return "DENY";
  }
  return "?";
}

const char* to_string(DecodeErrorKind kind) {
  switch (kind) {
    case DecodeErrorKind::BadMagic: return "bad magic";
    case DecodeErrorKind::BadVersion: return "unknown version";
    case DecodeErrorKind::BadKind: return "unknown kind";
    case DecodeErrorKind::Truncated: return "truncated";
    case DecodeErrorKind::BadCallerId: return "bad caller id";
  }
  return "?";
}

DecodeError::DecodeError(DecodeErrorKind kind, std::string field)
    : std::runtime_error(std::string(to_string(kind)) + " at " + field),
      kind_(kind),
      field_(std::move(field)) {}

std::vector<uint8_t> encode_message(const WireMessage& msg) {
  const bool carries_payload =
      msg.kind == MsgKind::Audio || msg.kind == MsgKind::Prompt;
  if (!carries_payload && !msg.payload.empty()) {
    throw std::invalid_argument(std::string("payload not allowed on ") +
                                to_string(msg.kind));
  }
  if (carries_payload && msg.payload.empty()) {
    throw std::invalid_argument(std::string(to_string(msg.kind)) +
                                " requires a frame payload");
  }
  if (msg.payload.size() > kMaxPayload) {
    throw std::invalid_argument("payload exceeds " + std::to_string(kMaxPayload) +
                                " bytes");
  }
  if (msg.kind == MsgKind::Invite) {
    if (!msg.caller) throw std::invalid_argument("INVITE requires a caller id");
    if (!CallerId::valid(msg.caller->digits)) {
      throw std::invalid_argument("invalid caller id");
    }
  } else if (msg.caller) {
    throw std::invalid_argument(std::string("caller id not allowed on ") +
                                to_string(msg.kind));
  }

  std::vector<uint8_t> out;
  out.reserve(17 + (msg.caller ? msg.caller->digits.size() : 0) + msg.payload.size());
  out.push_back(kMagic0);
  out.push_back(kMagic1);
  out.push_back(kVersion);
  out.push_back(static_cast<uint8_t>(msg.kind));
  put_u64(out, msg.session_id);
  if (msg.caller) {
    out.push_back(static_cast<uint8_t>(msg.caller->digits.size()));
    out.insert(out.end(), msg.caller->digits.begin(), msg.caller->digits.end());
  } else {
    out.push_back(0);
  }
  put_u32(out, static_cast<uint32_t>(msg.payload.size()));
  out.insert(out.end(), msg.payload.begin(), msg.payload.end());
  return out;
}

WireMessage decode_message(std::span<const uint8_t> bytes) {
  Reader r(bytes);
  uint8_t m0 = r.u8("magic");
  uint8_t m1 = r.u8("magic");
  if (m0 != kMagic0 || m1 != kMagic1) {
    throw DecodeError(DecodeErrorKind::BadMagic, "magic");
  }
  uint8_t version = r.u8("version");
  if (version != kVersion) {
    throw DecodeError(DecodeErrorKind::BadVersion, "version");
  }
  uint8_t kind_byte = r.u8("kind");
  if (kind_byte < static_cast<uint8_t>(MsgKind::Invite) ||
      kind_byte > static_cast<uint8_t>(MsgKind::Deny)) {
    throw DecodeError(DecodeErrorKind::BadKind, "kind");
  }
  WireMessage msg;
  msg.kind = static_cast<MsgKind>(kind_byte);
  msg.session_id = r.u64("session_id");
  uint8_t caller_len = r.u8("caller_id");
  if (caller_len > 0) {
    auto raw = r.raw(caller_len, "caller_id");
    std::string digits(raw.begin(), raw.end());
    if (!CallerId::valid(digits)) {
      throw DecodeError(DecodeErrorKind::BadCallerId, "caller_id");
    }
    msg.caller = CallerId{std::move(digits)};
  }
  uint32_t payload_len = r.u32("payload_len");
  if (payload_len > kMaxPayload) {
    throw DecodeError(DecodeErrorKind::Truncated, "payload_len");
  }
  auto payload = r.raw(payload_len, "payload");
  msg.payload.assign(payload.begin(), payload.end());
  return msg;
}

void encode_frame_into(const audio::AudioFrame& frame, std::vector<uint8_t>& out) {
  put_u32(out, frame.index);
  put_u16(out, frame.duration_ms);
  put_u64(out, std::bit_cast<uint64_t>(frame.energy));
  put_u16(out, static_cast<uint16_t>(frame.tokens.size()));
  for (const auto& tok : frame.tokens) {
    put_u16(out, static_cast<uint16_t>(tok.size()));
    out.insert(out.end(), tok.begin(), tok.end());
  }
}

std::vector<uint8_t> encode_frame(const audio::AudioFrame& frame) {
  std::vector<uint8_t> out;
  encode_frame_into(frame, out);
  return out;
}

audio::AudioFrame decode_frame_at(std::span<const uint8_t> bytes, size_t* consumed) {
  Reader r(bytes);
  audio::AudioFrame frame;
  frame.index = r.u32("frame.index");
  frame.duration_ms = r.u16("frame.duration_ms");
  frame.energy = std::bit_cast<double>(r.u64("frame.energy"));
  uint16_t count = r.u16("frame.token_count");
  frame.tokens.reserve(count);
  for (uint16_t i = 0; i < count; ++i) {
    uint16_t len = r.u16("frame.token_len");
    auto raw = r.raw(len, "frame.token");
    frame.tokens.emplace_back(raw.begin(), raw.end());
  }
  if (consumed) *consumed = r.pos();
  return frame;
}

audio::AudioFrame decode_frame(std::span<const uint8_t> bytes) {
  size_t consumed = 0;
  audio::AudioFrame frame = decode_frame_at(bytes, &consumed);
  if (consumed != bytes.size()) {
    throw DecodeError(DecodeErrorKind::Truncated, "frame.trailing");
  }
  return frame;
}

}  // namespace ringgate::wire
