#include "ringgate/framing.hpp"

namespace ringgate::wire {

void write_framed(std::vector<uint8_t>& out, const WireMessage& msg) {
  std::vector<uint8_t> body = encode_message(msg);
  uint32_t len = static_cast<uint32_t>(body.size());
  out.push_back(static_cast<uint8_t>(len >> 24));
  out.push_back(static_cast<uint8_t>(len >> 16));
  out.push_back(static_cast<uint8_t>(len >> 8));
  out.push_back(static_cast<uint8_t>(len));
  out.insert(out.end(), body.begin(), body.end());
}

void FrameReader::feed(std::span<const uint8_t> bytes) {
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

std::optional<WireMessage> FrameReader::poll() {
  if (buf_.size() < 4) return std::nullopt;
  uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len = len << 8 | buf_[static_cast<size_t>(i)];
  if (len > kMaxFrameBytes) {
    throw DecodeError(DecodeErrorKind::Truncated, "stream.length_prefix");
  }
  if (buf_.size() < 4u + len) return std::nullopt;
  std::vector<uint8_t> body(buf_.begin() + 4, buf_.begin() + 4 + len);
  buf_.erase(buf_.begin(), buf_.begin() + 4 + len);
  return decode_message(body);
}

}  // namespace ringgate::wire
