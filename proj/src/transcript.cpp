#include "ringgate/transcript.hpp"

#include <algorithm>
#include <sstream>

namespace ringgate::stt {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool substituted(const AsrNoise& noise, size_t token_pos) {
  if (noise.word_error_rate <= 0.0) return false;
  uint64_t h = splitmix64(noise.seed ^ splitmix64(0xa5a5ULL + token_pos));
  double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  return u < noise.word_error_rate;
}

struct Event {
  double time_s;
  bool is_prompt;
  size_t order;  // original position, for a stable merge
  std::string text;
};

}  // namespace

std::vector<std::string> caller_tokens(std::span<const audio::AudioFrame> frames,
                                       const AsrNoise& noise) {
  std::vector<std::string> out;
  size_t pos = 0;
  for (const auto& frame : frames) {
    for (const auto& tok : frame.tokens) {
      out.push_back(substituted(noise, pos) ? kUnknownToken : tok);
      ++pos;
    }
  }
  return out;
}

std::string transcribe(std::span<const audio::AudioFrame> frames,
                       std::span<const PromptRecord> prompts,
                       const AsrNoise& noise) {
  std::vector<Event> events;
  size_t order = 0;
  for (const auto& p : prompts) {
    events.push_back({p.time_s, true, order++, p.text});
  }
  size_t pos = 0;
  for (const auto& frame : frames) {
    const double t = static_cast<double>(frame.index) * frame.duration_ms / 1000.0;
    for (const auto& tok : frame.tokens) {
      events.push_back({t, false, order++, substituted(noise, pos) ? kUnknownToken : tok});
      ++pos;
    }
  }
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.time_s != b.time_s) return a.time_s < b.time_s;
    if (a.is_prompt != b.is_prompt) return a.is_prompt;  // assistant speaks first
    return a.order < b.order;
  });

  // Each prompt is its own turn; consecutive caller tokens merge into one.
  struct Turn {
    bool is_prompt;
    std::string text;
  };
  std::vector<Turn> turns;
  for (const auto& ev : events) {
    if (!ev.is_prompt && !turns.empty() && !turns.back().is_prompt) {
      turns.back().text += ' ';
      turns.back().text += ev.text;
    } else {
      turns.push_back({ev.is_prompt, ev.text});
    }
  }

  std::ostringstream out;
  for (const auto& turn : turns) {
    out << (turn.is_prompt ? "VA: " : "CALLER: ") << turn.text << '\n';
  }
  return out.str();
}

}  // namespace ringgate::stt
