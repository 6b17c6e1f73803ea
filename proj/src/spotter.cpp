#include "ringgate/spotter.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace ringgate::kws {

namespace {

struct StreamToken {
  std::string token;
  uint32_t frame_index;
};

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double to_unit(uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

}  // namespace

void NameModel::validate() {
  if (max_edit_distance < 0) {
    throw std::invalid_argument("max_edit_distance must be non-negative");
  }
  if (miss_probability < 0.0 || miss_probability >= 1.0) {
    throw std::invalid_argument("miss_probability must be in [0, 1)");
  }
  std::vector<std::string> cleaned;
  for (const auto& raw : names) {
    auto words = normalize_tokens(raw);
    if (words.empty()) {
      throw std::invalid_argument("name \"" + raw + "\" is empty after normalization");
    }
    if (words.size() > 3) {
      throw std::invalid_argument("name \"" + raw + "\" has more than 3 words");
    }
    cleaned.push_back(join_tokens(words));
  }
  std::sort(cleaned.begin(), cleaned.end());
  cleaned.erase(std::unique(cleaned.begin(), cleaned.end()), cleaned.end());
  if (cleaned.empty()) {
    throw std::invalid_argument("name model requires at least one name");
  }
  names = std::move(cleaned);
}

bool occurrence_missed(uint64_t seed, size_t token_pos, size_t name_index,
                       double miss_probability) {
  if (miss_probability <= 0.0) return false;
  uint64_t h = splitmix64(seed ^ splitmix64(0x5eedULL + token_pos));
  h = splitmix64(h ^ (0xabcd0000ULL + name_index));
  return to_unit(h) < miss_probability;
}

std::optional<KeywordHit> spot(std::span<const audio::AudioFrame> frames,
                               const NameModel& model, double upto_s,
                               uint64_t seed) {
  if (upto_s < 0) throw std::invalid_argument("upto_s must be non-negative");

  std::vector<std::vector<std::string>> name_words;
  name_words.reserve(model.names.size());
  for (const auto& name : model.names) {
    name_words.push_back(normalize_tokens(name));
  }

  std::vector<StreamToken> stream;
  for (const auto& frame : frames) {
    const double frame_start =
        static_cast<double>(frame.index) * frame.duration_ms / 1000.0;
    if (frame_start >= upto_s - 1e-9) break;
    for (const auto& tok : frame.tokens) {
      stream.push_back({tok, frame.index});
    }
  }

  for (size_t pos = 0; pos < stream.size(); ++pos) {
    for (size_t ni = 0; ni < name_words.size(); ++ni) {
      const auto& words = name_words[ni];
      if (pos + words.size() > stream.size()) continue;
      int total = 0;
      bool feasible = true;
      for (size_t w = 0; w < words.size(); ++w) {
        total += edit_distance(stream[pos + w].token, words[w]);
        if (total > model.max_edit_distance) {
          feasible = false;
          break;
        }
      }
      if (!feasible) continue;
      if (occurrence_missed(seed, pos, ni, model.miss_probability)) continue;
      const StreamToken& last = stream[pos + words.size() - 1];
      KeywordHit hit;
      hit.name = model.names[ni];
      hit.time_s = static_cast<double>(last.frame_index) *
                   frames[0].duration_ms / 1000.0;
      std::ostringstream matched;
      for (size_t w = 0; w < words.size(); ++w) {
        if (w) matched << ' ';
        matched << stream[pos + w].token;
      }
      hit.matched_text = matched.str();
      return hit;
    }
  }
  return std::nullopt;
}

}  // namespace ringgate::kws
