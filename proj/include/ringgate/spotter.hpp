#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ringgate/audio.hpp"
#include "ringgate/text.hpp"

namespace ringgate::kws {

using ringgate::edit_distance;
using ringgate::normalize_tokens;

// Target names for the spotter. Matching is fuzzy at the word level: a
// window of consecutive caller tokens matches a name when the per-word
// edit distances sum to at most max_edit_distance. Multi-word names must
// appear as consecutive tokens. miss_probability models detector false
// negatives: each true occurrence is independently dropped with that
// probability, derived deterministically from the session seed and the
// occurrence position, so a missed occurrence never hides a later one.
struct NameModel {
  std::vector<std::string> names;  // normalized at validate()
  int max_edit_distance = 1;
  double miss_probability = 0.0;

  // Normalizes names, sorts them, and checks the invariants (non-empty
  // set, each name 1..3 words after normalization). Throws
  // std::invalid_argument otherwise.
  void validate();
};

struct KeywordHit {
  std::string name;
  double time_s = 0.0;
  std::string matched_text;

  bool operator==(const KeywordHit&) const = default;
};

// Scans caller tokens in stream order over frames that start before
// upto_s and returns the first surviving match, if any.
std::optional<KeywordHit> spot(std::span<const audio::AudioFrame> frames,
                               const NameModel& model, double upto_s,
                               uint64_t seed = 0);

// Deterministic per-occurrence miss draw, exposed for tests.
bool occurrence_missed(uint64_t seed, size_t token_pos, size_t name_index,
                       double miss_probability);

}  // namespace ringgate::kws
