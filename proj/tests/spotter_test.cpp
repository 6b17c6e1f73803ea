#include "ringgate/spotter.hpp"

#include <gtest/gtest.h>

#include <random>

namespace ringgate::kws {
namespace {

std::vector<audio::AudioFrame> frames_for(const std::string& text,
                                          double offset_s = 0.0,
                                          double rate = 2.5) {
  std::vector<audio::Utterance> script{{text, offset_s, rate, 0.0}};
  const auto words = normalize_tokens(text);
  const double dur =
      offset_s + static_cast<double>(audio::span_frames(words.size(), rate)) * 0.1;
  return audio::render_utterances(script, dur + 0.5);
}

NameModel taylor_model() {
  NameModel model;
  model.names = {"taylor"};
  model.validate();
  return model;
}

TEST(Normalize, Examples) {
  EXPECT_EQ(normalize_tokens("Taylor?"), (std::vector<std::string>{"taylor"}));
  EXPECT_EQ(normalize_tokens(""), (std::vector<std::string>{}));
  EXPECT_EQ(normalize_tokens("PRESS 1 now!"),
            (std::vector<std::string>{"press", "1", "now"}));
  EXPECT_EQ(normalize_tokens("  don't   stop "),
            (std::vector<std::string>{"don't", "stop"}));
  // Idempotent.
  auto once = normalize_tokens("Hello, WORLD!!");
  EXPECT_EQ(normalize_tokens(join_tokens(once)), once);
}

TEST(Spot, FindsNameInForwardingScript) {
  auto frames = frames_for("hello can you forward my call to taylor");
  auto hit = spot(frames, taylor_model(), 60.0);
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(hit->name, "taylor");
  EXPECT_EQ(hit->matched_text, "taylor");
}

TEST(Spot, NoNameMeansNoHit) {
  auto frames = frames_for("hello is anyone there today");
  EXPECT_FALSE(spot(frames, taylor_model(), 60.0).has_value());
}

TEST(Spot, FuzzyMatchWithinEditDistanceOne) {
  auto frames = frames_for("tailor");  // taylor with one substitution
  auto hit = spot(frames, taylor_model(), 60.0);
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(hit->matched_text, "tailor");

  auto far = frames_for("tiger");
  EXPECT_FALSE(spot(far, taylor_model(), 60.0).has_value());
}

TEST(Spot, HitTimeIsTheSpokenFrame) {
  auto frames = frames_for("taylor", 6.0);
  auto hit = spot(frames, taylor_model(), 60.0);
  ASSERT_TRUE(hit.has_value());
  EXPECT_NEAR(hit->time_s, 6.0, 1e-9);
}

TEST(Spot, RespectsUptoCutoff) {
  auto frames = frames_for("taylor", 6.0);
  EXPECT_FALSE(spot(frames, taylor_model(), 6.0).has_value());
  EXPECT_TRUE(spot(frames, taylor_model(), 6.1).has_value());
}

TEST(Spot, MultiWordNamesNeedConsecutiveTokens) {
  NameModel model;
  model.names = {"taylor smith"};
  model.validate();
  auto good = frames_for("please connect me to taylor smith now");
  ASSERT_TRUE(spot(good, model, 60.0).has_value());
  EXPECT_EQ(spot(good, model, 60.0)->matched_text, "taylor smith");
  auto split = frames_for("taylor is not here but smith is");
  EXPECT_FALSE(spot(split, model, 60.0).has_value());
}

TEST(Spot, MonotoneInUpto) {
  std::mt19937 rng(5);
  const std::vector<std::string> vocab{"hello", "please", "taylor", "now",
                                       "call",  "friend", "smith"};
  for (int trial = 0; trial < 30; ++trial) {
    std::string text;
    for (int w = 0; w < 12; ++w) text += vocab[rng() % vocab.size()] + " ";
    auto frames = frames_for(text);
    auto model = taylor_model();
    auto at_5 = spot(frames, model, 5.0);
    if (at_5) {
      for (double upto : {6.0, 10.0, 30.0}) {
        auto later = spot(frames, model, upto);
        ASSERT_TRUE(later.has_value());
        EXPECT_EQ(*later, *at_5);
      }
    }
  }
}

TEST(Spot, CommonNameEnumerationDoesHit) {
  // A recording that walks through popular names defeats a name challenge
  // when the real name is on its list; the harness asserts the weakness
  // instead of hiding it.
  auto frames = frames_for("is this john mary taylor robert susan");
  auto hit = spot(frames, taylor_model(), 60.0);
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(hit->name, "taylor");
}

TEST(Spot, MissDrawsAreDeterministicPerOccurrence) {
  const double p = 0.5;
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    for (size_t pos : {0u, 1u, 7u}) {
      const bool first = occurrence_missed(seed, pos, 0, p);
      for (int i = 0; i < 5; ++i) {
        EXPECT_EQ(occurrence_missed(seed, pos, 0, p), first);
      }
    }
  }
  EXPECT_FALSE(occurrence_missed(9, 0, 0, 0.0));
}

TEST(Spot, SuppressedOccurrenceDoesNotBlockLaterOne) {
  // Find a seed whose draw misses position 0 but not position 1.
  uint64_t seed = 0;
  for (uint64_t candidate = 0; candidate < 1000; ++candidate) {
    if (occurrence_missed(candidate, 0, 0, 0.5) &&
        !occurrence_missed(candidate, 1, 0, 0.5)) {
      seed = candidate;
      break;
    }
  }
  ASSERT_TRUE(occurrence_missed(seed, 0, 0, 0.5));

  std::vector<audio::Utterance> script{{"taylor", 0.0, 2.5, 0.0},
                                       {"taylor", 2.0, 2.5, 0.0}};
  auto frames = audio::render_utterances(script, 4.0);
  NameModel model = taylor_model();
  model.miss_probability = 0.5;
  auto hit = spot(frames, model, 60.0, seed);
  ASSERT_TRUE(hit.has_value());
  EXPECT_NEAR(hit->time_s, 2.0, 1e-9);  // second occurrence heard

  // With p = 0 the first occurrence wins regardless of seed.
  model.miss_probability = 0.0;
  EXPECT_NEAR(spot(frames, model, 60.0, seed)->time_s, 0.0, 1e-9);
}

TEST(Model, ValidationRules) {
  NameModel empty;
  EXPECT_THROW(empty.validate(), std::invalid_argument);

  NameModel blank;
  blank.names = {"!!"};
  EXPECT_THROW(blank.validate(), std::invalid_argument);

  NameModel long_name;
  long_name.names = {"one two three four"};
  EXPECT_THROW(long_name.validate(), std::invalid_argument);

  NameModel bad_p;
  bad_p.names = {"taylor"};
  bad_p.miss_probability = 1.0;
  EXPECT_THROW(bad_p.validate(), std::invalid_argument);

  NameModel ok;
  ok.names = {"Taylor", "Taylor Smith?", "taylor"};
  ok.validate();
  EXPECT_EQ(ok.names, (std::vector<std::string>{"taylor", "taylor smith"}));
}

}  // namespace
}  // namespace ringgate::kws
