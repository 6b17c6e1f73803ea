#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ringgate/net.hpp"
#include "ringgate/screening.hpp"

namespace ringgate::harness {

// One scripted caller. Reactive callers behave like live humans: they
// go silent while a prompt is playing and for half a second afterwards.
// Non-reactive callers play straight through, like a recording.
struct Scenario {
  std::string scenario_id;
  wire::CallerId caller_id;
  std::vector<audio::Utterance> script;
  bool reactive = false;
  std::optional<screen::ScreeningOutcome::Disposition> expected;
  std::optional<screen::LabelBasis> expected_label_basis;
  std::optional<double> hangup_at_s;
};

// Scenario file: {"scenarios": [{"id", "caller_id", "reactive", "script":
// [{"text", "offset_s", "rate_wps"?, "trailing_pause_s"?}], "expected",
// "expected_label_basis"?, "hangup_at_s"?}, ...]}. Unknown fields are
// rejected.
std::vector<Scenario> load_scenarios(const std::filesystem::path& path);
std::vector<Scenario> parse_scenarios(const std::string& json_text,
                                      const std::string& origin);

struct ScenarioRow {
  std::string scenario_id;
  uint64_t session_id = 0;
  std::optional<screen::ScreeningOutcome::Disposition> expected;
  std::optional<screen::LabelBasis> expected_label_basis;
  screen::ScreeningOutcome::Disposition actual =
      screen::ScreeningOutcome::Disposition::BlockedRobocall;
  screen::LabelBasis label_basis = screen::LabelBasis::None;
  double hit_s = -1.0;
  double ring_s = -1.0;
  double reminder_s = -1.0;
  double hangup_s = -1.0;
  bool matched = true;
};

struct RunReport {
  std::vector<ScenarioRow> rows;  // sorted by scenario_id
  int mismatches = 0;

  // Aggregates; -1 when the denominator is empty.
  double blocked_robocall_rate = -1.0;  // expected robocalls actually blocked
  double blocked_rate = -1.0;           // all rows actually blocked
  double label_accuracy = -1.0;         // expected blocked labels matched exactly
  double forward_correctness = -1.0;    // expected forwards actually forwarded
  int false_block_count = 0;            // expected pass/forward but blocked

  void recompute();
  bool all_matched() const { return mismatches == 0; }
};

// Detailed result of one simulated call, for tests and debugging.
struct CallRun {
  ScenarioRow row;
  screen::ScreeningOutcome outcome;
  screen::TimingTrace trace;
  std::vector<screen::CalleeEvent> events;
  size_t caller_audio_sent = 0;
  size_t caller_prompts_seen = 0;
  std::string caller_end_reason;
};

// Runs one scenario in an isolated world (fresh clock, broker, handler).
// first_session_id seeds the broker so persisted artifacts from a multi-
// scenario run do not collide.
CallRun run_scenario_call(const Scenario& scenario,
                          const net::IncomingCallHandler::Config& config,
                          uint64_t first_session_id = 1);

// Executes every scenario in the file (sorted by scenario id) against the
// policy, persists recordings/transcripts/notifications plus report.tsv
// and summary.txt under out_dir, and returns the report. The optional
// seed overrides the policy seed.
RunReport run_scenarios(const std::filesystem::path& scenarios_path,
                        const std::filesystem::path& policy_path,
                        std::optional<uint64_t> seed,
                        const std::filesystem::path& out_dir);

// In-memory variant used by tests and by replay.
RunReport run_scenario_set(const std::vector<Scenario>& scenarios,
                           const screen::Policy& policy, uint64_t seed,
                           const std::filesystem::path& out_dir);

// Replays one representative transcript per cluster as a non-reactive
// recording at the default speaking rate.
RunReport replay_corpus(const std::filesystem::path& representatives_path,
                        const std::filesystem::path& corpus_dir,
                        const std::filesystem::path& policy_path,
                        const std::filesystem::path& out_dir);

// Corpus clustering command: writes clusters.tsv (doc \t label) and
// representatives.tsv (cluster \t doc) under out_dir.
struct ClusterRunStats {
  int documents = 0;
  int clusters = 0;
  int noise = 0;
};
ClusterRunStats cluster_cmd(const std::filesystem::path& corpus_dir, int k,
                            double eps, int min_pts,
                            const std::filesystem::path& out_dir,
                            const std::filesystem::path& stopwords_path = {});

// Re-renders summary.txt from an existing report.tsv.
RunReport rerender_report(const std::filesystem::path& out_dir);

// Report serialization (TSV + human summary).
void write_report(const RunReport& report, const std::filesystem::path& out_dir);
RunReport read_report_tsv(const std::filesystem::path& tsv_path);
std::string summarize(const RunReport& report);

}  // namespace ringgate::harness
