#include "ringgate/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ringgate/cluster.hpp"
#include "ringgate/text.hpp"

namespace ringgate::harness {

namespace {

using json = nlohmann::json;
using Disposition = screen::ScreeningOutcome::Disposition;

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::optional<screen::LabelBasis> basis_from_string(const std::string& name) {
  if (name == "none") return screen::LabelBasis::None;
  if (name == "silence_rule") return screen::LabelBasis::SilenceRule;
  if (name == "keyword_override") return screen::LabelBasis::KeywordOverride;
  return std::nullopt;
}

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.contains(it.key())) {
      throw std::runtime_error(where + ": unknown field \"" + it.key() + "\"");
    }
  }
}

double script_duration_s(const std::vector<audio::Utterance>& script) {
  double end = 0.0;
  for (const auto& u : script) {
    const auto words = normalize_tokens(u.text);
    const double span =
        static_cast<double>(audio::span_frames(words.size(), u.speaking_rate_wps)) *
        audio::kDefaultFrameMs / 1000.0;
    end = std::max(end, u.start_offset_s + span + u.trailing_pause_s);
  }
  return end;
}

std::string format_time(double t) {
  if (t < 0) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", t);
  return buf;
}

std::string format_rate(double r) {
  if (r < 0) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", r);
  return buf;
}

}  // namespace

std::vector<Scenario> parse_scenarios(const std::string& json_text,
                                      const std::string& origin) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(origin + ": " + e.what());
  }
  if (!root.is_object()) throw std::runtime_error(origin + ": expected an object");
  require_keys(root, {"scenarios"}, origin);
  if (!root.contains("scenarios") || !root["scenarios"].is_array()) {
    throw std::runtime_error(origin + ": missing \"scenarios\" array");
  }

  std::vector<Scenario> out;
  std::set<std::string> seen_ids;
  size_t index = 0;
  for (const auto& item : root["scenarios"]) {
    const std::string where = origin + ": scenario " + std::to_string(index);
    ++index;
    if (!item.is_object()) throw std::runtime_error(where + ": expected an object");
    require_keys(item,
                 {"id", "caller_id", "reactive", "script", "expected",
                  "expected_label_basis", "hangup_at_s"},
                 where);
    Scenario sc;
    if (!item.contains("id") || !item["id"].is_string()) {
      throw std::runtime_error(where + ": missing string \"id\"");
    }
    sc.scenario_id = item["id"].get<std::string>();
    if (sc.scenario_id.empty()) throw std::runtime_error(where + ": empty id");
    if (!seen_ids.insert(sc.scenario_id).second) {
      throw std::runtime_error(where + ": duplicate id \"" + sc.scenario_id + "\"");
    }
    if (!item.contains("caller_id") || !item["caller_id"].is_string()) {
      throw std::runtime_error(where + ": missing string \"caller_id\"");
    }
    try {
      sc.caller_id = wire::CallerId::parse(item["caller_id"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(where + ": " + e.what());
    }
    if (item.contains("reactive")) {
      if (!item["reactive"].is_boolean()) {
        throw std::runtime_error(where + ": \"reactive\" must be a boolean");
      }
      sc.reactive = item["reactive"].get<bool>();
    }
    if (!item.contains("script") || !item["script"].is_array()) {
      throw std::runtime_error(where + ": missing \"script\" array");
    }
    size_t u_index = 0;
    for (const auto& ju : item["script"]) {
      const std::string uwhere = where + ", utterance " + std::to_string(u_index);
      ++u_index;
      if (!ju.is_object()) throw std::runtime_error(uwhere + ": expected an object");
      require_keys(ju, {"text", "offset_s", "rate_wps", "trailing_pause_s"}, uwhere);
      audio::Utterance u;
      if (!ju.contains("text") || !ju["text"].is_string()) {
        throw std::runtime_error(uwhere + ": missing string \"text\"");
      }
      u.text = ju["text"].get<std::string>();
      if (!ju.contains("offset_s") || !ju["offset_s"].is_number()) {
        throw std::runtime_error(uwhere + ": missing number \"offset_s\"");
      }
      u.start_offset_s = ju["offset_s"].get<double>();
      if (ju.contains("rate_wps")) u.speaking_rate_wps = ju["rate_wps"].get<double>();
      if (ju.contains("trailing_pause_s")) {
        u.trailing_pause_s = ju["trailing_pause_s"].get<double>();
      }
      sc.script.push_back(std::move(u));
    }
    if (!item.contains("expected") || !item["expected"].is_string()) {
      throw std::runtime_error(where + ": missing string \"expected\"");
    }
    auto expected = screen::disposition_from_string(item["expected"].get<std::string>());
    if (!expected) {
      throw std::runtime_error(where + ": unknown expected disposition \"" +
                               item["expected"].get<std::string>() + "\"");
    }
    sc.expected = expected;
    if (item.contains("expected_label_basis")) {
      auto basis = basis_from_string(item["expected_label_basis"].get<std::string>());
      if (!basis) {
        throw std::runtime_error(where + ": unknown expected_label_basis");
      }
      sc.expected_label_basis = basis;
    }
    if (item.contains("hangup_at_s")) {
      if (!item["hangup_at_s"].is_number()) {
        throw std::runtime_error(where + ": \"hangup_at_s\" must be a number");
      }
      sc.hangup_at_s = item["hangup_at_s"].get<double>();
    }
    out.push_back(std::move(sc));
  }
  return out;
}

std::vector<Scenario> load_scenarios(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenarios(buf.str(), path.filename().string());
}

CallRun run_scenario_call(const Scenario& scenario,
                          const net::IncomingCallHandler::Config& config,
                          uint64_t first_session_id) {
  net::VirtualClock clock;
  net::Broker broker(clock, first_session_id);
  net::IncomingCallHandler handler(broker, "callee", config);
  net::PhoneCallDialer dialer(broker);

  auto& call = dialer.place_call("callee", scenario.caller_id, scenario.script,
                                 script_duration_s(scenario.script));

  const uint64_t hangup_tick = scenario.hangup_at_s
                                   ? clock.to_ticks(*scenario.hangup_at_s)
                                   : UINT64_MAX;
  size_t prompts_reacted = 0;

  constexpr uint64_t kMaxTicks = 3000;  // 5 simulated minutes; a stuck call is a bug
  uint64_t tick = 0;
  for (; tick < kMaxTicks; ++tick) {
    handler.emit_tick();
    call.poll();
    const uint64_t now = clock.ticks();
    if (!call.terminated()) {
      if (now >= hangup_tick) {
        call.request_hangup();
      } else {
        if (scenario.reactive) {
          const auto& prompts = call.prompts();
          for (; prompts_reacted < prompts.size(); ++prompts_reacted) {
            // Stay quiet while the assistant talks, plus 0.5 s to react.
            call.mute_until(prompts[prompts_reacted].first + 6);
          }
        }
        if (call.prompts().empty() && call.phase() == net::SessionPhase::Connected &&
            now >= call.connect_tick() + call.script_frames() + 10) {
          // Direct (unscreened) call: the caller ends it after the script.
          call.request_hangup();
        } else {
          call.step_send();
        }
      }
    }
    handler.ingest_tick();
    clock.advance();
    if (call.terminated() && handler.all_terminated()) break;
  }
  if (tick == kMaxTicks) {
    throw std::logic_error("scenario " + scenario.scenario_id +
                           " did not terminate");
  }

  const auto& results = handler.results();
  if (results.size() != 1) {
    throw std::logic_error("scenario " + scenario.scenario_id +
                           " produced " + std::to_string(results.size()) +
                           " sessions");
  }
  const auto& result = results.begin()->second;

  CallRun run;
  run.outcome = result.outcome;
  run.trace = result.trace;
  run.events = handler.events();
  run.caller_audio_sent = call.audio_sent();
  run.caller_prompts_seen = call.prompts().size();
  run.caller_end_reason = call.end_reason();

  ScenarioRow& row = run.row;
  row.scenario_id = scenario.scenario_id;
  row.session_id = result.session_id;
  row.expected = scenario.expected;
  row.expected_label_basis = scenario.expected_label_basis;
  row.actual = result.outcome.disposition;
  row.label_basis = result.outcome.label_basis;
  row.hit_s = result.trace.hit_s;
  row.ring_s = result.trace.ring_s;
  row.reminder_s = result.trace.reminder_start_s;
  row.hangup_s = result.trace.hangup_s;
  if (row.ring_s < 0) {
    for (const auto& ev : run.events) {
      if (ev.kind == screen::CalleeEvent::Kind::Ring) {
        row.ring_s = ev.time_s;
        break;
      }
    }
  }
  row.matched = true;
  if (row.expected && row.actual != *row.expected) row.matched = false;
  if (row.expected_label_basis && row.label_basis != *row.expected_label_basis) {
    row.matched = false;
  }
  return run;
}

void RunReport::recompute() {
  mismatches = 0;
  int n_blocked = 0;
  int exp_robocall = 0, exp_robocall_blocked = 0;
  int exp_label = 0, exp_label_ok = 0;
  int exp_forward = 0, exp_forward_ok = 0;
  false_block_count = 0;
  for (const auto& row : rows) {
    if (!row.matched) ++mismatches;
    const bool blocked = row.actual == Disposition::BlockedHuman ||
                         row.actual == Disposition::BlockedRobocall;
    if (blocked) ++n_blocked;
    if (row.expected) {
      if (*row.expected == Disposition::BlockedRobocall) {
        ++exp_robocall;
        if (blocked) ++exp_robocall_blocked;
      }
      if (*row.expected == Disposition::BlockedRobocall ||
          *row.expected == Disposition::BlockedHuman) {
        ++exp_label;
        if (row.actual == *row.expected) ++exp_label_ok;
      }
      if (*row.expected == Disposition::Forwarded) {
        ++exp_forward;
        if (row.actual == Disposition::Forwarded) ++exp_forward_ok;
      }
      if ((*row.expected == Disposition::Forwarded ||
           *row.expected == Disposition::WhitelistPass) &&
          blocked) {
        ++false_block_count;
      }
    }
  }
  blocked_rate = rows.empty() ? -1.0
                              : static_cast<double>(n_blocked) /
                                    static_cast<double>(rows.size());
  blocked_robocall_rate =
      exp_robocall == 0 ? -1.0
                        : static_cast<double>(exp_robocall_blocked) /
                              static_cast<double>(exp_robocall);
  label_accuracy = exp_label == 0 ? -1.0
                                  : static_cast<double>(exp_label_ok) /
                                        static_cast<double>(exp_label);
  forward_correctness = exp_forward == 0
                            ? -1.0
                            : static_cast<double>(exp_forward_ok) /
                                  static_cast<double>(exp_forward);
}

RunReport run_scenario_set(const std::vector<Scenario>& scenarios,
                           const screen::Policy& policy, uint64_t seed,
                           const std::filesystem::path& out_dir) {
  std::vector<const Scenario*> ordered;
  ordered.reserve(scenarios.size());
  std::set<std::string> ids;
  for (const auto& sc : scenarios) {
    if (!ids.insert(sc.scenario_id).second) {
      throw std::runtime_error("duplicate scenario id " + sc.scenario_id);
    }
    ordered.push_back(&sc);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const Scenario* a, const Scenario* b) {
              return a->scenario_id < b->scenario_id;
            });

  // The output tree is regenerated from scratch so reruns are comparable.
  std::filesystem::remove_all(out_dir);
  screen::OutcomeStore store(out_dir);

  RunReport report;
  uint64_t next_session = 1;
  for (const Scenario* sc : ordered) {
    net::IncomingCallHandler::Config config;
    config.lists = policy.lists;
    config.names = policy.names;
    config.timers = policy.timers;
    config.vad = policy.vad;
    config.noise = policy.noise;
    config.seed = splitmix64(seed ^ fnv1a(sc->scenario_id));
    config.store = &store;
    CallRun run = run_scenario_call(*sc, config, next_session);
    ++next_session;
    report.rows.push_back(std::move(run.row));
  }
  report.recompute();
  write_report(report, out_dir);
  return report;
}

RunReport run_scenarios(const std::filesystem::path& scenarios_path,
                        const std::filesystem::path& policy_path,
                        std::optional<uint64_t> seed,
                        const std::filesystem::path& out_dir) {
  const screen::Policy policy = screen::load_policy(policy_path);
  const auto scenarios = load_scenarios(scenarios_path);
  return run_scenario_set(scenarios, policy, seed.value_or(policy.seed), out_dir);
}

RunReport replay_corpus(const std::filesystem::path& representatives_path,
                        const std::filesystem::path& corpus_dir,
                        const std::filesystem::path& policy_path,
                        const std::filesystem::path& out_dir) {
  const screen::Policy policy = screen::load_policy(policy_path);
  const auto corpus = cluster::load_corpus(corpus_dir, {});
  std::map<std::string, const stt::TranscriptDoc*> by_id;
  for (const auto& doc : corpus) by_id[doc.doc_id] = &doc;

  std::ifstream in(representatives_path);
  if (!in) {
    throw std::runtime_error("cannot open representatives file " +
                             representatives_path.string());
  }
  std::vector<std::string> rep_docs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cluster_id, doc_id;
    if (!(fields >> cluster_id >> doc_id)) {
      throw std::runtime_error(representatives_path.string() + ":" +
                               std::to_string(line_no) + ": expected cluster and doc id");
    }
    rep_docs.push_back(doc_id);
  }
  std::sort(rep_docs.begin(), rep_docs.end());

  std::vector<Scenario> scenarios;
  int index = 0;
  for (const auto& doc_id : rep_docs) {
    auto it = by_id.find(doc_id);
    if (it == by_id.end()) {
      throw std::runtime_error("representative doc \"" + doc_id +
                               "\" not found in corpus");
    }
    Scenario sc;
    sc.scenario_id = doc_id;
    char digits[16];
    std::snprintf(digits, sizeof(digits), "9%09d", index++);
    sc.caller_id = wire::CallerId{digits};
    sc.reactive = false;  // a recording plays straight through
    audio::Utterance u;
    u.text = join_tokens(it->second->tokens);
    u.start_offset_s = 0.0;
    sc.script.push_back(std::move(u));
    scenarios.push_back(std::move(sc));
  }
  return run_scenario_set(scenarios, policy, policy.seed, out_dir);
}

ClusterRunStats cluster_cmd(const std::filesystem::path& corpus_dir, int k,
                            double eps, int min_pts,
                            const std::filesystem::path& out_dir,
                            const std::filesystem::path& stopwords_path) {
  std::set<std::string> stopwords;
  if (!stopwords_path.empty()) stopwords = cluster::load_stopwords(stopwords_path);
  const auto corpus = cluster::load_corpus(corpus_dir, stopwords);
  const auto matrix = cluster::build_tfidf(corpus);
  const auto space = cluster::lsi_project(matrix, k);
  const auto sim = cluster::cosine_similarity(space);
  const auto dist = cluster::to_distance(sim);
  const auto assignment = cluster::dbscan(dist, eps, min_pts);
  const auto reps = cluster::representatives(assignment, dist, matrix.docs);

  std::filesystem::create_directories(out_dir);
  {
    std::ofstream out(out_dir / "clusters.tsv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write clusters.tsv");
    for (size_t i = 0; i < matrix.docs.size(); ++i) {
      out << matrix.docs[i] << '\t' << assignment.labels[i] << '\n';
    }
  }
  {
    std::ofstream out(out_dir / "representatives.tsv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write representatives.tsv");
    for (const auto& [cluster_id, doc_id] : reps) {
      out << cluster_id << '\t' << doc_id << '\n';
    }
  }

  ClusterRunStats stats;
  stats.documents = static_cast<int>(matrix.docs.size());
  stats.clusters = assignment.cluster_count;
  stats.noise = static_cast<int>(
      std::count(assignment.labels.begin(), assignment.labels.end(), cluster::kNoise));
  return stats;
}

void write_report(const RunReport& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ofstream tsv(out_dir / "report.tsv", std::ios::binary);
  if (!tsv) throw std::runtime_error("cannot write report.tsv");
  tsv << "scenario_id\tsession_id\texpected\texpected_basis\tactual\t"
         "label_basis\thit_s\tring_s\treminder_s\thangup_s\tmatch\n";
  for (const auto& row : report.rows) {
    tsv << row.scenario_id << '\t' << row.session_id << '\t'
        << (row.expected ? to_string(*row.expected) : "-") << '\t'
        << (row.expected_label_basis ? to_string(*row.expected_label_basis) : "-")
        << '\t' << to_string(row.actual) << '\t' << to_string(row.label_basis)
        << '\t' << format_time(row.hit_s) << '\t' << format_time(row.ring_s)
        << '\t' << format_time(row.reminder_s) << '\t'
        << format_time(row.hangup_s) << '\t' << (row.matched ? "ok" : "MISMATCH")
        << '\n';
  }
  std::ofstream summary(out_dir / "summary.txt", std::ios::binary);
  if (!summary) throw std::runtime_error("cannot write summary.txt");
  summary << summarize(report);
}

RunReport read_report_tsv(const std::filesystem::path& tsv_path) {
  std::ifstream in(tsv_path);
  if (!in) throw std::runtime_error("cannot open " + tsv_path.string());
  RunReport report;
  std::string line;
  bool header = true;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::istringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) cols.push_back(col);
    if (cols.size() != 11) {
      throw std::runtime_error(tsv_path.string() + ":" + std::to_string(line_no) +
                               ": expected 11 columns");
    }
    ScenarioRow row;
    row.scenario_id = cols[0];
    row.session_id = std::stoull(cols[1]);
    if (cols[2] != "-") {
      auto d = screen::disposition_from_string(cols[2]);
      if (!d) throw std::runtime_error("bad disposition " + cols[2]);
      row.expected = d;
    }
    if (cols[3] != "-") row.expected_label_basis = basis_from_string(cols[3]);
    auto actual = screen::disposition_from_string(cols[4]);
    if (!actual) throw std::runtime_error("bad disposition " + cols[4]);
    row.actual = *actual;
    auto basis = basis_from_string(cols[5]);
    if (!basis) throw std::runtime_error("bad label basis " + cols[5]);
    row.label_basis = *basis;
    auto parse_time = [](const std::string& s) {
      return s == "-" ? -1.0 : std::stod(s);
    };
    row.hit_s = parse_time(cols[6]);
    row.ring_s = parse_time(cols[7]);
    row.reminder_s = parse_time(cols[8]);
    row.hangup_s = parse_time(cols[9]);
    row.matched = cols[10] == "ok";
    report.rows.push_back(std::move(row));
  }
  report.recompute();
  return report;
}

RunReport rerender_report(const std::filesystem::path& out_dir) {
  RunReport report = read_report_tsv(out_dir / "report.tsv");
  std::ofstream summary(out_dir / "summary.txt", std::ios::binary);
  if (!summary) throw std::runtime_error("cannot write summary.txt");
  summary << summarize(report);
  return report;
}

std::string summarize(const RunReport& report) {
  std::map<Disposition, int> counts;
  for (const auto& row : report.rows) ++counts[row.actual];
  std::ostringstream out;
  out << "scenarios\t" << report.rows.size() << '\n';
  out << "mismatches\t" << report.mismatches << '\n';
  for (auto d : {Disposition::Forwarded, Disposition::BlockedHuman,
                 Disposition::BlockedRobocall, Disposition::WhitelistPass,
                 Disposition::BlacklistDrop}) {
    out << "count_" << to_string(d) << '\t' << counts[d] << '\n';
  }
  out << "blocked_rate\t" << format_rate(report.blocked_rate) << '\n';
  out << "blocked_robocall_rate\t" << format_rate(report.blocked_robocall_rate)
      << '\n';
  out << "label_accuracy\t" << format_rate(report.label_accuracy) << '\n';
  out << "forward_correctness\t" << format_rate(report.forward_correctness)
      << '\n';
  out << "false_block_count\t" << report.false_block_count << '\n';
  return out.str();
}

}  // namespace ringgate::harness
