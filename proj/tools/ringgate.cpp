// Command-line front end: screen scripted scenarios, replay clustered
// robocall corpora, run the clustering pipeline, re-render reports.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ringgate/cluster.hpp"
#include "ringgate/harness.hpp"

namespace {

void print_report(const ringgate::harness::RunReport& report) {
  std::cout << ringgate::harness::summarize(report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ringgate - deterministic call screening simulator"};
  app.require_subcommand(1);

  std::string policy_path, scenarios_path, out_dir = "out";
  std::optional<uint64_t> seed;

  auto* screen_cmd =
      app.add_subcommand("screen", "screen a scenario file against a policy");
  screen_cmd->add_option("--policy", policy_path, "policy file")->required();
  screen_cmd->add_option("--scenarios", scenarios_path, "scenario JSON file")
      ->required();
  screen_cmd->add_option("--seed", seed, "override the policy seed");
  screen_cmd->add_option("--out", out_dir, "output directory (replaced)");

  std::string reps_path, corpus_dir;
  auto* replay_cmd =
      app.add_subcommand("replay", "replay cluster representatives as robocalls");
  replay_cmd->add_option("--policy", policy_path, "policy file")->required();
  replay_cmd->add_option("--reps", reps_path, "representatives.tsv")->required();
  replay_cmd->add_option("--corpus", corpus_dir, "transcript directory")->required();
  replay_cmd->add_option("--out", out_dir, "output directory (replaced)");

  int k = 60;
  double eps = 0.4;
  int min_pts = 3;
  std::string stopwords_path;
  bool print_kdist = false;
  auto* cluster_sub = app.add_subcommand("cluster", "cluster a transcript corpus");
  cluster_sub->add_option("--corpus", corpus_dir, "transcript directory")->required();
  cluster_sub->add_option("--k", k, "topic count");
  cluster_sub->add_option("--eps", eps, "neighbourhood radius");
  cluster_sub->add_option("--minpts", min_pts, "density threshold");
  cluster_sub->add_option("--stopwords", stopwords_path, "stopword list file");
  cluster_sub->add_option("--out", out_dir, "output directory");
  cluster_sub->add_flag("--print-kdist", print_kdist,
                        "print the k-distance elbow suggestion for eps");

  auto* report_cmd =
      app.add_subcommand("report", "re-render aggregates from report.tsv");
  report_cmd->add_option("--out", out_dir, "directory holding report.tsv")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (screen_cmd->parsed()) {
      auto report =
          ringgate::harness::run_scenarios(scenarios_path, policy_path, seed, out_dir);
      print_report(report);
      return report.all_matched() ? 0 : 1;
    }
    if (replay_cmd->parsed()) {
      auto report =
          ringgate::harness::replay_corpus(reps_path, corpus_dir, policy_path, out_dir);
      print_report(report);
      return report.all_matched() ? 0 : 1;
    }
    if (cluster_sub->parsed()) {
      if (print_kdist) {
        std::set<std::string> stopwords;
        if (!stopwords_path.empty()) {
          stopwords = ringgate::cluster::load_stopwords(stopwords_path);
        }
        auto corpus = ringgate::cluster::load_corpus(corpus_dir, stopwords);
        auto matrix = ringgate::cluster::build_tfidf(corpus);
        auto space = ringgate::cluster::lsi_project(matrix, k);
        auto dist =
            ringgate::cluster::to_distance(ringgate::cluster::cosine_similarity(space));
        std::printf("suggested eps (k-distance elbow): %.4f\n",
                    ringgate::cluster::elbow_eps(dist, min_pts));
      }
      auto stats = ringgate::harness::cluster_cmd(corpus_dir, k, eps, min_pts,
                                                  out_dir, stopwords_path);
      std::printf("documents\t%d\nclusters\t%d\nnoise\t%d\n", stats.documents,
                  stats.clusters, stats.noise);
      return 0;
    }
    if (report_cmd->parsed()) {
      auto report = ringgate::harness::rerender_report(out_dir);
      print_report(report);
      return report.all_matched() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
