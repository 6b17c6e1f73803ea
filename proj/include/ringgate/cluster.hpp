#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ringgate/transcript.hpp"

namespace ringgate::cluster {

// Campaign discovery over a transcript corpus: TF-IDF weighting, rank-k
// topic projection, cosine distances, density clustering, one medoid
// representative per cluster. Everything is deterministic given the
// corpus and (k, eps, min_pts).

inline constexpr int kNoise = -1;

struct DocTermMatrix {
  std::vector<std::string> docs;    // ordered doc ids
  std::vector<std::string> vocab;   // ordered terms
  Eigen::MatrixXd weights;          // docs x terms, tf-idf, rows L2-normalized
  std::vector<int> zero_rows;       // empty or all-idf-zero documents
};

struct TopicSpace {
  int k = 0;
  Eigen::MatrixXd doc_vectors;        // docs x k (U_k * Sigma_k)
  Eigen::VectorXd singular_values;    // non-increasing
  Eigen::MatrixXd term_vectors;       // vocab x k (V_k), for reconstruction
};

struct ClusterAssignment {
  std::vector<int> labels;  // -1 noise, else 0..cluster_count-1
  double eps = 0.0;
  int min_pts = 0;
  int cluster_count = 0;
};

// tf = raw count / doc length, idf = ln(N / df), rows L2-normalized when
// nonzero. Throws std::invalid_argument on an empty corpus.
DocTermMatrix build_tfidf(std::span<const stt::TranscriptDoc> corpus);

// Rank-k truncated SVD of the weight matrix. Deterministic up to sign,
// fixed by making each right singular vector's largest-magnitude entry
// positive. Throws std::invalid_argument when k is out of range or the
// matrix is all-zero.
TopicSpace lsi_project(const DocTermMatrix& m, int k);

// Rank-k reconstruction U_k Sigma_k V_k^T (for verification).
Eigen::MatrixXd reconstruct(const TopicSpace& space);

// s_ij = <v_i, v_j> / (|v_i||v_j|); rows of zero norm get 0 everywhere,
// including the diagonal.
Eigen::MatrixXd cosine_similarity(const TopicSpace& space);

// d = 1 - s clamped to [0, 2]. Throws std::invalid_argument when a
// similarity is outside [-1, 1].
Eigen::MatrixXd to_distance(const Eigen::MatrixXd& similarity);

// Classic density clustering on a precomputed distance matrix. A point is
// core iff at least min_pts points (itself included) lie within eps;
// clusters are eps-connected components of core points plus their border
// points; everything else is noise. Cluster ids follow first-core-point
// scan order. Throws std::invalid_argument on an asymmetric matrix or bad
// parameters.
ClusterAssignment dbscan(const Eigen::MatrixXd& dist, double eps, int min_pts);

// Medoid of each cluster (minimum summed intra-cluster distance, ties
// broken by lexicographically smallest doc id).
std::map<int, std::string> representatives(const ClusterAssignment& assignment,
                                           const Eigen::MatrixXd& dist,
                                           std::span<const std::string> doc_ids);

// Sorted distance to the min_pts-th nearest neighbour of every point.
// The elbow rule for picking eps: take the largest consecutive gap in
// this curve and use the midpoint of that gap.
std::vector<double> k_distances(const Eigen::MatrixXd& dist, int min_pts);
double elbow_eps(const Eigen::MatrixXd& dist, int min_pts);

// Corpus loading: every *.txt under dir is one document (doc id =
// filename stem), tokenized with the canonical normalizer, stopwords
// removed. Documents are ordered by doc id.
std::vector<stt::TranscriptDoc> load_corpus(const std::filesystem::path& dir,
                                            const std::set<std::string>& stopwords);
std::set<std::string> load_stopwords(const std::filesystem::path& file);

}  // namespace ringgate::cluster
