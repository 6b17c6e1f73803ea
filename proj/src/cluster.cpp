#include "ringgate/cluster.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ringgate/text.hpp"

namespace ringgate::cluster {

DocTermMatrix build_tfidf(std::span<const stt::TranscriptDoc> corpus) {
  if (corpus.empty()) throw std::invalid_argument("empty corpus");

  DocTermMatrix m;
  m.docs.reserve(corpus.size());
  std::map<std::string, int> term_index;
  std::map<std::string, int> doc_freq;
  for (const auto& doc : corpus) {
    m.docs.push_back(doc.doc_id);
    std::set<std::string> seen;
    for (const auto& tok : doc.tokens) {
      term_index.emplace(tok, 0);
      if (seen.insert(tok).second) ++doc_freq[tok];
    }
  }
  m.vocab.reserve(term_index.size());
  for (auto& [term, idx] : term_index) {
    idx = static_cast<int>(m.vocab.size());
    m.vocab.push_back(term);
  }

  const auto n_docs = static_cast<Eigen::Index>(corpus.size());
  const auto n_terms = static_cast<Eigen::Index>(m.vocab.size());
  m.weights = Eigen::MatrixXd::Zero(n_docs, n_terms);

  const double n = static_cast<double>(corpus.size());
  for (Eigen::Index d = 0; d < n_docs; ++d) {
    const auto& doc = corpus[static_cast<size_t>(d)];
    if (doc.tokens.empty()) {
      m.zero_rows.push_back(static_cast<int>(d));
      continue;
    }
    std::map<std::string, int> counts;
    for (const auto& tok : doc.tokens) ++counts[tok];
    const double len = static_cast<double>(doc.tokens.size());
    for (const auto& [term, count] : counts) {
      const double tf = static_cast<double>(count) / len;
      const double idf = std::log(n / static_cast<double>(doc_freq[term]));
      m.weights(d, term_index[term]) = tf * idf;
    }
    const double norm = m.weights.row(d).norm();
    if (norm > 0) {
      m.weights.row(d) /= norm;
    } else {
      // Every term appears in every document (idf all zero).
      m.zero_rows.push_back(static_cast<int>(d));
    }
  }
  return m;
}

TopicSpace lsi_project(const DocTermMatrix& m, int k) {
  const Eigen::Index rows = m.weights.rows();
  const Eigen::Index cols = m.weights.cols();
  if (k < 1 || k > std::min(rows, cols)) {
    throw std::invalid_argument("topic count k out of range");
  }
  if (m.weights.isZero(0.0)) {
    throw std::invalid_argument("cannot project an all-zero matrix");
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.weights,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::MatrixXd u = svd.matrixU().leftCols(k);
  Eigen::MatrixXd v = svd.matrixV().leftCols(k);
  Eigen::VectorXd sigma = svd.singularValues().head(k);

  // Fix signs: largest-magnitude entry of each right singular vector is
  // positive (first index wins ties).
  for (int j = 0; j < k; ++j) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      if (std::abs(v(i, j)) > best_abs + 1e-15) {
        best_abs = std::abs(v(i, j));
        best = i;
      }
    }
    if (v(best, j) < 0) {
      v.col(j) = -v.col(j);
      u.col(j) = -u.col(j);
    }
  }

  TopicSpace space;
  space.k = k;
  space.singular_values = sigma;
  space.doc_vectors = u * sigma.asDiagonal();
  space.term_vectors = v;
  return space;
}

Eigen::MatrixXd reconstruct(const TopicSpace& space) {
  return space.doc_vectors * space.term_vectors.transpose();
}

Eigen::MatrixXd cosine_similarity(const TopicSpace& space) {
  const Eigen::Index n = space.doc_vectors.rows();
  Eigen::VectorXd norms(n);
  for (Eigen::Index i = 0; i < n; ++i) norms(i) = space.doc_vectors.row(i).norm();
  Eigen::MatrixXd sim = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (norms(i) == 0.0) continue;
    for (Eigen::Index j = i; j < n; ++j) {
      if (norms(j) == 0.0) continue;
      double s = space.doc_vectors.row(i).dot(space.doc_vectors.row(j)) /
                 (norms(i) * norms(j));
      s = std::clamp(s, -1.0, 1.0);
      sim(i, j) = s;
      sim(j, i) = s;
    }
  }
  return sim;
}

Eigen::MatrixXd to_distance(const Eigen::MatrixXd& similarity) {
  Eigen::MatrixXd dist(similarity.rows(), similarity.cols());
  for (Eigen::Index i = 0; i < similarity.rows(); ++i) {
    for (Eigen::Index j = 0; j < similarity.cols(); ++j) {
      const double s = similarity(i, j);
      if (s < -1.0 - 1e-9 || s > 1.0 + 1e-9) {
        throw std::invalid_argument("similarity outside [-1, 1]");
      }
      dist(i, j) = std::clamp(1.0 - s, 0.0, 2.0);
    }
  }
  return dist;
}

ClusterAssignment dbscan(const Eigen::MatrixXd& dist, double eps, int min_pts) {
  const Eigen::Index n = dist.rows();
  if (dist.cols() != n) throw std::invalid_argument("distance matrix not square");
  if (eps <= 0) throw std::invalid_argument("eps must be positive");
  if (min_pts < 1) throw std::invalid_argument("min_pts must be at least 1");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(dist(i, j) - dist(j, i)) > 1e-9) {
        throw std::invalid_argument("distance matrix not symmetric");
      }
    }
  }

  std::vector<std::vector<int>> neighbors(static_cast<size_t>(n));
  std::vector<bool> core(static_cast<size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto& nb = neighbors[static_cast<size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) {
      if (dist(i, j) <= eps) nb.push_back(static_cast<int>(j));
    }
    core[static_cast<size_t>(i)] = static_cast<int>(nb.size()) >= min_pts;
  }

  ClusterAssignment out;
  out.eps = eps;
  out.min_pts = min_pts;
  out.labels.assign(static_cast<size_t>(n), kNoise);
  int next_cluster = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto seed = static_cast<size_t>(i);
    if (!core[seed] || out.labels[seed] != kNoise) continue;
    const int cluster = next_cluster++;
    std::deque<int> queue{static_cast<int>(i)};
    out.labels[seed] = cluster;
    while (!queue.empty()) {
      const int p = queue.front();
      queue.pop_front();
      if (!core[static_cast<size_t>(p)]) continue;  // border: claimed, not expanded
      for (int q : neighbors[static_cast<size_t>(p)]) {
        if (out.labels[static_cast<size_t>(q)] == kNoise) {
          out.labels[static_cast<size_t>(q)] = cluster;
          queue.push_back(q);
        }
      }
    }
  }
  out.cluster_count = next_cluster;
  return out;
}

std::map<int, std::string> representatives(const ClusterAssignment& assignment,
                                           const Eigen::MatrixXd& dist,
                                           std::span<const std::string> doc_ids) {
  std::map<int, std::vector<int>> members;
  for (size_t i = 0; i < assignment.labels.size(); ++i) {
    if (assignment.labels[i] != kNoise) {
      members[assignment.labels[i]].push_back(static_cast<int>(i));
    }
  }
  std::map<int, std::string> out;
  for (const auto& [cluster, idx] : members) {
    int best = idx.front();
    double best_sum = std::numeric_limits<double>::infinity();
    for (int i : idx) {
      double sum = 0.0;
      for (int j : idx) sum += dist(i, j);
      const bool better =
          sum < best_sum - 1e-12 ||
          (std::abs(sum - best_sum) <= 1e-12 &&
           doc_ids[static_cast<size_t>(i)] < doc_ids[static_cast<size_t>(best)]);
      if (better) {
        best_sum = std::min(sum, best_sum);
        best = i;
      }
    }
    out[cluster] = doc_ids[static_cast<size_t>(best)];
  }
  return out;
}

std::vector<double> k_distances(const Eigen::MatrixXd& dist, int min_pts) {
  const Eigen::Index n = dist.rows();
  if (min_pts < 1 || min_pts > n) {
    throw std::invalid_argument("min_pts out of range for k-distance curve");
  }
  std::vector<double> out;
  out.reserve(static_cast<size_t>(n));
  std::vector<double> row(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) row[static_cast<size_t>(j)] = dist(i, j);
    std::sort(row.begin(), row.end());
    // row[0] is the self-distance; min_pts counts the point itself.
    out.push_back(row[static_cast<size_t>(min_pts - 1)]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double elbow_eps(const Eigen::MatrixXd& dist, int min_pts) {
  auto curve = k_distances(dist, min_pts);
  if (curve.size() < 2) return curve.empty() ? 0.0 : curve.front();
  size_t best = 0;
  double best_gap = -1.0;
  for (size_t i = 0; i + 1 < curve.size(); ++i) {
    const double gap = curve[i + 1] - curve[i];
    if (gap > best_gap) {
      best_gap = gap;
      best = i;
    }
  }
  return (curve[best] + curve[best + 1]) / 2.0;
}

std::set<std::string> load_stopwords(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open stopword file " + file.string());
  std::set<std::string> out;
  std::string word;
  while (in >> word) {
    for (const auto& tok : normalize_tokens(word)) out.insert(tok);
  }
  return out;
}

std::vector<stt::TranscriptDoc> load_corpus(const std::filesystem::path& dir,
                                            const std::set<std::string>& stopwords) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error("corpus directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) {
    return a.stem().string() < b.stem().string();
  });

  std::vector<stt::TranscriptDoc> corpus;
  corpus.reserve(files.size());
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    stt::TranscriptDoc doc;
    doc.doc_id = file.stem().string();
    doc.source = stt::TranscriptDoc::Source::CorpusFile;
    for (auto& tok : normalize_tokens(buf.str())) {
      if (!stopwords.contains(tok)) doc.tokens.push_back(std::move(tok));
    }
    corpus.push_back(std::move(doc));
  }
  return corpus;
}

}  // namespace ringgate::cluster
