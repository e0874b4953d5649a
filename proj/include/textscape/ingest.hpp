#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "textscape/error.hpp"

namespace textscape {

using LabelId = std::string;

/// One classified text. Tokens are the model's own tokenization.
struct Sample {
  std::string id;
  std::string text;
  std::vector<std::string> tokens;
  LabelId gold_label;
  LabelId pred_label;
  double confidence = 0.0;
  std::optional<std::string> domain_tag;

  bool correct() const { return gold_label == pred_label; }

  bool operator==(const Sample&) const = default;
};

/// Sample-level and per-token embeddings. Rows are float32 on disk and
/// held as double in memory.
struct EmbeddingStore {
  std::optional<Eigen::MatrixXd> sample_matrix;
  std::vector<Eigen::MatrixXd> token_matrices;
  Eigen::Index dim = 0;
  // True when sample_matrix was mean-pooled from token_matrices rather than read.
  bool sample_matrix_derived = false;

  const Eigen::MatrixXd& samples() const;
};

/// Row i of the returned sample matrix is the mean of sample i's token rows.
EmbeddingStore derive_sample_embeddings(EmbeddingStore store);

class ConceptLexicon {
 public:
  using Map = std::map<std::string, std::set<std::string>>;

  ConceptLexicon() = default;
  explicit ConceptLexicon(Map entries);

  /// Empty set for unknown words.
  const std::set<std::string>& concepts(std::string_view word) const;
  const Map& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  bool operator==(const ConceptLexicon&) const = default;

 private:
  Map entries_;
};

/// Externally computed per-token scores keyed by (sample id, metric name).
class ExternalImportance {
 public:
  using Key = std::pair<std::string, std::string>;
  using Map = std::map<Key, std::vector<double>>;

  ExternalImportance() = default;
  explicit ExternalImportance(Map scores) : scores_(std::move(scores)) {}

  const std::vector<double>* find(std::string_view sample_id,
                                  std::string_view metric) const;
  std::vector<std::string> metrics_for(std::string_view sample_id) const;
  const Map& scores() const { return scores_; }

  bool operator==(const ExternalImportance&) const = default;

 private:
  Map scores_;
};

/// Immutable, validated corpus with embeddings and auxiliary resources.
class Dataset {
 public:
  /// Validates every invariant; throws textscape::Error on violation.
  Dataset(std::vector<Sample> samples, EmbeddingStore embeddings,
          ConceptLexicon lexicon, ExternalImportance external,
          std::set<std::string> stopwords);

  const std::vector<Sample>& samples() const { return samples_; }
  const Sample& sample(std::size_t index) const { return samples_.at(index); }
  std::size_t size() const { return samples_.size(); }

  /// Sorted distinct gold and predicted labels.
  const std::vector<LabelId>& label_set() const { return labels_; }
  bool has_label(std::string_view label) const;

  const EmbeddingStore& embeddings() const { return embeddings_; }
  const Eigen::MatrixXd& sample_embeddings() const { return embeddings_.samples(); }
  const Eigen::MatrixXd& token_embeddings(std::size_t index) const {
    return embeddings_.token_matrices.at(index);
  }

  const ConceptLexicon& lexicon() const { return lexicon_; }
  const ExternalImportance& external_importance() const { return external_; }
  const std::set<std::string>& stopwords() const { return stopwords_; }
  bool is_stopword(std::string_view word) const;

  std::optional<std::size_t> find(std::string_view sample_id) const;
  /// Throws Errc::sample_not_found.
  std::size_t index_of(std::string_view sample_id) const;

 private:
  std::vector<Sample> samples_;
  std::vector<LabelId> labels_;
  EmbeddingStore embeddings_;
  ConceptLexicon lexicon_;
  ExternalImportance external_;
  std::set<std::string> stopwords_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

/// Lowercases and strips leading/trailing Unicode punctuation. Internal
/// punctuation (hyphens, apostrophes) is kept. Empty results yield nullopt.
std::optional<std::string> normalize_word(std::string_view token);

const std::set<std::string>& default_stopwords();

struct CorpusPaths {
  std::filesystem::path corpus;
  std::optional<std::filesystem::path> sample_embeddings;
  std::filesystem::path token_embeddings;
  std::optional<std::filesystem::path> lexicon;
  std::optional<std::filesystem::path> importance;
  std::optional<std::filesystem::path> stopwords;
};

Dataset load_corpus(const CorpusPaths& paths);

// Individual readers; each throws textscape::Error naming the file and the
// offending line or byte offset.
std::vector<Sample> read_corpus(const std::filesystem::path& path);
Eigen::MatrixXd read_sample_embeddings(const std::filesystem::path& path);
std::vector<Eigen::MatrixXd> read_token_embeddings(const std::filesystem::path& path,
                                                   Eigen::Index* dim = nullptr);
ConceptLexicon read_lexicon(const std::filesystem::path& path);
ExternalImportance read_importance(const std::filesystem::path& path);
std::set<std::string> read_stopwords(const std::filesystem::path& path);

void write_corpus(const std::filesystem::path& path, const std::vector<Sample>& samples);
void write_sample_embeddings(const std::filesystem::path& path, const Eigen::MatrixXd& matrix);
void write_token_embeddings(const std::filesystem::path& path,
                            const std::vector<Eigen::MatrixXd>& matrices, Eigen::Index dim);
void write_lexicon(const std::filesystem::path& path, const ConceptLexicon& lexicon);
void write_importance(const std::filesystem::path& path, const ExternalImportance& importance);
void write_stopwords(const std::filesystem::path& path, const std::set<std::string>& words);

/// Writes every component of the dataset into `dir` with the standard file
/// names and returns the paths. Sample embeddings are written only when they
/// were read rather than derived.
CorpusPaths export_dataset(const Dataset& dataset, const std::filesystem::path& dir);

}  // namespace textscape
