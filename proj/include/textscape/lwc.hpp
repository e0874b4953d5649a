#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "textscape/geometry.hpp"
#include "textscape/ingest.hpp"

namespace textscape {

/// Every word occurrence mapped to the position of the sample it occurs in.
/// Positions live in an arbitrary-dimensional space: the projected layout by
/// default, or the original embedding space.
class OccurrenceIndex {
 public:
  using Occurrences = std::map<std::string, std::vector<Eigen::Index>>;

  OccurrenceIndex() = default;
  /// `space` holds one row per indexed sample; occurrence lists refer to its rows.
  OccurrenceIndex(Eigen::MatrixXd space, std::vector<std::size_t> sample_indices,
                  Occurrences occurrences, std::set<std::string> stopwords = {});

  const Eigen::MatrixXd& space() const { return space_; }
  Eigen::Index space_dim() const { return space_.cols(); }
  /// Dataset index of each row of space().
  const std::vector<std::size_t>& sample_indices() const { return sample_indices_; }
  const Occurrences& occurrences() const { return occurrences_; }
  const std::set<std::string>& stopwords() const { return stopwords_; }

  /// Occurrence positions of `word` (F x space_dim); empty if absent.
  Eigen::MatrixXd positions(const std::string& word) const;
  std::size_t total_occurrences() const;
  bool empty() const { return occurrences_.empty(); }

  /// q-quantile of the distances of every indexed sample from their
  /// geometric median. Falls back to 1 when that spread is zero.
  double global_scale(double quantile) const;

 private:
  Eigen::MatrixXd space_;
  std::vector<std::size_t> sample_indices_;
  Occurrences occurrences_;
  std::set<std::string> stopwords_;
};

struct LwcParams {
  int freq_threshold = 20;
  double locality_max = 0.5;
  bool ignore_stopwords = true;
  double locality_quantile = 0.8;
};

void validate(const LwcParams& params);

struct LocalWord {
  std::string word;
  Eigen::VectorXd position;
  int frequency = 0;
  double locality = 0.0;
  double scale_hint = 0.0;
};

/// Indexes normalized tokens of the samples inside `region` (all samples when
/// omitted) at their layout positions. Stopwords are kept in the index.
OccurrenceIndex build_index(const Dataset& dataset, const ProjectedLayout& layout,
                            const std::optional<RegionSelector>& region = std::nullopt);

/// Same, over an explicit space (one row per dataset sample) restricted to
/// `subset` (sorted dataset indices).
OccurrenceIndex build_index(const Dataset& dataset, const Eigen::MatrixXd& space,
                            const std::vector<std::size_t>& subset);

/// Nearest-rank quantile of `values` (copied); q in (0, 1].
double nearest_rank_quantile(std::vector<double> values, double quantile);

/// Spread of the occurrences around their geometric median, normalized by
/// `global_scale`. Rows of `occurrences` are points.
double locality_score(const Eigen::MatrixXd& occurrences, double global_scale,
                      double quantile = 0.8);

/// Words with frequency > T and locality <= lambda, placed at the geometric
/// median of their occurrences. Sorted by frequency desc, then word.
std::vector<LocalWord> local_words(const OccurrenceIndex& index, const LwcParams& params);

/// Runs local_words, maps every occurrence of each selected word to the
/// word's concepts, and filters the concepts with `concept_params`. The
/// stopword setting of `concept_params` is not applied to concept names.
std::vector<LocalWord> local_concepts(const OccurrenceIndex& index, const ConceptLexicon& lexicon,
                                      const LwcParams& params, const LwcParams& concept_params);

}  // namespace textscape
