#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "textscape/ingest.hpp"

namespace textscape {

struct ConfidenceBand {
  double lo = 0.0;
  double hi = 1.0;
};

struct ConfusionEntry {
  LabelId gold;
  LabelId pred;
  int frequency = 0;
  std::vector<std::string> sample_ids;

  bool operator==(const ConfusionEntry&) const = default;
};

enum class ConfusionSortKey { frequency, gold, pred };

ConfusionSortKey parse_confusion_sort_key(std::string_view name);

/// One entry per (gold, pred) error pair among samples inside `band`.
/// Returned sorted by frequency.
std::vector<ConfusionEntry> confusion_table(const Dataset& dataset,
                                            const std::optional<ConfidenceBand>& band = std::nullopt);

/// Hierarchical sort: the secondary key orders entries within groups of the
/// primary key; remaining ties fall back to (gold, pred) ascending. Frequency
/// sorts descending, labels ascending.
void sort_confusions(std::vector<ConfusionEntry>& entries, ConfusionSortKey primary,
                     std::optional<ConfusionSortKey> secondary = std::nullopt);

struct LabelShare {
  LabelId label;
  int count = 0;
  double share = 0.0;
};

/// Per-label shares of all false negatives (by gold label) and of all false
/// positives (by predicted label). Both lists cover label_set() in order.
struct ErrorShares {
  bool has_errors = false;
  int total_errors = 0;
  std::vector<LabelShare> false_negatives;
  std::vector<LabelShare> false_positives;
};

ErrorShares error_shares(const Dataset& dataset);

struct LabelPrototype {
  LabelId label;
  Eigen::VectorXd vector;
  int support = 0;
};

/// Mean sample embedding per gold label, for every label in label_set().
/// Throws Errc::unknown_label when a label has no gold samples.
std::vector<LabelPrototype> label_prototypes(const Dataset& dataset);

/// Prototypes for the labels that do have gold samples.
std::vector<LabelPrototype> available_label_prototypes(const Dataset& dataset);

struct LabelCluster {
  int id = 0;
  std::vector<LabelId> members;
  int color_index = 0;
};

inline constexpr double kDefaultClusterCut = 0.5;

/// Fixed palette cycled by color_index.
const std::array<const char*, 20>& cluster_palette();

double cosine_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Average-linkage agglomeration on cosine distance, merging while the
/// closest linkage is below `cut`. Clusters are numbered by their smallest
/// member label.
std::vector<LabelCluster> cluster_labels(const std::vector<LabelPrototype>& prototypes,
                                         double cut = kDefaultClusterCut);

/// cluster_labels over `prototypes`, plus singleton clusters for labels of
/// label_set() that have no prototype, renumbered so the result partitions
/// label_set().
std::vector<LabelCluster> cluster_label_set(const Dataset& dataset,
                                            const std::vector<LabelPrototype>& prototypes,
                                            double cut = kDefaultClusterCut);

struct SampleFilter {
  bool errors_only = false;
  std::optional<ConfidenceBand> confidence;
  // Matches samples whose gold or predicted label is in the set.
  std::optional<std::set<LabelId>> labels;
};

void validate(const SampleFilter& filter);

/// Sorted indices of samples satisfying every predicate.
std::vector<std::size_t> filter_samples(const Dataset& dataset, const SampleFilter& filter);

}  // namespace textscape
