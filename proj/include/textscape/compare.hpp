#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "textscape/geometry.hpp"
#include "textscape/ingest.hpp"
#include "textscape/labels.hpp"

namespace textscape {

enum class ErrorStatus { errors_only, correct_only };

/// Conjunction of predicates over one dataset; no predicates selects it all.
struct GroupSelector {
  std::string dataset_id;
  std::optional<std::set<LabelId>> gold_labels;
  std::optional<std::set<LabelId>> pred_labels;
  std::optional<RegionSelector> region;
  std::optional<ErrorStatus> error_status;
  std::optional<ConfidenceBand> confidence;
};

/// Sorted dataset indices; throws Errc::empty_group when nothing matches.
std::vector<std::size_t> resolve_group(const Dataset& dataset, const ProjectedLayout& layout,
                                       const GroupSelector& selector);

enum class ItemKind { word, concept_name, label, gold_label };

std::string to_string(ItemKind kind);
ItemKind parse_item_kind(std::string_view name);

using ItemCounts = std::map<std::string, long long>;

/// Occurrence counts of items in the given samples. Words count token
/// instances, concepts count one per concept of each token, labels count
/// samples by predicted (label) or gold (gold_label) label.
ItemCounts count_items(const Dataset& dataset, const std::vector<std::size_t>& samples,
                       ItemKind kind, bool ignore_stopwords = false);

enum class Verdict { shared, a_side, b_side };

std::string to_string(Verdict verdict);

struct DivergenceItem {
  std::string item;
  ItemKind kind = ItemKind::word;
  long long count_a = 0;
  long long count_b = 0;
  double z = 0.0;
  Verdict verdict = Verdict::shared;
};

inline constexpr double kDivergencePrior = 500.0;
inline constexpr double kDivergenceZCrit = 1.96;

Verdict verdict_for(double z, double z_crit = kDivergenceZCrit);

/// Weighted log-odds with an informative Dirichlet prior built from the
/// pooled counts of both groups and scaled to `prior_total`. Sorted by |z|
/// descending, then item.
std::vector<DivergenceItem> divergence(const ItemCounts& a, const ItemCounts& b, ItemKind kind,
                                       double prior_total = kDivergencePrior,
                                       double z_crit = kDivergenceZCrit);

std::vector<DivergenceItem> divergence(const Dataset& dataset_a, const std::vector<std::size_t>& group_a,
                                       const Dataset& dataset_b, const std::vector<std::size_t>& group_b,
                                       ItemKind kind, bool ignore_stopwords = false);

/// One side of the dual map: the selected points of a dataset's layout.
struct LayoutSide {
  std::string dataset_id;
  std::string layout_id;
  std::vector<std::size_t> indices;
  Eigen::MatrixXd positions;
};

/// Filters `layout` down to the samples selected by `selector`. Both sides of
/// a comparison over one dataset share coordinates; two datasets each bring
/// their own layout.
LayoutSide layout_side(const Dataset& dataset, const ProjectedLayout& layout, std::string layout_id,
                       const GroupSelector& selector);

}  // namespace textscape
