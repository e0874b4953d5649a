#include "textscape/compare.hpp"

#include <algorithm>
#include <cmath>

namespace textscape {

std::vector<std::size_t> resolve_group(const Dataset& dataset, const ProjectedLayout& layout,
                                       const GroupSelector& selector) {
  if (selector.confidence && selector.confidence->lo > selector.confidence->hi) {
    throw Error(Errc::invalid_argument, "confidence band has lo > hi");
  }
  std::vector<bool> in_region;
  if (selector.region) {
    if (static_cast<std::size_t>(layout.positions.rows()) != dataset.size()) {
      throw Error(Errc::invalid_argument, "layout does not cover the dataset");
    }
    in_region.assign(dataset.size(), false);
    for (auto i : select_region(layout, *selector.region)) in_region[i] = true;
  }

  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& s = dataset.sample(i);
    if (selector.gold_labels && !selector.gold_labels->count(s.gold_label)) continue;
    if (selector.pred_labels && !selector.pred_labels->count(s.pred_label)) continue;
    if (selector.region && !in_region[i]) continue;
    if (selector.error_status == ErrorStatus::errors_only && s.correct()) continue;
    if (selector.error_status == ErrorStatus::correct_only && !s.correct()) continue;
    if (selector.confidence &&
        (s.confidence < selector.confidence->lo || s.confidence > selector.confidence->hi)) {
      continue;
    }
    out.push_back(i);
  }
  if (out.empty()) {
    throw Error(Errc::empty_group, "group selector on dataset " + selector.dataset_id + " matches no samples");
  }
  return out;
}

std::string to_string(ItemKind kind) {
  switch (kind) {
    case ItemKind::word: return "word";
    case ItemKind::concept_name: return "concept";
    case ItemKind::label: return "label";
    case ItemKind::gold_label: return "gold_label";
  }
  return "word";
}

ItemKind parse_item_kind(std::string_view name) {
  if (name == "word") return ItemKind::word;
  if (name == "concept") return ItemKind::concept_name;
  if (name == "label") return ItemKind::label;
  if (name == "gold_label") return ItemKind::gold_label;
  throw Error(Errc::invalid_argument, "unknown item kind \"" + std::string(name) + "\"");
}

ItemCounts count_items(const Dataset& dataset, const std::vector<std::size_t>& samples,
                       ItemKind kind, bool ignore_stopwords) {
  ItemCounts counts;
  for (auto i : samples) {
    const auto& s = dataset.sample(i);
    switch (kind) {
      case ItemKind::label:
        ++counts[s.pred_label];
        break;
      case ItemKind::gold_label:
        ++counts[s.gold_label];
        break;
      case ItemKind::word:
      case ItemKind::concept_name:
        for (const auto& token : s.tokens) {
          const auto word = normalize_word(token);
          if (!word) continue;
          if (kind == ItemKind::word) {
            if (ignore_stopwords && dataset.is_stopword(*word)) continue;
            ++counts[*word];
          } else {
            for (const auto& c : dataset.lexicon().concepts(*word)) ++counts[c];
          }
        }
        break;
    }
  }
  return counts;
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::shared: return "shared";
    case Verdict::a_side: return "a_side";
    case Verdict::b_side: return "b_side";
  }
  return "shared";
}

Verdict verdict_for(double z, double z_crit) {
  if (std::abs(z) < z_crit) return Verdict::shared;
  return z > 0 ? Verdict::a_side : Verdict::b_side;
}

std::vector<DivergenceItem> divergence(const ItemCounts& a, const ItemCounts& b, ItemKind kind,
                                       double prior_total, double z_crit) {
  if (a.empty() && b.empty()) return {};
  std::map<std::string, std::pair<long long, long long>> joint;
  long long n_a = 0;
  long long n_b = 0;
  for (const auto& [item, c] : a) {
    joint[item].first = c;
    n_a += c;
  }
  for (const auto& [item, c] : b) {
    joint[item].second = c;
    n_b += c;
  }
  const auto pooled_total = static_cast<double>(n_a + n_b);

  std::vector<DivergenceItem> out;
  out.reserve(joint.size());
  for (const auto& [item, counts] : joint) {
    const auto [y_a, y_b] = counts;
    if (y_a + y_b == 0) continue;
    const double alpha = prior_total * static_cast<double>(y_a + y_b) / pooled_total;
    const double ya = static_cast<double>(y_a) + alpha;
    const double yb = static_cast<double>(y_b) + alpha;
    const double rest_a = static_cast<double>(n_a) + prior_total - ya;
    const double rest_b = static_cast<double>(n_b) + prior_total - yb;
    double z = 0.0;
    // A vocabulary of one item leaves no complement to compare against.
    if (rest_a > 0.0 && rest_b > 0.0) {
      const double delta = std::log(ya / rest_a) - std::log(yb / rest_b);
      z = delta / std::sqrt(1.0 / ya + 1.0 / yb);
    }
    out.push_back({item, kind, y_a, y_b, z, verdict_for(z, z_crit)});
  }
  std::sort(out.begin(), out.end(), [](const DivergenceItem& x, const DivergenceItem& y) {
    const double ax = std::abs(x.z);
    const double ay = std::abs(y.z);
    return ax != ay ? ax > ay : x.item < y.item;
  });
  return out;
}

std::vector<DivergenceItem> divergence(const Dataset& dataset_a, const std::vector<std::size_t>& group_a,
                                       const Dataset& dataset_b, const std::vector<std::size_t>& group_b,
                                       ItemKind kind, bool ignore_stopwords) {
  if (group_a.empty() || group_b.empty()) throw Error(Errc::empty_group, "comparison group is empty");
  return divergence(count_items(dataset_a, group_a, kind, ignore_stopwords),
                    count_items(dataset_b, group_b, kind, ignore_stopwords), kind);
}

LayoutSide layout_side(const Dataset& dataset, const ProjectedLayout& layout, std::string layout_id,
                       const GroupSelector& selector) {
  LayoutSide side;
  side.dataset_id = selector.dataset_id;
  side.layout_id = std::move(layout_id);
  side.indices = resolve_group(dataset, layout, selector);
  side.positions.resize(static_cast<Eigen::Index>(side.indices.size()), 2);
  for (std::size_t r = 0; r < side.indices.size(); ++r) {
    side.positions.row(static_cast<Eigen::Index>(r)) =
        layout.positions.row(static_cast<Eigen::Index>(side.indices[r]));
  }
  return side;
}

}  // namespace textscape
