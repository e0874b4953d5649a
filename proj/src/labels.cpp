#include "textscape/labels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>
#include <utility>

namespace textscape {
namespace {

bool in_band(double confidence, const ConfidenceBand& band) {
  return confidence >= band.lo && confidence <= band.hi;
}

int compare_by(const ConfusionEntry& a, const ConfusionEntry& b, ConfusionSortKey key) {
  switch (key) {
    case ConfusionSortKey::frequency:
      return a.frequency == b.frequency ? 0 : (a.frequency > b.frequency ? -1 : 1);
    case ConfusionSortKey::gold:
      return a.gold.compare(b.gold);
    case ConfusionSortKey::pred:
      return a.pred.compare(b.pred);
  }
  return 0;
}

struct Cluster {
  std::vector<std::size_t> members;  // prototype indices
};

}  // namespace

ConfusionSortKey parse_confusion_sort_key(std::string_view name) {
  if (name == "freq" || name == "frequency") return ConfusionSortKey::frequency;
  if (name == "gold") return ConfusionSortKey::gold;
  if (name == "pred") return ConfusionSortKey::pred;
  throw Error(Errc::invalid_argument, "unknown sort key \"" + std::string(name) + "\"");
}

std::vector<ConfusionEntry> confusion_table(const Dataset& dataset,
                                            const std::optional<ConfidenceBand>& band) {
  if (band && band->lo > band->hi) throw Error(Errc::invalid_argument, "confidence band has lo > hi");
  std::map<std::pair<LabelId, LabelId>, ConfusionEntry> pairs;
  for (const auto& s : dataset.samples()) {
    if (s.correct()) continue;
    if (band && !in_band(s.confidence, *band)) continue;
    auto& entry = pairs[{s.gold_label, s.pred_label}];
    entry.gold = s.gold_label;
    entry.pred = s.pred_label;
    entry.frequency += 1;
    entry.sample_ids.push_back(s.id);
  }
  std::vector<ConfusionEntry> out;
  out.reserve(pairs.size());
  for (auto& [key, entry] : pairs) out.push_back(std::move(entry));
  sort_confusions(out, ConfusionSortKey::frequency);
  return out;
}

void sort_confusions(std::vector<ConfusionEntry>& entries, ConfusionSortKey primary,
                     std::optional<ConfusionSortKey> secondary) {
  std::sort(entries.begin(), entries.end(), [](const ConfusionEntry& a, const ConfusionEntry& b) {
    return std::tie(a.gold, a.pred) < std::tie(b.gold, b.pred);
  });
  if (secondary) {
    std::stable_sort(entries.begin(), entries.end(), [&](const auto& a, const auto& b) {
      return compare_by(a, b, *secondary) < 0;
    });
  }
  std::stable_sort(entries.begin(), entries.end(), [&](const auto& a, const auto& b) {
    return compare_by(a, b, primary) < 0;
  });
}

ErrorShares error_shares(const Dataset& dataset) {
  std::map<LabelId, int> fn;
  std::map<LabelId, int> fp;
  ErrorShares out;
  for (const auto& s : dataset.samples()) {
    if (s.correct()) continue;
    ++out.total_errors;
    ++fn[s.gold_label];
    ++fp[s.pred_label];
  }
  out.has_errors = out.total_errors > 0;
  if (!out.has_errors) return out;
  const auto total = static_cast<double>(out.total_errors);
  for (const auto& label : dataset.label_set()) {
    const int n_fn = fn.count(label) ? fn[label] : 0;
    const int n_fp = fp.count(label) ? fp[label] : 0;
    out.false_negatives.push_back({label, n_fn, n_fn / total});
    out.false_positives.push_back({label, n_fp, n_fp / total});
  }
  return out;
}

std::vector<LabelPrototype> available_label_prototypes(const Dataset& dataset) {
  const auto& emb = dataset.sample_embeddings();
  std::map<LabelId, LabelPrototype> acc;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& label = dataset.sample(i).gold_label;
    auto [it, inserted] = acc.try_emplace(label);
    if (inserted) {
      it->second.label = label;
      it->second.vector = Eigen::VectorXd::Zero(emb.cols());
    }
    it->second.vector += emb.row(static_cast<Eigen::Index>(i)).transpose();
    it->second.support += 1;
  }
  std::vector<LabelPrototype> out;
  for (auto& [label, proto] : acc) {
    proto.vector /= static_cast<double>(proto.support);
    out.push_back(std::move(proto));
  }
  return out;
}

std::vector<LabelPrototype> label_prototypes(const Dataset& dataset) {
  auto out = available_label_prototypes(dataset);
  if (out.size() != dataset.label_set().size()) {
    for (const auto& label : dataset.label_set()) {
      const bool present = std::any_of(out.begin(), out.end(),
                                       [&](const LabelPrototype& p) { return p.label == label; });
      if (!present) throw Error(Errc::unknown_label, "label " + label + " has no gold samples");
    }
  }
  return out;
}

const std::array<const char*, 20>& cluster_palette() {
  static const std::array<const char*, 20> palette = {
      "#1f77b4", "#aec7e8", "#ff7f0e", "#ffbb78", "#2ca02c", "#98df8a", "#d62728",
      "#ff9896", "#9467bd", "#c5b0d5", "#8c564b", "#c49c94", "#e377c2", "#f7b6d2",
      "#7f7f7f", "#c7c7c7", "#bcbd22", "#dbdb8d", "#17becf", "#9edae5"};
  return palette;
}

double cosine_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 1.0;
  return 1.0 - a.dot(b) / (na * nb);
}

std::vector<LabelCluster> cluster_labels(const std::vector<LabelPrototype>& prototypes, double cut) {
  if (prototypes.empty()) throw Error(Errc::invalid_argument, "no prototypes to cluster");
  if (!(cut > 0.0 && cut < 2.0)) throw Error(Errc::invalid_argument, "cluster cut must lie in (0, 2)");

  // Work in label order so the result does not depend on input order.
  std::vector<std::size_t> order(prototypes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return prototypes[a].label < prototypes[b].label; });

  const std::size_t n = order.size();
  std::vector<Cluster> clusters;
  for (auto idx : order) clusters.push_back({{idx}});
  // Linkage between active clusters, updated by the size-weighted average rule.
  Eigen::MatrixXd linkage(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      linkage(i, j) = cosine_distance(prototypes[order[i]].vector, prototypes[order[j]].vector);
    }
  }
  std::vector<bool> active(n, true);

  while (true) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = n, bj = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        const double d = linkage(i, j);
        // Clusters are kept in order of their smallest label, so scanning
        // (i, j) ascending already breaks distance ties lexicographically.
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi == n || !(best < cut)) break;

    const auto size_i = static_cast<double>(clusters[bi].members.size());
    const auto size_j = static_cast<double>(clusters[bj].members.size());
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      const double merged = (size_i * linkage(bi, k) + size_j * linkage(bj, k)) / (size_i + size_j);
      linkage(bi, k) = linkage(k, bi) = merged;
    }
    auto& target = clusters[bi].members;
    target.insert(target.end(), clusters[bj].members.begin(), clusters[bj].members.end());
    active[bj] = false;
  }

  std::vector<LabelCluster> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!active[i]) continue;
    LabelCluster cluster;
    for (auto idx : clusters[i].members) cluster.members.push_back(prototypes[idx].label);
    std::sort(cluster.members.begin(), cluster.members.end());
    out.push_back(std::move(cluster));
  }
  std::sort(out.begin(), out.end(),
            [](const LabelCluster& a, const LabelCluster& b) { return a.members.front() < b.members.front(); });
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].id = static_cast<int>(i);
    out[i].color_index = static_cast<int>(i);
  }
  return out;
}

std::vector<LabelCluster> cluster_label_set(const Dataset& dataset,
                                            const std::vector<LabelPrototype>& prototypes,
                                            double cut) {
  std::vector<LabelCluster> out;
  if (!prototypes.empty()) out = cluster_labels(prototypes, cut);
  std::set<LabelId> covered;
  for (const auto& c : out) covered.insert(c.members.begin(), c.members.end());
  for (const auto& label : dataset.label_set()) {
    if (!covered.count(label)) out.push_back({0, {label}, 0});
  }
  std::sort(out.begin(), out.end(),
            [](const LabelCluster& a, const LabelCluster& b) { return a.members.front() < b.members.front(); });
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].id = static_cast<int>(i);
    out[i].color_index = static_cast<int>(i);
  }
  return out;
}

void validate(const SampleFilter& filter) {
  if (filter.confidence && filter.confidence->lo > filter.confidence->hi) {
    throw Error(Errc::invalid_argument, "confidence band has lo > hi");
  }
}

std::vector<std::size_t> filter_samples(const Dataset& dataset, const SampleFilter& filter) {
  validate(filter);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& s = dataset.sample(i);
    if (filter.errors_only && s.correct()) continue;
    if (filter.confidence && !in_band(s.confidence, *filter.confidence)) continue;
    if (filter.labels && !filter.labels->count(s.gold_label) && !filter.labels->count(s.pred_label)) continue;
    out.push_back(i);
  }
  return out;
}

}  // namespace textscape
