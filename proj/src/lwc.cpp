#include "textscape/lwc.hpp"

#include <algorithm>
#include <cmath>

namespace textscape {
namespace {

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& space, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), space.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = space.row(rows[i]);
  return out;
}

std::vector<LocalWord> filter_localized(const OccurrenceIndex::Occurrences& occurrences,
                                        const Eigen::MatrixXd& space, double global_scale,
                                        const LwcParams& params,
                                        const std::set<std::string>* stopwords) {
  std::vector<LocalWord> out;
  for (const auto& [word, rows] : occurrences) {
    const auto frequency = static_cast<int>(rows.size());
    if (frequency <= params.freq_threshold) continue;
    if (stopwords && stopwords->count(word)) continue;

    const Eigen::MatrixXd points = gather_rows(space, rows);
    const Eigen::VectorXd center = geometric_median(points);
    std::vector<double> dist(rows.size());
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      dist[static_cast<std::size_t>(i)] = (points.row(i).transpose() - center).norm();
    }
    const double locality = nearest_rank_quantile(std::move(dist), params.locality_quantile) / global_scale;
    if (locality > params.locality_max) continue;

    out.push_back({word, center, frequency, locality, std::log1p(static_cast<double>(frequency))});
  }
  std::sort(out.begin(), out.end(), [](const LocalWord& a, const LocalWord& b) {
    return a.frequency != b.frequency ? a.frequency > b.frequency : a.word < b.word;
  });
  return out;
}

}  // namespace

OccurrenceIndex::OccurrenceIndex(Eigen::MatrixXd space, std::vector<std::size_t> sample_indices,
                                 Occurrences occurrences, std::set<std::string> stopwords)
    : space_(std::move(space)),
      sample_indices_(std::move(sample_indices)),
      occurrences_(std::move(occurrences)),
      stopwords_(std::move(stopwords)) {
  if (static_cast<std::size_t>(space_.rows()) != sample_indices_.size()) {
    throw Error(Errc::invalid_argument, "occurrence index rows and sample indices disagree");
  }
}

Eigen::MatrixXd OccurrenceIndex::positions(const std::string& word) const {
  auto it = occurrences_.find(word);
  if (it == occurrences_.end()) return Eigen::MatrixXd(0, space_.cols());
  return gather_rows(space_, it->second);
}

std::size_t OccurrenceIndex::total_occurrences() const {
  std::size_t total = 0;
  for (const auto& [word, rows] : occurrences_) total += rows.size();
  return total;
}

double OccurrenceIndex::global_scale(double quantile) const {
  if (space_.rows() == 0) return 1.0;
  const Eigen::VectorXd center = geometric_median(space_);
  std::vector<double> dist(static_cast<std::size_t>(space_.rows()));
  for (Eigen::Index i = 0; i < space_.rows(); ++i) {
    dist[static_cast<std::size_t>(i)] = (space_.row(i).transpose() - center).norm();
  }
  const double scale = nearest_rank_quantile(std::move(dist), quantile);
  return scale > 0.0 ? scale : 1.0;
}

void validate(const LwcParams& params) {
  if (params.freq_threshold < 0) throw Error(Errc::invalid_argument, "frequency threshold must be >= 0");
  if (!(params.locality_max > 0.0) || !std::isfinite(params.locality_max)) {
    throw Error(Errc::invalid_argument, "locality limit must be positive and finite");
  }
  if (!(params.locality_quantile > 0.0 && params.locality_quantile <= 1.0)) {
    throw Error(Errc::invalid_argument, "locality quantile must lie in (0, 1]");
  }
}

OccurrenceIndex build_index(const Dataset& dataset, const ProjectedLayout& layout,
                            const std::optional<RegionSelector>& region) {
  if (static_cast<std::size_t>(layout.positions.rows()) != dataset.size()) {
    throw Error(Errc::invalid_argument, "layout does not cover the dataset");
  }
  std::vector<std::size_t> subset;
  if (region) {
    subset = select_region(layout, *region);
  } else {
    subset.resize(dataset.size());
    for (std::size_t i = 0; i < subset.size(); ++i) subset[i] = i;
  }
  return build_index(dataset, layout.positions, subset);
}

OccurrenceIndex build_index(const Dataset& dataset, const Eigen::MatrixXd& space,
                            const std::vector<std::size_t>& subset) {
  if (static_cast<std::size_t>(space.rows()) != dataset.size()) {
    throw Error(Errc::invalid_argument, "space does not cover the dataset");
  }
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(subset.size()), space.cols());
  OccurrenceIndex::Occurrences occurrences;
  for (std::size_t r = 0; r < subset.size(); ++r) {
    const auto idx = subset[r];
    rows.row(static_cast<Eigen::Index>(r)) = space.row(static_cast<Eigen::Index>(idx));
    for (const auto& token : dataset.sample(idx).tokens) {
      if (auto word = normalize_word(token)) {
        occurrences[*word].push_back(static_cast<Eigen::Index>(r));
      }
    }
  }
  return OccurrenceIndex(std::move(rows), subset, std::move(occurrences), dataset.stopwords());
}

double nearest_rank_quantile(std::vector<double> values, double quantile) {
  if (values.empty()) throw Error(Errc::invalid_argument, "quantile of an empty set");
  const auto n = values.size();
  auto rank = static_cast<std::size_t>(std::ceil(quantile * static_cast<double>(n) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1), values.end());
  return values[rank - 1];
}

double locality_score(const Eigen::MatrixXd& occurrences, double global_scale, double quantile) {
  if (occurrences.rows() == 0) throw Error(Errc::invalid_argument, "locality of zero occurrences");
  if (!(global_scale > 0.0)) throw Error(Errc::invalid_argument, "global scale must be positive");
  const Eigen::VectorXd center = geometric_median(occurrences);
  std::vector<double> dist(static_cast<std::size_t>(occurrences.rows()));
  for (Eigen::Index i = 0; i < occurrences.rows(); ++i) {
    dist[static_cast<std::size_t>(i)] = (occurrences.row(i).transpose() - center).norm();
  }
  return nearest_rank_quantile(std::move(dist), quantile) / global_scale;
}

std::vector<LocalWord> local_words(const OccurrenceIndex& index, const LwcParams& params) {
  validate(params);
  if (index.empty()) return {};
  const double scale = index.global_scale(params.locality_quantile);
  return filter_localized(index.occurrences(), index.space(), scale, params,
                          params.ignore_stopwords ? &index.stopwords() : nullptr);
}

std::vector<LocalWord> local_concepts(const OccurrenceIndex& index, const ConceptLexicon& lexicon,
                                      const LwcParams& params, const LwcParams& concept_params) {
  validate(concept_params);
  if (lexicon.empty()) return {};
  const auto words = local_words(index, params);

  OccurrenceIndex::Occurrences concept_occurrences;
  for (const auto& word : words) {
    const auto& concepts = lexicon.concepts(word.word);
    if (concepts.empty()) continue;
    const auto& rows = index.occurrences().at(word.word);
    for (const auto& concept_name : concepts) {
      auto& list = concept_occurrences[concept_name];
      list.insert(list.end(), rows.begin(), rows.end());
    }
  }
  if (concept_occurrences.empty()) return {};
  const double scale = index.global_scale(concept_params.locality_quantile);
  return filter_localized(concept_occurrences, index.space(), scale, concept_params, nullptr);
}

}  // namespace textscape
