#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "textscape/ingest.hpp"
#include "textscape/labels.hpp"

namespace textscape {

inline constexpr const char* kOcclusionMetric = "occlusion";
inline constexpr const char* kSimilarityMetric = "similarity";
inline constexpr const char* kClassTfidfMetric = "ctfidf";
inline constexpr double kDefaultEdgeThreshold = 0.4;

/// Built-in metric names in stacking order.
const std::vector<std::string>& builtin_metrics();

/// Class-based tf-idf over gold-label classes:
/// tf(w, c) * log(1 + A / f(w)), with A the mean token count per class and
/// f(w) the corpus-wide count of w.
class ClassTermWeights {
 public:
  ClassTermWeights() = default;
  explicit ClassTermWeights(const Dataset& dataset);

  double weight(const LabelId& label, const std::string& word) const;

 private:
  std::map<LabelId, std::map<std::string, double>> weights_;
};

/// Per-dataset data shared by every explanation.
struct ExplainContext {
  std::map<LabelId, Eigen::VectorXd> prototypes;
  ClassTermWeights term_weights;
  std::vector<ConfusionEntry> confusions;
};

ExplainContext make_explain_context(const Dataset& dataset);

struct ImportanceProfile {
  std::string sample_id;
  std::vector<std::string> metrics;
  // Non-negative per-token scores summing to one, keyed by metric name.
  std::map<std::string, std::vector<double>> scores;

  /// Stacked-bar height per token (sum over metrics).
  std::vector<double> totals() const;
};

/// Built-ins followed by the sample's external metrics in name order.
std::vector<std::string> default_metrics(const Dataset& dataset, std::string_view sample_id);

/// Clamp at zero, then L1-normalize; all-zero input becomes uniform.
std::vector<double> normalize_importance(std::vector<double> raw);

ImportanceProfile vifi(const Dataset& dataset, const ExplainContext& context,
                       std::string_view sample_id, const std::vector<std::string>& metrics);

struct ContrastTriple {
  std::string query_id;
  std::string closest_id;
  std::string contrast_id;
  LabelId contrast_label;
  LabelId predicted_label;  // of the query
  LabelId gold_label;       // of the query
};

/// Closest: nearest (cosine) other sample predicted as the query's
/// predicted label. Contrast: nearest other sample whose gold label is
/// `contrast_label`. Distance ties go to the smaller sample id.
ContrastTriple select_contrast(const Dataset& dataset, const std::vector<ConfusionEntry>& confusions,
                               std::string_view query_id,
                               const std::optional<LabelId>& contrast_label = std::nullopt);
ContrastTriple select_contrast(const Dataset& dataset, std::string_view query_id,
                               const std::optional<LabelId>& contrast_label = std::nullopt);

/// Additive decomposition of cos(mean(q), mean(s)) over tokens of both sides.
struct PairContribution {
  double similarity = 0.0;
  std::vector<double> query;  // sums to similarity
  std::vector<double> other;  // sums to similarity
};

PairContribution similarity_contributions(const Eigen::MatrixXd& query_tokens,
                                          const Eigen::MatrixXd& other_tokens);

struct RelationColumn {
  std::string role;  // query | closest | contrast
  std::string sample_id;
  LabelId gold_label;
  LabelId pred_label;
  std::vector<std::string> tokens;
};

struct RelationEdge {
  std::string pair;  // closest | contrast
  int query_token = 0;
  int other_token = 0;
  double weight = 0.0;
};

struct RelationGraph {
  std::array<RelationColumn, 3> columns;
  double tau = kDefaultEdgeThreshold;
  std::vector<RelationEdge> edges;
  PairContribution closest;
  PairContribution contrast;
};

RelationGraph relation_graph(const Dataset& dataset, const ContrastTriple& triple,
                             double tau = kDefaultEdgeThreshold);

struct SummarySlots {
  std::string query_id;
  LabelId predicted_label;
  LabelId gold_label;
  bool correct = true;
  std::string closest_id;
  double closest_similarity = 0.0;
  std::vector<std::string> supporting_tokens;
  LabelId contrast_label;
  std::string contrast_id;
  double contrast_similarity = 0.0;
  std::vector<std::string> confounders;
};

struct Summary {
  std::string text;
  SummarySlots slots;
};

/// Fixed English template over the triple, graph and importance profile.
Summary summarize(const ContrastTriple& triple, const RelationGraph& graph,
                  const ImportanceProfile& profile);

}  // namespace textscape
