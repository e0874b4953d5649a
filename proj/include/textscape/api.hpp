#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "textscape/compare.hpp"
#include "textscape/explain.hpp"
#include "textscape/geometry.hpp"
#include "textscape/ingest.hpp"
#include "textscape/labels.hpp"
#include "textscape/lwc.hpp"
#include "textscape/store.hpp"

namespace textscape {

/// A loaded dataset with its layout and everything derived from it at load
/// time. Immutable once built.
struct DatasetEntry {
  std::string id;
  Dataset dataset;
  ProjectedLayout layout;
  std::string layout_id;
  ExplainContext explain;  // prototypes, term weights, confusion table
  std::vector<LabelCluster> clusters;
  std::map<LabelId, int> label_color;
};

/// Derives the explain context and clusters. Cached confusions and clusters
/// are used as given when supplied.
std::shared_ptr<const DatasetEntry> make_entry(
    std::string id, Dataset dataset, ProjectedLayout layout,
    std::optional<std::vector<ConfusionEntry>> cached_confusions = std::nullopt,
    std::optional<std::vector<LabelCluster>> cached_clusters = std::nullopt);

/// Reads a store directory. Uses the cached layout when present and
/// projects with the manifest settings otherwise.
std::shared_ptr<const DatasetEntry> load_entry(const std::filesystem::path& store_dir);

/// Loads straight from a manifest whose paths point at raw inputs.
std::shared_ptr<const DatasetEntry> load_entry(const Manifest& manifest);

/// Thread-safe map of dataset id to entry. Entries never change after insertion.
class Registry {
 public:
  /// Throws Errc::dataset_exists.
  void add(std::shared_ptr<const DatasetEntry> entry);
  /// Throws Errc::dataset_not_found.
  std::shared_ptr<const DatasetEntry> get(std::string_view id) const;
  std::vector<std::shared_ptr<const DatasetEntry>> list() const;

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const DatasetEntry>, std::less<>> entries_;
};

using QueryParams = std::map<std::string, std::string>;

/// Rounds to nine significant digits, the precision of every payload float.
double wire_number(double value);

// Payload builders shared by the HTTP service and the CLI. Each throws
// textscape::Error for bad parameters.
nlohmann::json dataset_summary(const DatasetEntry& entry);
nlohmann::json datasets_payload(const Registry& registry);
nlohmann::json points_payload(const DatasetEntry& entry, const QueryParams& params);
nlohmann::json local_words_payload(const DatasetEntry& entry, const QueryParams& params);
nlohmann::json lists_payload(const DatasetEntry& entry, const QueryParams& params);
nlohmann::json confusions_payload(const DatasetEntry& entry, const QueryParams& params);
nlohmann::json label_clusters_payload(const DatasetEntry& entry, const QueryParams& params);
nlohmann::json hulls_payload(const DatasetEntry& entry, const QueryParams& params);
nlohmann::json explanation_payload(const DatasetEntry& entry, const std::string& sample_id,
                                   const QueryParams& params);
nlohmann::json compare_payload(const Registry& registry, const nlohmann::json& request);

/// Parses a compare-request side ({"dataset", "gold_labels", ...}).
GroupSelector parse_group_selector(const nlohmann::json& side);

/// CSV rendering of a payload; `kind` names the route ("confusions", ...).
std::string payload_to_csv(std::string_view kind, const nlohmann::json& payload);

/// Error body {"error": {"code", "message"}}.
nlohmann::json error_payload(const Error& error);
int http_status(Errc code);

/// OpenAPI 3 description of every route, parameter and payload schema.
nlohmann::json openapi_document();

}  // namespace textscape
