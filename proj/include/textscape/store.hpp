#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "textscape/geometry.hpp"
#include "textscape/ingest.hpp"

namespace textscape {

inline constexpr int kStoreFormatVersion = 1;

/// Describes one dataset: where its inputs live and how to project it.
/// Relative paths resolve against the directory holding the manifest.
struct Manifest {
  std::string id;
  CorpusPaths paths;
  ProjectionParams projection;
  std::uint64_t seed = 42;

  nlohmann::json to_json() const;
  /// Throws Errc::invalid_format on missing or mistyped fields.
  static Manifest from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
};

// Store directory layout:
//   manifest.json        format_version, id, relative input paths, projection
//   corpus.jsonl, tokens.semt, [samples.semb, lexicon.jsonl, importance.jsonl], stopwords.txt
//   layout.seml          projected layout
//   caches/confusions.json, caches/label_clusters.json
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kLayoutFile = "layout.seml";

Manifest read_manifest(const std::filesystem::path& store_dir);

/// Validates the inputs, copies them into `store_dir` under the standard
/// names and writes the manifest. Refuses to overwrite an existing store
/// holding a different id.
Manifest ingest_store(const CorpusPaths& inputs, const std::filesystem::path& store_dir,
                      const std::string& id, const ProjectionParams& projection = {},
                      std::uint64_t seed = 42);

/// Loads the dataset described by `store_dir`'s manifest.
Dataset load_store_dataset(const std::filesystem::path& store_dir);

/// Projects the store's dataset and writes the layout and derived caches.
/// Overrides replace the manifest's projection settings and are persisted.
ProjectedLayout precompute_store(const std::filesystem::path& store_dir,
                                 const std::optional<ProjectionParams>& projection = std::nullopt,
                                 const std::optional<std::uint64_t>& seed = std::nullopt);

}  // namespace textscape
