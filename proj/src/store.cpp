#include "textscape/store.hpp"

#include "binary_io.hpp"
#include "textscape/labels.hpp"

namespace textscape {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json projection_to_json(const ProjectionParams& p) {
  return {{"method", to_string(p.method)},
          {"perplexity", p.perplexity},
          {"iterations", p.iterations},
          {"early_exaggeration", p.early_exaggeration},
          {"exaggeration_iterations", p.exaggeration_iterations},
          {"learning_rate", p.learning_rate},
          {"pca_dims", p.pca_dims}};
}

ProjectionParams projection_from_json(const json& doc) {
  ProjectionParams p;
  if (!doc.is_object()) throw Error(Errc::invalid_format, "projection must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "method") p.method = parse_projection_method(value.get<std::string>());
    else if (key == "perplexity") p.perplexity = value.get<double>();
    else if (key == "iterations") p.iterations = value.get<int>();
    else if (key == "early_exaggeration") p.early_exaggeration = value.get<double>();
    else if (key == "exaggeration_iterations") p.exaggeration_iterations = value.get<int>();
    else if (key == "learning_rate") p.learning_rate = value.get<double>();
    else if (key == "pca_dims") p.pca_dims = value.get<int>();
    else throw Error(Errc::invalid_format, "unknown projection field \"" + key + "\"");
  }
  return p;
}

std::optional<fs::path> optional_path(const json& doc, const char* key, const fs::path& base) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return std::nullopt;
  return base / it->get<std::string>();
}

void copy_into(const fs::path& from, const fs::path& to) {
  std::error_code ec;
  if (fs::exists(to) && fs::equivalent(from, to, ec)) return;
  fs::copy_file(from, to, fs::copy_options::overwrite_existing, ec);
  if (ec) throw Error(Errc::io_error, "cannot copy " + from.string() + " to " + to.string() + ": " + ec.message());
}

void write_json(const fs::path& path, const json& doc) {
  detail::write_file_bytes(path, doc.dump(2) + "\n");
}

}  // namespace

json Manifest::to_json() const {
  auto path_or_null = [](const std::optional<fs::path>& p) -> json {
    return p ? json(p->generic_string()) : json(nullptr);
  };
  return {{"format_version", kStoreFormatVersion},
          {"id", id},
          {"corpus", paths.corpus.generic_string()},
          {"token_embeddings", paths.token_embeddings.generic_string()},
          {"sample_embeddings", path_or_null(paths.sample_embeddings)},
          {"lexicon", path_or_null(paths.lexicon)},
          {"importance", path_or_null(paths.importance)},
          {"stopwords", path_or_null(paths.stopwords)},
          {"seed", seed},
          {"projection", projection_to_json(projection)}};
}

Manifest Manifest::from_json(const json& doc, const fs::path& base_dir) {
  try {
    if (!doc.is_object()) throw Error(Errc::invalid_format, "manifest must be a JSON object");
    if (auto v = doc.find("format_version"); v != doc.end() && v->get<int>() != kStoreFormatVersion) {
      throw Error(Errc::invalid_format, "unsupported store format version " + v->dump());
    }
    Manifest m;
    m.id = doc.at("id").get<std::string>();
    if (m.id.empty() || m.id.find('/') != std::string::npos) {
      throw Error(Errc::invalid_format, "dataset id must be non-empty and contain no '/'");
    }
    m.paths.corpus = base_dir / doc.at("corpus").get<std::string>();
    m.paths.token_embeddings = base_dir / doc.at("token_embeddings").get<std::string>();
    m.paths.sample_embeddings = optional_path(doc, "sample_embeddings", base_dir);
    m.paths.lexicon = optional_path(doc, "lexicon", base_dir);
    m.paths.importance = optional_path(doc, "importance", base_dir);
    m.paths.stopwords = optional_path(doc, "stopwords", base_dir);
    if (auto s = doc.find("seed"); s != doc.end()) m.seed = s->get<std::uint64_t>();
    if (auto p = doc.find("projection"); p != doc.end()) m.projection = projection_from_json(*p);
    return m;
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_format, std::string("manifest: ") + e.what());
  }
}

Manifest read_manifest(const fs::path& store_dir) {
  const auto path = store_dir / kManifestFile;
  json doc;
  try {
    doc = json::parse(detail::read_file_text(path));
  } catch (const json::parse_error& e) {
    throw Error(Errc::invalid_format, path.string() + ": " + e.what());
  }
  return Manifest::from_json(doc, store_dir);
}

Manifest ingest_store(const CorpusPaths& inputs, const fs::path& store_dir, const std::string& id,
                      const ProjectionParams& projection, std::uint64_t seed) {
  // Validate everything before touching the store.
  const Dataset dataset = load_corpus(inputs);

  if (fs::exists(store_dir / kManifestFile)) {
    const auto existing = read_manifest(store_dir);
    if (existing.id != id) {
      throw Error(Errc::dataset_exists, store_dir.string() + " already holds dataset " + existing.id);
    }
  }
  fs::create_directories(store_dir);

  Manifest relative;
  relative.id = id;
  relative.projection = projection;
  relative.seed = seed;
  relative.paths.corpus = "corpus.jsonl";
  relative.paths.token_embeddings = "tokens.semt";
  copy_into(inputs.corpus, store_dir / relative.paths.corpus);
  copy_into(inputs.token_embeddings, store_dir / relative.paths.token_embeddings);
  if (inputs.sample_embeddings) {
    relative.paths.sample_embeddings = "samples.semb";
    copy_into(*inputs.sample_embeddings, store_dir / *relative.paths.sample_embeddings);
  }
  if (inputs.lexicon) {
    relative.paths.lexicon = "lexicon.jsonl";
    copy_into(*inputs.lexicon, store_dir / *relative.paths.lexicon);
  }
  if (inputs.importance) {
    relative.paths.importance = "importance.jsonl";
    copy_into(*inputs.importance, store_dir / *relative.paths.importance);
  }
  relative.paths.stopwords = "stopwords.txt";
  write_stopwords(store_dir / *relative.paths.stopwords, dataset.stopwords());
  // A stale layout no longer matches the new inputs.
  fs::remove(store_dir / kLayoutFile);
  fs::remove_all(store_dir / "caches");

  write_json(store_dir / kManifestFile, relative.to_json());
  return read_manifest(store_dir);
}

Dataset load_store_dataset(const fs::path& store_dir) {
  return load_corpus(read_manifest(store_dir).paths);
}

ProjectedLayout precompute_store(const fs::path& store_dir,
                                 const std::optional<ProjectionParams>& projection,
                                 const std::optional<std::uint64_t>& seed) {
  auto manifest = read_manifest(store_dir);
  if (projection || seed) {
    json doc = json::parse(detail::read_file_text(store_dir / kManifestFile));
    if (projection) doc["projection"] = projection_to_json(*projection);
    if (seed) doc["seed"] = *seed;
    write_json(store_dir / kManifestFile, doc);
    manifest = read_manifest(store_dir);
  }
  const Dataset dataset = load_corpus(manifest.paths);
  auto layout = project(dataset.sample_embeddings(), manifest.projection, manifest.seed);
  write_layout(store_dir / kLayoutFile, layout);

  fs::create_directories(store_dir / "caches");
  json confusions = json::array();
  for (const auto& e : confusion_table(dataset)) {
    confusions.push_back({{"gold", e.gold}, {"pred", e.pred}, {"frequency", e.frequency},
                          {"sample_ids", e.sample_ids}});
  }
  write_json(store_dir / "caches" / "confusions.json",
             {{"format_version", kStoreFormatVersion}, {"entries", confusions}});

  json clusters = json::array();
  for (const auto& c : cluster_label_set(dataset, available_label_prototypes(dataset))) {
    clusters.push_back({{"id", c.id}, {"members", c.members}, {"color_index", c.color_index}});
  }
  write_json(store_dir / "caches" / "label_clusters.json",
             {{"format_version", kStoreFormatVersion}, {"cut", kDefaultClusterCut}, {"clusters", clusters}});
  return layout;
}

}  // namespace textscape
