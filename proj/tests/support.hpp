#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "textscape/api.hpp"
#include "textscape/ingest.hpp"

namespace textscape::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix = "textscape");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

Sample make_sample(std::string id, std::vector<std::string> tokens, LabelId gold, LabelId pred,
                   double confidence = 0.9);

/// Dataset from samples and per-sample token matrices; sample embeddings derived.
Dataset make_dataset(std::vector<Sample> samples, std::vector<Eigen::MatrixXd> tokens,
                     ConceptLexicon lexicon = {}, ExternalImportance external = {},
                     std::set<std::string> stopwords = {});

/// Random token rows for every sample, dimension `dim`.
std::vector<Eigen::MatrixXd> random_tokens(const std::vector<Sample>& samples, Eigen::Index dim,
                                           std::mt19937_64& rng);

struct RandomCorpusSpec {
  int samples = 200;
  int vocabulary = 40;
  int labels = 5;
  int min_tokens = 3;
  int max_tokens = 9;
  double error_rate = 0.2;
  Eigen::Index dim = 6;
};

/// Samples with tokens drawn from "w00".."wNN", random labels and confidences.
std::vector<Sample> random_samples(const RandomCorpusSpec& spec, std::mt19937_64& rng);

/// Deterministic demo corpus: four intents with label-specific vocabulary,
/// scripted errors, a concept lexicon and one external importance metric.
Dataset fixture_dataset();

/// Writes fixture_dataset() as raw input files into `dir`.
CorpusPaths write_fixture_inputs(const std::filesystem::path& dir);

/// Ingests the fixture into `store_dir` with id `id` and precomputes it
/// with a PCA layout.
void build_fixture_store(const std::filesystem::path& store_dir, const std::string& id = "fixture");

/// Six labels, 300 samples and exactly 100 errors spread over a fixed
/// schedule of (gold, pred) pairs with tied frequencies. Confidence of
/// sample i is (i % 20) / 20.
Dataset scripted_error_corpus();

/// Random layout positions (M x 2).
ProjectedLayout random_layout(std::size_t count, std::mt19937_64& rng, double spread = 1.0);

}  // namespace textscape::testing
