#include "textscape/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "binary_io.hpp"
#include "textscape/error.hpp"

namespace textscape {
namespace {

using nlohmann::json;

constexpr std::uint32_t kEmbeddingVersion = 1;

template <typename Fn>
void for_each_jsonl(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(Errc::invalid_format, where + ": " + e.what());
    }
    if (!obj.is_object()) throw Error(Errc::invalid_format, where + ": expected a JSON object");
    try {
      fn(obj, where);
    } catch (const json::exception& e) {
      throw Error(Errc::invalid_format, where + ": " + e.what());
    }
  }
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw Error(Errc::invalid_format, where + ": field \"" + key + "\" must be a string");
  }
  return it->get<std::string>();
}

const json& require_array(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_array()) {
    throw Error(Errc::invalid_format, where + ": field \"" + key + "\" must be an array");
  }
  return *it;
}

void write_lines(const std::filesystem::path& path, const std::vector<json>& rows) {
  std::string out;
  for (const auto& row : rows) {
    out += row.dump();
    out += '\n';
  }
  detail::write_file_bytes(path, out);
}

void check_finite(const Eigen::MatrixXd& m, const std::string& what) {
  if (!m.allFinite()) throw Error(Errc::non_finite_value, what + " contains a non-finite value");
}

}  // namespace

const Eigen::MatrixXd& EmbeddingStore::samples() const {
  if (!sample_matrix) throw Error(Errc::invalid_argument, "sample embeddings are not available");
  return *sample_matrix;
}

EmbeddingStore derive_sample_embeddings(EmbeddingStore store) {
  const auto m = static_cast<Eigen::Index>(store.token_matrices.size());
  Eigen::MatrixXd pooled(m, store.dim);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& tokens = store.token_matrices[static_cast<std::size_t>(i)];
    if (tokens.rows() == 0) {
      throw Error(Errc::invalid_argument,
                  "sample " + std::to_string(i) + " has no token embeddings");
    }
    pooled.row(i) = tokens.colwise().mean();
  }
  store.sample_matrix = std::move(pooled);
  store.sample_matrix_derived = true;
  return store;
}

ConceptLexicon::ConceptLexicon(Map entries) : entries_(std::move(entries)) {
  for (const auto& [word, concepts] : entries_) {
    if (concepts.empty()) {
      throw Error(Errc::invalid_format, "lexicon entry \"" + word + "\" has no concepts");
    }
  }
}

const std::set<std::string>& ConceptLexicon::concepts(std::string_view word) const {
  static const std::set<std::string> kEmpty;
  auto it = entries_.find(std::string(word));
  return it == entries_.end() ? kEmpty : it->second;
}

const std::vector<double>* ExternalImportance::find(std::string_view sample_id,
                                                    std::string_view metric) const {
  auto it = scores_.find({std::string(sample_id), std::string(metric)});
  return it == scores_.end() ? nullptr : &it->second;
}

std::vector<std::string> ExternalImportance::metrics_for(std::string_view sample_id) const {
  std::vector<std::string> out;
  const std::string id(sample_id);
  for (auto it = scores_.lower_bound({id, std::string()});
       it != scores_.end() && it->first.first == id; ++it) {
    out.push_back(it->first.second);
  }
  return out;
}

Dataset::Dataset(std::vector<Sample> samples, EmbeddingStore embeddings,
                 ConceptLexicon lexicon, ExternalImportance external,
                 std::set<std::string> stopwords)
    : samples_(std::move(samples)),
      embeddings_(std::move(embeddings)),
      lexicon_(std::move(lexicon)),
      external_(std::move(external)),
      stopwords_(std::move(stopwords)) {
  if (samples_.empty()) throw Error(Errc::empty_corpus, "empty corpus");

  std::set<LabelId> labels;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (s.tokens.empty()) {
      throw Error(Errc::invalid_format, "sample " + s.id + " has no tokens");
    }
    if (!std::isfinite(s.confidence) || s.confidence < 0.0 || s.confidence > 1.0) {
      throw Error(Errc::invalid_format, "sample " + s.id + " has confidence outside [0,1]");
    }
    if (!by_id_.emplace(s.id, i).second) {
      throw Error(Errc::duplicate_id, "duplicate sample id " + s.id);
    }
    labels.insert(s.gold_label);
    labels.insert(s.pred_label);
  }
  labels_.assign(labels.begin(), labels.end());

  if (embeddings_.dim <= 0) throw Error(Errc::invalid_format, "embedding dimension must be positive");
  if (embeddings_.token_matrices.size() != samples_.size()) {
    throw Error(Errc::token_count_mismatch,
                "token embeddings hold " + std::to_string(embeddings_.token_matrices.size()) +
                    " samples but the corpus has " + std::to_string(samples_.size()));
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& tokens = embeddings_.token_matrices[i];
    if (static_cast<std::size_t>(tokens.rows()) != samples_[i].tokens.size()) {
      throw Error(Errc::token_count_mismatch,
                  "sample " + samples_[i].id + " has " +
                      std::to_string(samples_[i].tokens.size()) + " tokens but " +
                      std::to_string(tokens.rows()) + " token embedding rows");
    }
    if (tokens.cols() != embeddings_.dim) {
      throw Error(Errc::invalid_format, "sample " + samples_[i].id + " token embeddings have wrong dimension");
    }
    check_finite(tokens, "token embeddings of sample " + samples_[i].id);
  }
  if (embeddings_.sample_matrix) {
    const auto& sm = *embeddings_.sample_matrix;
    if (static_cast<std::size_t>(sm.rows()) != samples_.size()) {
      throw Error(Errc::invalid_format,
                  "sample embeddings hold " + std::to_string(sm.rows()) +
                      " rows but the corpus has " + std::to_string(samples_.size()) + " samples");
    }
    if (sm.cols() != embeddings_.dim) {
      throw Error(Errc::invalid_format, "sample and token embedding dimensions differ");
    }
    check_finite(sm, "sample embeddings");
  } else {
    embeddings_ = derive_sample_embeddings(std::move(embeddings_));
  }

  for (const auto& [key, scores] : external_.scores()) {
    auto it = by_id_.find(key.first);
    if (it == by_id_.end()) {
      throw Error(Errc::invalid_format, "importance scores reference unknown sample " + key.first);
    }
    if (scores.size() != samples_[it->second].tokens.size()) {
      throw Error(Errc::token_count_mismatch,
                  "importance metric \"" + key.second + "\" for sample " + key.first +
                      " has " + std::to_string(scores.size()) + " scores for " +
                      std::to_string(samples_[it->second].tokens.size()) + " tokens");
    }
    for (double v : scores) {
      if (!std::isfinite(v)) {
        throw Error(Errc::non_finite_value, "importance scores for sample " + key.first +
                                                " contain a non-finite value");
      }
    }
  }
}

bool Dataset::has_label(std::string_view label) const {
  return std::binary_search(labels_.begin(), labels_.end(), label);
}

bool Dataset::is_stopword(std::string_view word) const {
  return stopwords_.find(std::string(word)) != stopwords_.end();
}

std::optional<std::size_t> Dataset::find(std::string_view sample_id) const {
  auto it = by_id_.find(std::string(sample_id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::size_t Dataset::index_of(std::string_view sample_id) const {
  if (auto idx = find(sample_id)) return *idx;
  throw Error(Errc::sample_not_found, "no sample with id " + std::string(sample_id));
}

std::vector<Sample> read_corpus(const std::filesystem::path& path) {
  std::vector<Sample> samples;
  for_each_jsonl(path, [&](const json& obj, const std::string& where) {
    Sample s;
    s.id = require_string(obj, "id", where);
    s.text = require_string(obj, "text", where);
    for (const auto& tok : require_array(obj, "tokens", where)) {
      if (!tok.is_string()) throw Error(Errc::invalid_format, where + ": tokens must be strings");
      s.tokens.push_back(tok.get<std::string>());
    }
    if (s.tokens.empty()) throw Error(Errc::invalid_format, where + ": sample " + s.id + " has no tokens");
    s.gold_label = require_string(obj, "gold_label", where);
    s.pred_label = require_string(obj, "pred_label", where);
    auto conf = obj.find("confidence");
    if (conf == obj.end() || !conf->is_number()) {
      throw Error(Errc::invalid_format, where + ": field \"confidence\" must be a number");
    }
    s.confidence = conf->get<double>();
    if (!(s.confidence >= 0.0 && s.confidence <= 1.0)) {
      throw Error(Errc::invalid_format, where + ": confidence must lie in [0,1]");
    }
    if (auto dom = obj.find("domain"); dom != obj.end() && !dom->is_null()) {
      if (!dom->is_string()) throw Error(Errc::invalid_format, where + ": field \"domain\" must be a string");
      s.domain_tag = dom->get<std::string>();
    }
    samples.push_back(std::move(s));
  });
  if (samples.empty()) throw Error(Errc::empty_corpus, "empty corpus: " + path.string());
  return samples;
}

Eigen::MatrixXd read_sample_embeddings(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  detail::ByteReader in(bytes, path.string());
  in.expect_magic("SEMB");
  if (in.read<std::uint32_t>() != kEmbeddingVersion) in.fail("unsupported version");
  const auto m = in.read<std::uint32_t>();
  const auto d = in.read<std::uint32_t>();
  if (d == 0) in.fail("dimension must be positive");
  if (in.remaining() != std::size_t{m} * d * sizeof(float)) {
    in.fail("payload size does not match M*d float32 values");
  }
  Eigen::MatrixXd out(m, d);
  for (std::uint32_t i = 0; i < m; ++i) {
    for (std::uint32_t j = 0; j < d; ++j) {
      const float v = in.read<float>();
      if (!std::isfinite(v)) {
        throw Error(Errc::non_finite_value, path.string() + ": non-finite value at row " +
                                                std::to_string(i) + ", column " + std::to_string(j));
      }
      out(i, j) = v;
    }
  }
  return out;
}

std::vector<Eigen::MatrixXd> read_token_embeddings(const std::filesystem::path& path,
                                                   Eigen::Index* dim) {
  const auto bytes = detail::read_file_bytes(path);
  detail::ByteReader in(bytes, path.string());
  in.expect_magic("SEMT");
  if (in.read<std::uint32_t>() != kEmbeddingVersion) in.fail("unsupported version");
  const auto m = in.read<std::uint32_t>();
  const auto d = in.read<std::uint32_t>();
  if (d == 0) in.fail("dimension must be positive");
  std::vector<Eigen::MatrixXd> out;
  out.reserve(m);
  for (std::uint32_t i = 0; i < m; ++i) {
    const auto n = in.read<std::uint32_t>();
    if (in.remaining() < std::size_t{n} * d * sizeof(float)) in.fail("truncated token block");
    Eigen::MatrixXd block(n, d);
    for (std::uint32_t r = 0; r < n; ++r) {
      for (std::uint32_t c = 0; c < d; ++c) {
        const float v = in.read<float>();
        if (!std::isfinite(v)) {
          throw Error(Errc::non_finite_value, path.string() + ": non-finite value in sample " +
                                                  std::to_string(i) + ", token " + std::to_string(r));
        }
        block(r, c) = v;
      }
    }
    out.push_back(std::move(block));
  }
  if (!in.at_end()) in.fail("trailing bytes after last sample");
  if (dim) *dim = d;
  return out;
}

ConceptLexicon read_lexicon(const std::filesystem::path& path) {
  ConceptLexicon::Map entries;
  for_each_jsonl(path, [&](const json& obj, const std::string& where) {
    const auto raw = require_string(obj, "word", where);
    const auto word = normalize_word(raw);
    if (!word) throw Error(Errc::invalid_format, where + ": word \"" + raw + "\" normalizes to nothing");
    std::set<std::string> concepts;
    for (const auto& c : require_array(obj, "concepts", where)) {
      if (!c.is_string()) throw Error(Errc::invalid_format, where + ": concepts must be strings");
      concepts.insert(c.get<std::string>());
    }
    if (concepts.empty()) throw Error(Errc::invalid_format, where + ": empty concept list");
    entries[*word].insert(concepts.begin(), concepts.end());
  });
  return ConceptLexicon(std::move(entries));
}

ExternalImportance read_importance(const std::filesystem::path& path) {
  ExternalImportance::Map scores;
  for_each_jsonl(path, [&](const json& obj, const std::string& where) {
    const auto id = require_string(obj, "id", where);
    const auto metric = require_string(obj, "metric", where);
    std::vector<double> values;
    for (const auto& v : require_array(obj, "scores", where)) {
      if (!v.is_number()) throw Error(Errc::invalid_format, where + ": scores must be numbers");
      values.push_back(v.get<double>());
    }
    if (!scores.emplace(ExternalImportance::Key{id, metric}, std::move(values)).second) {
      throw Error(Errc::duplicate_id, where + ": duplicate scores for (" + id + ", " + metric + ")");
    }
  });
  return ExternalImportance(std::move(scores));
}

std::set<std::string> read_stopwords(const std::filesystem::path& path) {
  std::istringstream in(detail::read_file_text(path));
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (auto w = normalize_word(line)) words.insert(*w);
  }
  return words;
}

Dataset load_corpus(const CorpusPaths& paths) {
  auto samples = read_corpus(paths.corpus);
  EmbeddingStore store;
  store.token_matrices = read_token_embeddings(paths.token_embeddings, &store.dim);
  if (paths.sample_embeddings) {
    store.sample_matrix = read_sample_embeddings(*paths.sample_embeddings);
    if (store.sample_matrix->cols() != store.dim) {
      throw Error(Errc::invalid_format, paths.sample_embeddings->string() +
                                            ": dimension differs from token embeddings");
    }
  }
  ConceptLexicon lexicon = paths.lexicon ? read_lexicon(*paths.lexicon) : ConceptLexicon{};
  ExternalImportance importance =
      paths.importance ? read_importance(*paths.importance) : ExternalImportance{};
  auto stopwords = paths.stopwords ? read_stopwords(*paths.stopwords) : default_stopwords();
  return Dataset(std::move(samples), std::move(store), std::move(lexicon),
                 std::move(importance), std::move(stopwords));
}

void write_corpus(const std::filesystem::path& path, const std::vector<Sample>& samples) {
  std::vector<json> rows;
  rows.reserve(samples.size());
  for (const auto& s : samples) {
    json row = {{"id", s.id},
                {"text", s.text},
                {"tokens", s.tokens},
                {"gold_label", s.gold_label},
                {"pred_label", s.pred_label},
                {"confidence", s.confidence}};
    if (s.domain_tag) row["domain"] = *s.domain_tag;
    rows.push_back(std::move(row));
  }
  write_lines(path, rows);
}

void write_sample_embeddings(const std::filesystem::path& path, const Eigen::MatrixXd& matrix) {
  detail::ByteWriter out;
  out.write_raw("SEMB");
  out.write<std::uint32_t>(kEmbeddingVersion);
  out.write<std::uint32_t>(static_cast<std::uint32_t>(matrix.rows()));
  out.write<std::uint32_t>(static_cast<std::uint32_t>(matrix.cols()));
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) out.write<float>(static_cast<float>(matrix(i, j)));
  }
  detail::write_file_bytes(path, out.bytes());
}

void write_token_embeddings(const std::filesystem::path& path,
                            const std::vector<Eigen::MatrixXd>& matrices, Eigen::Index dim) {
  detail::ByteWriter out;
  out.write_raw("SEMT");
  out.write<std::uint32_t>(kEmbeddingVersion);
  out.write<std::uint32_t>(static_cast<std::uint32_t>(matrices.size()));
  out.write<std::uint32_t>(static_cast<std::uint32_t>(dim));
  for (const auto& block : matrices) {
    out.write<std::uint32_t>(static_cast<std::uint32_t>(block.rows()));
    for (Eigen::Index r = 0; r < block.rows(); ++r) {
      for (Eigen::Index c = 0; c < block.cols(); ++c) out.write<float>(static_cast<float>(block(r, c)));
    }
  }
  detail::write_file_bytes(path, out.bytes());
}

void write_lexicon(const std::filesystem::path& path, const ConceptLexicon& lexicon) {
  std::vector<json> rows;
  for (const auto& [word, concepts] : lexicon.entries()) {
    rows.push_back({{"word", word}, {"concepts", concepts}});
  }
  write_lines(path, rows);
}

void write_importance(const std::filesystem::path& path, const ExternalImportance& importance) {
  std::vector<json> rows;
  for (const auto& [key, scores] : importance.scores()) {
    rows.push_back({{"id", key.first}, {"metric", key.second}, {"scores", scores}});
  }
  write_lines(path, rows);
}

void write_stopwords(const std::filesystem::path& path, const std::set<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    out += w;
    out += '\n';
  }
  detail::write_file_bytes(path, out);
}

CorpusPaths export_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  CorpusPaths paths;
  paths.corpus = dir / "corpus.jsonl";
  paths.token_embeddings = dir / "tokens.semt";
  write_corpus(paths.corpus, dataset.samples());
  write_token_embeddings(paths.token_embeddings, dataset.embeddings().token_matrices,
                         dataset.embeddings().dim);
  if (!dataset.embeddings().sample_matrix_derived) {
    paths.sample_embeddings = dir / "samples.semb";
    write_sample_embeddings(*paths.sample_embeddings, dataset.sample_embeddings());
  }
  if (!dataset.lexicon().empty()) {
    paths.lexicon = dir / "lexicon.jsonl";
    write_lexicon(*paths.lexicon, dataset.lexicon());
  }
  if (!dataset.external_importance().scores().empty()) {
    paths.importance = dir / "importance.jsonl";
    write_importance(*paths.importance, dataset.external_importance());
  }
  paths.stopwords = dir / "stopwords.txt";
  write_stopwords(*paths.stopwords, dataset.stopwords());
  return paths;
}

}  // namespace textscape
