#include "support.hpp"

#include <atomic>
#include <map>
#include <tuple>

#include "textscape/store.hpp"

namespace textscape::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& prefix) {
  static std::atomic<int> counter{0};
  std::random_device rd;
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto candidate = fs::temp_directory_path() /
                     (prefix + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    if (fs::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("cannot create a temporary directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

Sample make_sample(std::string id, std::vector<std::string> tokens, LabelId gold, LabelId pred,
                   double confidence) {
  Sample s;
  s.id = std::move(id);
  for (std::size_t i = 0; i < tokens.size(); ++i) s.text += (i ? " " : "") + tokens[i];
  s.tokens = std::move(tokens);
  s.gold_label = std::move(gold);
  s.pred_label = std::move(pred);
  s.confidence = confidence;
  return s;
}

Dataset make_dataset(std::vector<Sample> samples, std::vector<Eigen::MatrixXd> tokens, ConceptLexicon lexicon,
                     ExternalImportance external, std::set<std::string> stopwords) {
  EmbeddingStore store;
  store.dim = tokens.empty() ? 0 : tokens.front().cols();
  store.token_matrices = std::move(tokens);
  return Dataset(std::move(samples), std::move(store), std::move(lexicon), std::move(external),
                 std::move(stopwords));
}

std::vector<Eigen::MatrixXd> random_tokens(const std::vector<Sample>& samples, Eigen::Index dim,
                                           std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Eigen::MatrixXd> out;
  for (const auto& s : samples) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(s.tokens.size()), dim);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<Sample> random_samples(const RandomCorpusSpec& spec, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> word(0, spec.vocabulary - 1);
  std::uniform_int_distribution<int> length(spec.min_tokens, spec.max_tokens);
  std::uniform_int_distribution<int> label(0, spec.labels - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto word_name = [](int w) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "w%02d", w);
    return std::string(buf);
  };
  auto label_name = [](int l) { return "label_" + std::to_string(l); };

  std::vector<Sample> out;
  for (int i = 0; i < spec.samples; ++i) {
    std::vector<std::string> tokens;
    const int n = length(rng);
    for (int t = 0; t < n; ++t) tokens.push_back(word_name(word(rng)));
    const int gold = label(rng);
    int pred = gold;
    if (unit(rng) < spec.error_rate) pred = (gold + 1 + label(rng) % (spec.labels - 1)) % spec.labels;
    out.push_back(make_sample("s" + std::to_string(1000 + i), std::move(tokens), label_name(gold),
                              label_name(pred), unit(rng)));
  }
  return out;
}

namespace {

struct Intent {
  const char* label;
  std::vector<const char*> words;
};

const std::vector<Intent>& intents() {
  static const std::vector<Intent> table = {
      {"book_flight", {"book", "flight", "ticket", "paris", "tomorrow", "seat"}},
      {"cancel_flight", {"cancel", "flight", "booking", "refund", "my", "ticket"}},
      {"play_music", {"play", "song", "music", "jazz", "some", "loud"}},
      {"weather_query", {"weather", "rain", "paris", "today", "forecast", "cold"}},
  };
  return table;
}

}  // namespace

Dataset fixture_dataset() {
  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 5);
  std::uniform_int_distribution<int> length(3, 6);
  constexpr Eigen::Index dim = 8;
  const std::vector<const char*> fillers = {"the", "a", "please", "for", "me"};

  // One vector per word, pulled toward the centers of the intents using it.
  std::map<std::string, Eigen::VectorXd> vectors;
  auto vector_for = [&](const std::string& word) -> const Eigen::VectorXd& {
    auto it = vectors.find(word);
    if (it != vectors.end()) return it->second;
    Eigen::VectorXd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = 0.3 * normal(rng);
    for (std::size_t k = 0; k < intents().size(); ++k) {
      for (const char* w : intents()[k].words) {
        if (word == w) v(static_cast<Eigen::Index>(k)) += 1.0;
      }
    }
    return vectors.emplace(word, v).first->second;
  };

  std::vector<Sample> samples;
  std::vector<Eigen::MatrixXd> tokens;
  int serial = 0;
  for (int round = 0; round < 30; ++round) {
    for (std::size_t k = 0; k < intents().size(); ++k) {
      const auto& intent = intents()[k];
      std::vector<std::string> words;
      const int n = length(rng);
      for (int t = 0; t < n; ++t) words.emplace_back(intent.words[static_cast<std::size_t>(pick(rng))]);
      words.emplace_back(fillers[static_cast<std::size_t>(serial % 5)]);
      if (serial % 3 == 0) words.front()[0] = static_cast<char>(std::toupper(words.front()[0]));
      if (serial % 4 == 0) words.back() += "?";

      std::string pred = intent.label;
      if (k == 1 && round % 4 == 0) pred = "book_flight";
      if (k == 0 && round % 10 == 3) pred = "cancel_flight";
      if (k == 3 && round % 6 == 1) pred = "play_music";
      const double confidence = pred == intent.label ? 0.55 + 0.015 * round : 0.2 + 0.02 * (round % 10);

      Eigen::MatrixXd m(static_cast<Eigen::Index>(words.size()), dim);
      for (std::size_t t = 0; t < words.size(); ++t) {
        const auto key = normalize_word(words[t]).value_or(words[t]);
        Eigen::VectorXd noise(dim);
        for (Eigen::Index i = 0; i < dim; ++i) noise(i) = 0.05 * normal(rng);
        m.row(static_cast<Eigen::Index>(t)) = (vector_for(key) + noise).transpose();
      }
      char id[16];
      std::snprintf(id, sizeof id, "q%03d", serial++);
      samples.push_back(make_sample(id, std::move(words), intent.label, pred, confidence));
      tokens.push_back(std::move(m));
    }
  }

  ConceptLexicon lexicon({{"paris", {"a city"}},
                          {"flight", {"travel"}},
                          {"ticket", {"travel"}},
                          {"booking", {"travel"}},
                          {"song", {"music"}},
                          {"jazz", {"music", "a genre"}},
                          {"rain", {"weather"}},
                          {"forecast", {"weather"}},
                          {"cold", {"weather"}}});

  ExternalImportance::Map scores;
  for (std::size_t i = 0; i < 12; ++i) {
    std::vector<double> v;
    for (std::size_t t = 0; t < samples[i].tokens.size(); ++t) {
      v.push_back(std::sin(static_cast<double>(i * 7 + t)));
    }
    scores[{samples[i].id, "gradient"}] = std::move(v);
  }
  return make_dataset(std::move(samples), std::move(tokens), std::move(lexicon),
                      ExternalImportance(std::move(scores)), default_stopwords());
}

CorpusPaths write_fixture_inputs(const fs::path& dir) {
  fs::create_directories(dir);
  return export_dataset(fixture_dataset(), dir);
}

void build_fixture_store(const fs::path& store_dir, const std::string& id) {
  TempDir raw("fixture-inputs");
  const auto inputs = write_fixture_inputs(raw.path());
  ProjectionParams params;
  params.method = ProjectionMethod::pca;
  ingest_store(inputs, store_dir, id, params, 42);
  precompute_store(store_dir);
}

Dataset scripted_error_corpus() {
  const std::vector<std::string> labels = {"alpha", "bravo", "charlie", "delta", "echo", "foxtrot"};
  // (gold, pred, count); counts sum to 100 and include ties.
  const std::vector<std::tuple<int, int, int>> schedule = {
      {0, 1, 20}, {1, 0, 20}, {2, 3, 15}, {3, 2, 10}, {4, 5, 10}, {5, 4, 10}, {0, 2, 5}, {2, 0, 5}, {1, 5, 5}};
  std::vector<Sample> samples;
  int serial = 0;
  auto add = [&](int gold, int pred) {
    const double confidence = static_cast<double>(serial % 20) / 20.0;
    char id[16];
    std::snprintf(id, sizeof id, "e%03d", serial++);
    samples.push_back(make_sample(id, {labels[static_cast<std::size_t>(gold)], "word" + std::to_string(serial % 7)},
                                  labels[static_cast<std::size_t>(gold)], labels[static_cast<std::size_t>(pred)],
                                  confidence));
  };
  for (const auto& [gold, pred, count] : schedule) {
    for (int k = 0; k < count; ++k) add(gold, pred);
  }
  while (serial < 300) add(serial % 6, serial % 6);
  std::mt19937_64 rng(100);
  auto tokens = random_tokens(samples, 5, rng);
  return make_dataset(std::move(samples), std::move(tokens));
}

ProjectedLayout random_layout(std::size_t count, std::mt19937_64& rng, double spread) {
  std::uniform_real_distribution<double> u(-spread, spread);
  ProjectedLayout layout;
  layout.positions.resize(static_cast<Eigen::Index>(count), 2);
  for (Eigen::Index i = 0; i < layout.positions.size(); ++i) layout.positions.data()[i] = u(rng);
  return layout;
}

}  // namespace textscape::testing
