// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "textscape/explain.hpp"
#include "textscape/store.hpp"

#include "oracles.hpp"
#include "parity.hpp"
#include "server_fixture.hpp"
#include "support.hpp"

using namespace textscape;
using textscape::testing::make_dataset;
using textscape::testing::make_sample;
namespace fs = std::filesystem;

namespace {

constexpr int kSkipped = 77;

enum class Status { pass, fail, not_run };

struct Outcome {
  Status status = Status::fail;
  std::string detail;
};

/// Collects failed checks for one criterion.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    ++count_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  Outcome outcome(const std::string& summary) const {
    if (failed_ == 0) return {Status::pass, summary};
    std::string detail = std::to_string(failed_) + "/" + std::to_string(count_) + " checks failed";
    for (const auto& f : failures_) detail += "; " + f;
    return {Status::fail, detail};
  }

 private:
  int count_ = 0;
  int failed_ = 0;
  std::vector<std::string> failures_;
};

std::string fmt(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

std::set<std::string> names(const std::vector<LocalWord>& words) {
  std::set<std::string> out;
  for (const auto& w : words) out.insert(w.word);
  return out;
}

std::set<std::string> names(const std::vector<oracle::BruteWord>& words) {
  std::set<std::string> out;
  for (const auto& w : words) out.insert(w.word);
  return out;
}

std::vector<std::size_t> all_indices(const Dataset& d) {
  std::vector<std::size_t> v(d.size());
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

Eigen::MatrixXd gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// 500 samples over "w00".."w39": eight topics own four words each, eight
// words are generic. Samples sit around their topic's center.
struct TopicCorpus {
  Dataset dataset;
  ProjectedLayout layout;
};

TopicCorpus topic_corpus(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> topic_of(0, 7);
  std::uniform_int_distribution<int> length(3, 8);
  std::uniform_int_distribution<int> own(0, 3);
  std::uniform_int_distribution<int> generic(32, 39);
  std::bernoulli_distribution topical(0.6);
  std::normal_distribution<double> noise(0.0, 0.3);
  const double pi = std::acos(-1.0);
  std::vector<Sample> samples;
  ProjectedLayout layout;
  layout.positions.resize(500, 2);
  for (int i = 0; i < 500; ++i) {
    const int topic = topic_of(rng);
    std::vector<std::string> tokens;
    const int n = length(rng);
    for (int t = 0; t < n; ++t) {
      const int w = topical(rng) ? 4 * topic + own(rng) : generic(rng);
      char word[8];
      std::snprintf(word, sizeof word, "w%02d", w);
      tokens.emplace_back(word);
    }
    const std::string label = "t" + std::to_string(topic);
    samples.push_back(make_sample("s" + std::to_string(i), tokens, label, label));
    layout.positions(i, 0) = 3.0 * std::cos(2 * pi * topic / 8) + noise(rng);
    layout.positions(i, 1) = 3.0 * std::sin(2 * pi * topic / 8) + noise(rng);
  }
  auto tokens = textscape::testing::random_tokens(samples, 6, rng);
  return {make_dataset(std::move(samples), std::move(tokens)), std::move(layout)};
}

Outcome lwc_oracle() {
  const auto corpus = topic_corpus(2024);
  const auto& d = corpus.dataset;
  const auto& layout = corpus.layout;

  LwcParams params;
  params.freq_threshold = 5;
  params.locality_max = 0.5;
  const auto start = std::chrono::steady_clock::now();
  const auto got = local_words(build_index(d, layout), params);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto occ = oracle::recount(d, all_indices(d));
  const auto expect = oracle::brute_filter(occ, layout.positions, oracle::brute_global_scale(layout.positions, 0.8),
                                           5, 0.5, 0.8, &d.stopwords());
  Checks checks;
  checks.expect(occ.size() == 40, "vocabulary has " + std::to_string(occ.size()) + " words");
  checks.expect(names(got) == names(expect), "word sets differ");
  checks.expect(!expect.empty() && expect.size() < occ.size(), "oracle selection is trivial");
  checks.expect(seconds < 1.0, "runtime " + fmt(seconds) + " s");
  return checks.outcome(std::to_string(got.size()) + " of " + std::to_string(occ.size()) +
                        " words selected, identical to brute force; " + fmt(seconds) + " s");
}

Outcome lwc_planted() {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> filler(0, 9);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<Sample> samples;
  std::vector<Eigen::Vector2d> pos;
  for (int i = 0; i < 400; ++i) {
    samples.push_back(make_sample("u" + std::to_string(i), {"f" + std::to_string(filler(rng))}, "a", "a"));
    pos.emplace_back(u(rng), u(rng));
  }
  for (int i = 0; i < 40; ++i) {
    samples.push_back(make_sample("r" + std::to_string(i), {"spread"}, "a", "a"));
    pos.emplace_back(u(rng), u(rng));
  }
  Eigen::MatrixXd background(static_cast<Eigen::Index>(pos.size()), 2);
  for (std::size_t i = 0; i < pos.size(); ++i) background.row(static_cast<Eigen::Index>(i)) = pos[i].transpose();
  const double sigma = 0.05 * oracle::brute_global_scale(background, 0.8);
  for (int i = 0; i < 40; ++i) {
    samples.push_back(make_sample("c" + std::to_string(i), {"spot"}, "a", "a"));
    pos.emplace_back(0.4 + sigma * n(rng), -0.3 + sigma * n(rng));
  }
  auto tokens = textscape::testing::random_tokens(samples, 3, rng);
  const auto d = make_dataset(std::move(samples), std::move(tokens));
  ProjectedLayout layout;
  layout.positions.resize(static_cast<Eigen::Index>(pos.size()), 2);
  for (std::size_t i = 0; i < pos.size(); ++i) layout.positions.row(static_cast<Eigen::Index>(i)) = pos[i].transpose();

  const auto index = build_index(d, layout);
  Checks checks;
  std::set<std::string> previous;
  bool first = true;
  double spot_locality = 0.0;
  double spread_locality = 0.0;
  for (int T : {5, 10, 20, 30}) {
    LwcParams params;
    params.freq_threshold = T;
    params.locality_max = 0.5;
    const auto words = local_words(index, params);
    const auto current = names(words);
    checks.expect(current.count("spot") == 1, "planted word missing at T=" + std::to_string(T));
    checks.expect(current.count("spread") == 0, "uniform word emitted at T=" + std::to_string(T));
    if (!first) {
      checks.expect(std::includes(previous.begin(), previous.end(), current.begin(), current.end()),
                    "T=" + std::to_string(T) + " is not a subset of the previous threshold");
    }
    previous = current;
    first = false;
  }
  spot_locality = locality_score(index.positions("spot"), index.global_scale(0.8));
  spread_locality = locality_score(index.positions("spread"), index.global_scale(0.8));
  return checks.outcome("clustered locality " + fmt(spot_locality) + " emitted, uniform locality " +
                        fmt(spread_locality) + " rejected, T in {5,10,20,30} nested");
}

Outcome recursive_concepts() {
  std::mt19937_64 rng(12);
  auto samples = textscape::testing::random_samples({}, rng);
  ConceptLexicon::Map map;
  for (int i = 0; i < 10; ++i) {
    char w[8];
    std::snprintf(w, sizeof w, "w%02d", i * 3);
    map[w] = {"c" + std::to_string(i % 4), i % 3 == 0 ? "shared" : "c" + std::to_string(i % 4)};
  }
  const ConceptLexicon lexicon(map);
  const auto d = make_dataset(samples, textscape::testing::random_tokens(samples, 3, rng), lexicon);
  ProjectedLayout layout = textscape::testing::random_layout(d.size(), rng);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const int w = std::stoi(d.sample(i).tokens[0].substr(1));
    layout.positions.row(static_cast<Eigen::Index>(i)) *= 0.2;
    layout.positions(static_cast<Eigen::Index>(i), 0) += w % 5;
  }
  const auto index = build_index(d, layout);
  Checks checks;
  std::size_t emitted = 0;
  for (int T : {1, 2, 4, 8}) {
    for (double lambda : {0.5, 1.0, 2.0}) {
      LwcParams params;
      params.freq_threshold = T;
      params.locality_max = lambda;
      LwcParams cparams = params;
      cparams.freq_threshold = 2 * T;
      const auto got = local_concepts(index, lexicon, params, cparams);
      const auto expect = oracle::brute_concepts(d, layout.positions, lexicon, T, lambda, 2 * T, lambda, 0.8, true);
      const std::string at = "T=" + std::to_string(T) + " lambda=" + fmt(lambda);
      checks.expect(names(got) == names(expect), "concept sets differ at " + at);
      for (const auto& c : got) {
        const auto it = std::find_if(expect.begin(), expect.end(), [&](const auto& e) { return e.word == c.word; });
        checks.expect(it != expect.end() && it->frequency == c.frequency, "frequency of " + c.word + " at " + at);
      }
      emitted += got.size();
    }
  }
  checks.expect(emitted > 0, "no concepts were emitted in any setting");
  return checks.outcome("12 settings, " + std::to_string(emitted) + " concepts, identical to the two-stage brute force");
}

Outcome tsne_numerics() {
  std::mt19937_64 rng(404);
  ProjectionParams params;
  Checks checks;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = gaussian(rng, 10, 5);
    const auto P = joint_probabilities(x, 3.0);
    const auto Y = gaussian(rng, 10, 2);
    const auto fd = oracle::finite_difference([&](const Eigen::MatrixXd& y) { return oracle::naive_kl(P, y); }, Y, 1e-5);
    const double rel = (tsne_gradient(P, Y) - fd).norm() / std::max(fd.norm(), 1e-12);
    worst = std::max(worst, rel);
    checks.expect(rel <= 1e-4, "gradient relative error " + fmt(rel) + " on instance " + std::to_string(trial));

    const auto layout = project(x, params, 42);
    const auto Pl = joint_probabilities(pca_reduce(x, layout.params.pca_dims), layout.params.perplexity);
    const double initial = kl_divergence(Pl, tsne_initial_positions(10, 42));
    const double final_kl = kl_divergence(Pl, layout.positions);
    checks.expect(final_kl <= initial, "KL rose from " + fmt(initial) + " to " + fmt(final_kl));
    if (trial == 0) {
      const auto again = project(x, params, 42);
      checks.expect(again.positions == layout.positions, "seed 42 runs differ");
    }
  }
  return checks.outcome("worst gradient relative error " + fmt(worst) + ", KL non-increasing on 20/20, seed 42 bitwise stable");
}

Outcome decomposition() {
  std::mt19937_64 rng(55);
  std::uniform_int_distribution<int> len(1, 15);
  Checks checks;
  double worst = 0.0;
  double worst_self = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = gaussian(rng, len(rng), 16);
    const auto b = gaussian(rng, len(rng), 16);
    const auto c = similarity_contributions(a, b);
    const double pooled = oracle::cosine(a.colwise().mean().transpose(), b.colwise().mean().transpose());
    const double err = std::max(std::abs(sum(c.query) - pooled), std::abs(sum(c.other) - pooled));
    worst = std::max(worst, err);
    checks.expect(err <= 1e-6, "pair " + std::to_string(trial) + " off by " + fmt(err));
    const auto self = similarity_contributions(a, a);
    const double self_err = std::abs(sum(self.query) - 1.0);
    worst_self = std::max(worst_self, self_err);
    checks.expect(self_err <= 1e-9, "self sum off by " + fmt(self_err));
  }
  return checks.outcome("100 pairs, worst deviation " + fmt(worst) + ", self worst " + fmt(worst_self));
}

std::vector<std::size_t> ranking(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return scores[x] > scores[y]; });
  return order;
}

Outcome vifi_contracts() {
  std::mt19937_64 rng(77);
  textscape::testing::RandomCorpusSpec spec;
  spec.samples = 80;
  spec.labels = 4;
  spec.error_rate = 0.3;
  auto samples = textscape::testing::random_samples(spec, rng);
  auto tokens = textscape::testing::random_tokens(samples, 6, rng);
  const auto d = make_dataset(samples, tokens);
  const auto ctx = make_explain_context(d);
  Checks checks;
  std::size_t vectors = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& s = d.sample(i);
    const auto p = vifi(d, ctx, s.id, default_metrics(d, s.id));
    for (const auto& m : p.metrics) {
      checks.expect(std::abs(sum(p.scores.at(m)) - 1.0) <= 1e-9, m + " of " + s.id + " does not sum to 1");
      ++vectors;
    }
    const auto expect = normalize_importance(oracle::leave_one_out(d.token_embeddings(i), ctx.prototypes.at(s.pred_label)));
    const auto& got = p.scores.at("occlusion");
    for (std::size_t t = 0; t < got.size(); ++t) {
      checks.expect(std::abs(got[t] - expect[t]) <= 1e-9, "occlusion of " + s.id + " differs from leave-one-out");
    }
  }

  // Rescale one sample's token rows; prototypes stay those of the original corpus.
  std::uniform_real_distribution<double> factor(0.1, 10.0);
  std::size_t rescaled = 0;
  for (std::size_t i = 0; i < d.size(); i += 4) {
    if (d.sample(i).tokens.size() < 2) continue;
    auto scaled_tokens = tokens;
    scaled_tokens[i] *= factor(rng);
    const auto scaled = make_dataset(samples, scaled_tokens);
    const auto& id = d.sample(i).id;
    const auto before = vifi(d, ctx, id, {"occlusion", "similarity"});
    const auto after = vifi(scaled, ctx, id, {"occlusion", "similarity"});
    for (const char* m : {"occlusion", "similarity"}) {
      checks.expect(ranking(before.scores.at(m)) == ranking(after.scores.at(m)),
                    std::string(m) + " ranking of " + id + " changed under rescaling");
    }
    ++rescaled;
  }
  return checks.outcome(std::to_string(vectors) + " vectors sum to 1, occlusion equals leave-one-out, " +
                        std::to_string(rescaled) + " rescaled samples keep both rankings");
}

Outcome confusion_analytics() {
  const auto d = textscape::testing::scripted_error_corpus();
  const auto table = confusion_table(d);
  const auto expect = oracle::brute_confusions(d);
  Checks checks;
  checks.expect(table.size() == expect.size(), "pair count differs");
  int total = 0;
  for (const auto& e : table) {
    const auto it = expect.find({e.gold, e.pred});
    checks.expect(it != expect.end() && it->second == e.frequency, e.gold + "->" + e.pred + " count differs");
    total += e.frequency;
  }
  checks.expect(total == 100, "total errors " + std::to_string(total));
  for (std::size_t i = 1; i < table.size(); ++i) {
    const auto& a = table[i - 1];
    const auto& b = table[i];
    const bool strictly_before = a.frequency > b.frequency ||
                                 (a.frequency == b.frequency && std::tie(a.gold, a.pred) < std::tie(b.gold, b.pred));
    checks.expect(strictly_before, "frequency order broken at row " + std::to_string(i));
  }
  std::mt19937_64 rng(6);
  for (int round = 0; round < 10; ++round) {
    auto shuffled = table;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    sort_confusions(shuffled, ConfusionSortKey::frequency);
    checks.expect(shuffled == table, "sorting a shuffled table gives a different order");
  }
  const auto shares = error_shares(d);
  double fn = 0.0;
  double fp = 0.0;
  for (const auto& s : shares.false_negatives) fn += s.share;
  for (const auto& s : shares.false_positives) fp += s.share;
  checks.expect(std::abs(fn - 1.0) <= 1e-9, "false-negative shares sum to " + fmt(fn));
  checks.expect(std::abs(fp - 1.0) <= 1e-9, "false-positive shares sum to " + fmt(fp));
  return checks.outcome(std::to_string(table.size()) + " pairs, 100 errors, total order with (gold, pred) tie-break, shares sum to 1");
}

Outcome comparison_statistics() {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> word(0, 29);
  ItemCounts a, b;
  for (int i = 0; i < 300; ++i) {
    for (int t = 0; t < 6; ++t) {
      ++a["v" + std::to_string(word(rng))];
      ++b["v" + std::to_string(word(rng))];
    }
    if (i % 2 == 0) ++b["planted"];
    if (i % 10 == 0) ++a["planted"];
  }
  Checks checks;
  for (const auto& item : divergence(a, a, ItemKind::word)) {
    checks.expect(item.z == 0.0 && item.verdict == Verdict::shared, item.item + " not shared in (A, A)");
  }
  const auto ab = divergence(a, b, ItemKind::word);
  const auto ba = divergence(b, a, ItemKind::word);
  std::map<std::string, DivergenceItem> by_item;
  for (const auto& it : ba) by_item[it.item] = it;
  checks.expect(ab.size() == ba.size(), "item sets differ");
  for (const auto& it : ab) {
    const auto o = by_item.find(it.item);
    checks.expect(o != by_item.end() && o->second.z == -it.z, it.item + " is not negated");
  }
  double planted_z = 0.0;
  for (const auto& it : ab) {
    if (it.item == "planted") {
      planted_z = it.z;
      checks.expect(it.verdict == Verdict::b_side, "planted word not flagged to side B");
    }
  }
  checks.expect(std::abs(planted_z) > 1.96, "|z| of the planted word is " + fmt(std::abs(planted_z)));
  return checks.outcome("(A, A) all shared at z = 0, swap negates " + std::to_string(ab.size()) +
                        " items, planted word z = " + fmt(planted_z) + " on side B");
}

Outcome geometry() {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> size(1, 50);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> g(-5, 5);
  Checks checks;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Point2<double>> pts;
    const int n = size(rng);
    for (int i = 0; i < n; ++i) {
      if (trial % 2 == 0) pts.emplace_back(g(rng), g(rng));
      else pts.emplace_back(u(rng), u(rng));
    }
    auto hull = convex_hull(pts);
    std::sort(hull.begin(), hull.end(),
              [](const auto& p, const auto& q) { return p.x() != q.x() ? p.x() < q.x() : p.y() < q.y(); });
    checks.expect(hull == oracle::brute_hull_vertices(pts), "hull instance " + std::to_string(trial) + " differs");
  }
  double worst = -1.0;
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd p(5 + trial, 2);
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = n(rng);
    const Eigen::VectorXd m = geometric_median(p);
    const double gap = oracle::median_objective(p, m) - oracle::grid_search_median_objective(p);
    worst = std::max(worst, gap);
    checks.expect(gap <= 1e-4, "median objective exceeds the grid minimum by " + fmt(gap));
  }
  return checks.outcome("200 hulls equal brute force; median objective minus grid minimum at most " + fmt(worst));
}

Outcome benchmark_facts() {
  const char* dir = std::getenv("TEXTSCAPE_BENCHMARK_DIR");
  if (!dir || !fs::is_directory(dir)) {
    return {Status::not_run, "data unavailable: set TEXTSCAPE_BENCHMARK_DIR to a directory with "
                             "banking77/, hwu64/ and clinc150/ corpus.jsonl test splits"};
  }
  struct Expect {
    const char* name;
    std::size_t samples;
    std::size_t labels;  // 0 when unspecified
  };
  Checks checks;
  std::string summary;
  for (const Expect& e : {Expect{"banking77", 3080, 77}, Expect{"hwu64", 1076, 0}, Expect{"clinc150", 4500, 150}}) {
    const auto path = fs::path(dir) / e.name / "corpus.jsonl";
    try {
      const auto samples = read_corpus(path);
      std::set<std::string> labels;
      for (const auto& s : samples) labels.insert(s.gold_label);
      checks.expect(samples.size() == e.samples, std::string(e.name) + " has " + std::to_string(samples.size()) + " samples");
      if (e.labels) checks.expect(labels.size() == e.labels, std::string(e.name) + " has " + std::to_string(labels.size()) + " labels");
      summary += std::string(summary.empty() ? "" : ", ") + e.name + " " + std::to_string(samples.size()) + "/" +
                 std::to_string(labels.size());
    } catch (const std::exception& ex) {
      checks.expect(false, std::string(e.name) + ": " + ex.what());
    }
  }
  return checks.outcome("samples/labels: " + summary);
}

Outcome cli_http_parity(const std::string& cli) {
  textscape::testing::TempDir dir("acceptance");
  const auto store = dir / "store";
  textscape::testing::build_fixture_store(store);
  auto registry = std::make_shared<Registry>();
  registry->add(load_entry(store));
  textscape::testing::RunningService server(registry);
  auto client = server.client();
  std::mt19937_64 rng(1111);
  Checks checks;
  std::string summary;
  for (const char* view : {"local-words", "confusions", "compare", "explain"}) {
    int ok = 0;
    int errors = 0;
    for (const auto& c : textscape::testing::parity_cases(view, 10, rng, "fixture", store.string())) {
      const auto outcome = textscape::testing::check_parity(client, cli, c);
      checks.expect(outcome.identical, std::string(view) + ": " + outcome.detail);
      auto res = c.body.empty() ? client.Get(c.path, c.query, httplib::Headers{})
                                : client.Post(c.path, c.body, "application/json");
      if (res && res->status == 200) ++ok;
      else ++errors;
    }
    checks.expect(ok >= 5, std::string(view) + ": only " + std::to_string(ok) + " of 10 requests succeeded");
    summary += std::string(summary.empty() ? "" : ", ") + view + " " + std::to_string(ok) + " ok + " +
               std::to_string(errors) + " error";
  }
  return checks.outcome("identical output on 40 requests (" + summary + ")");
}

struct Criterion {
  int number;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> selected;
  std::string cli = TEXTSCAPE_CLI_PATH;
  app.add_option("--criteria", selected, "Criteria to run (default: all)")->delimiter(',')->check(CLI::Range(1, 11));
  app.add_option("--cli", cli, "Path to the textscape binary");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "LWC oracle equivalence", lwc_oracle},
      {2, "LWC planted signal", lwc_planted},
      {3, "recursive concepts", recursive_concepts},
      {4, "t-SNE numerics", tsne_numerics},
      {5, "decomposition identity", decomposition},
      {6, "VIFI contracts", vifi_contracts},
      {7, "confusion analytics", confusion_analytics},
      {8, "comparison statistics", comparison_statistics},
      {9, "geometry", geometry},
      {10, "benchmark dataset facts", benchmark_facts},
      {11, "CLI/HTTP parity", [&] { return cli_http_parity(cli); }},
  };

  int passed = 0;
  int failed = 0;
  int not_run = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.number) == selected.end()) continue;
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {Status::fail, std::string("exception: ") + e.what()};
    }
    const char* tag = outcome.status == Status::pass ? "PASS" : outcome.status == Status::fail ? "FAIL" : "NOT RUN";
    std::cout << "[" << tag << "] " << c.number << ". " << c.title << ": " << outcome.detail << std::endl;
    (outcome.status == Status::pass ? passed : outcome.status == Status::fail ? failed : not_run)++;
  }
  std::cout << passed << " passed, " << failed << " failed, " << not_run << " not run" << std::endl;
  if (failed > 0) return 1;
  if (passed == 0 && not_run > 0) return kSkipped;
  return 0;
}
