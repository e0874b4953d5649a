#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "support.hpp"

using namespace textscape;
using nlohmann::json;
using textscape::testing::TempDir;
namespace fs = std::filesystem;

namespace {

std::shared_ptr<const DatasetEntry> fixture_entry() {
  static const auto entry = [] {
    TempDir dir;
    textscape::testing::build_fixture_store(dir / "store");
    return load_entry(dir / "store");
  }();
  return entry;
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected textscape::Error");
  return Errc::io_error;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Compares a payload with tests/golden/<name>.json byte for byte.
// TEXTSCAPE_UPDATE_GOLDEN=1 rewrites the file instead.
void check_golden(const std::string& name, const json& payload) {
  const fs::path path = fs::path(TEXTSCAPE_GOLDEN_DIR) / (name + ".json");
  const std::string text = payload.dump(2) + "\n";
  if (const char* update = std::getenv("TEXTSCAPE_UPDATE_GOLDEN"); update && std::string(update) == "1") {
    fs::create_directories(path.parent_path());
    std::ofstream(path, std::ios::binary) << text;
    return;
  }
  REQUIRE_MESSAGE(fs::exists(path), "missing golden file " << path);
  CHECK(slurp(path) == text);
}

std::shared_ptr<Registry> fixture_registry() {
  auto registry = std::make_shared<Registry>();
  registry->add(fixture_entry());
  return registry;
}

}  // namespace

TEST_CASE("wire_number") {
  CHECK(wire_number(0.0) == 0.0);
  CHECK(wire_number(1.0 / 3.0) == 0.333333333);
  CHECK(wire_number(-123456.7891234) == -123456.789);
  CHECK(wire_number(wire_number(2.0 / 7.0)) == wire_number(2.0 / 7.0));
  CHECK(std::isinf(wire_number(std::numeric_limits<double>::infinity())));
}

TEST_CASE("http status mapping and error body") {
  CHECK(http_status(Errc::dataset_not_found) == 404);
  CHECK(http_status(Errc::sample_not_found) == 404);
  CHECK(http_status(Errc::route_not_found) == 404);
  CHECK(http_status(Errc::empty_group) == 422);
  CHECK(http_status(Errc::no_candidate) == 422);
  CHECK(http_status(Errc::degenerate_input) == 422);
  CHECK(http_status(Errc::dataset_exists) == 409);
  CHECK(http_status(Errc::io_error) == 500);
  CHECK(http_status(Errc::invalid_region) == 400);
  const auto body = error_payload(Error(Errc::unknown_label, "unknown label x"));
  CHECK(body == json{{"error", {{"code", "unknown_label"}, {"message", "unknown label x"}}}});
}

TEST_CASE("registry") {
  Registry r;
  r.add(fixture_entry());
  CHECK(r.get("fixture") == fixture_entry());
  CHECK(code_of([&] { r.get("nope"); }) == Errc::dataset_not_found);
  CHECK(code_of([&] { r.add(fixture_entry()); }) == Errc::dataset_exists);
  CHECK(r.list().size() == 1);
  const auto payload = datasets_payload(r);
  CHECK(payload["datasets"][0]["sample_count"] == 120);
  CHECK(payload["datasets"][0]["label_count"] == 4);
  CHECK(payload["datasets"][0]["dim"] == 8);
}

TEST_CASE("points payload") {
  const auto e = fixture_entry();
  const auto all = points_payload(*e, {});
  CHECK(all["points"].size() == 120);
  const auto errors = points_payload(*e, {{"errors_only", "true"}});
  CHECK(errors["points"].size() == 16);
  for (const auto& p : errors["points"]) CHECK(p["correct"] == false);
  const auto band = points_payload(*e, {{"conf_lo", "0.2"}, {"conf_hi", "0.3"}});
  for (const auto& p : band["points"]) {
    CHECK(p["confidence"].get<double>() >= 0.2);
    CHECK(p["confidence"].get<double>() <= 0.3);
  }
  const auto labelled = points_payload(*e, {{"labels", "play_music"}});
  for (const auto& p : labelled["points"]) CHECK((p["gold"] == "play_music" || p["pred"] == "play_music"));

  CHECK(code_of([&] { points_payload(*e, {{"bogus", "1"}}); }) == Errc::invalid_argument);
  CHECK(code_of([&] { points_payload(*e, {{"labels", "nope"}}); }) == Errc::unknown_label);
  CHECK(code_of([&] { points_payload(*e, {{"errors_only", "maybe"}}); }) == Errc::invalid_argument);
  CHECK(code_of([&] { points_payload(*e, {{"conf_lo", "abc"}}); }) == Errc::invalid_argument);
}

TEST_CASE("local-words payload") {
  const auto e = fixture_entry();
  SUBCASE("rows equal the engine on the same parameters") {
    const auto payload = local_words_payload(*e, {{"freq", "10"}, {"locality", "0.6"}});
    LwcParams p;
    p.freq_threshold = 10;
    p.locality_max = 0.6;
    const auto words = local_words(build_index(e->dataset, e->layout), p);
    REQUIRE(payload["words"].size() == words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
      CHECK(payload["words"][i]["word"] == words[i].word);
      CHECK(payload["words"][i]["frequency"] == words[i].frequency);
      CHECK(payload["words"][i]["x"].get<double>() == wire_number(words[i].position(0)));
    }
    CHECK(payload["sample_count"] == 120);
  }
  SUBCASE("region and filters restrict the subset") {
    const auto payload = local_words_payload(*e, {{"freq", "2"}, {"region", "-100,-100,100,100"}, {"errors_only", "1"}});
    CHECK(payload["sample_count"] == 16);
    CHECK(payload["region"]["kind"] == "rect");
    const auto far = local_words_payload(*e, {{"region", "1000,1000,1001,1001"}});
    CHECK(far["sample_count"] == 0);
    CHECK(far["words"].empty());
  }
  SUBCASE("concept mode") {
    const auto payload = local_words_payload(*e, {{"freq", "5"}, {"mode", "concepts"}, {"concept_freq", "5"}, {"locality", "1.5"}});
    CHECK(payload["params"]["mode"] == "concepts");
    CHECK_FALSE(payload["words"].empty());
  }
  SUBCASE("bad parameters") {
    CHECK(code_of([&] { local_words_payload(*e, {{"freq", "-1"}}); }) == Errc::invalid_argument);
    CHECK(code_of([&] { local_words_payload(*e, {{"freq", "2.5"}}); }) == Errc::invalid_argument);
    CHECK(code_of([&] { local_words_payload(*e, {{"mode", "phrases"}}); }) == Errc::invalid_argument);
    CHECK(code_of([&] { local_words_payload(*e, {{"region", "1,2,3"}}); }) == Errc::invalid_region);
    CHECK(code_of([&] { local_words_payload(*e, {{"region", "0,0,1,1,2,2,x,3"}}); }) == Errc::invalid_region);
  }
}

TEST_CASE("lists payload") {
  const auto e = fixture_entry();
  const auto payload = lists_payload(*e, {{"limit", "3"}});
  CHECK(payload["words"].size() == 3);
  CHECK(payload["labels"].size() == 3);
  std::vector<std::size_t> all(e->dataset.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto counts = count_items(e->dataset, all, ItemKind::word, true);
  long long total = 0, best = 0;
  for (const auto& [w, c] : counts) {
    total += c;
    best = std::max(best, c);
  }
  CHECK(payload["words"][0]["count"] == best);
  CHECK(payload["words"][0]["share"].get<double>() == doctest::Approx(static_cast<double>(best) / total));
  for (std::size_t i = 1; i < payload["words"].size(); ++i) {
    CHECK(payload["words"][i - 1]["count"].get<long long>() >= payload["words"][i]["count"].get<long long>());
  }
  CHECK(code_of([&] { lists_payload(*e, {{"limit", "-2"}}); }) == Errc::invalid_argument);
}

TEST_CASE("confusions payload") {
  const auto e = fixture_entry();
  const auto payload = confusions_payload(*e, {{"sort", "freq"}});
  REQUIRE(payload["entries"].size() == 3);
  CHECK(payload["entries"][0]["gold"] == "cancel_flight");
  CHECK(payload["entries"][0]["pred"] == "book_flight");
  CHECK(payload["entries"][0]["frequency"] == 8);
  CHECK(payload["error_shares"]["total_errors"] == 16);
  const auto by_gold = confusions_payload(*e, {{"sort", "gold"}, {"secondary", "freq"}});
  CHECK(by_gold["entries"][0]["gold"] == "book_flight");
  const auto band = confusions_payload(*e, {{"conf_lo", "0.2"}, {"conf_hi", "0.25"}});
  int total = 0;
  for (const auto& row : band["entries"]) total += row["frequency"].get<int>();
  int expect = 0;
  for (const auto& s : e->dataset.samples()) expect += (!s.correct() && s.confidence >= 0.2 && s.confidence <= 0.25) ? 1 : 0;
  CHECK(total == expect);
  CHECK(code_of([&] { confusions_payload(*e, {{"sort", "size"}}); }) == Errc::invalid_argument);
  CHECK(code_of([&] { confusions_payload(*e, {{"conf_lo", "0.9"}, {"conf_hi", "0.1"}}); }) == Errc::invalid_argument);
}

TEST_CASE("label-clusters and hulls payloads") {
  const auto e = fixture_entry();
  const auto clusters = label_clusters_payload(*e, {});
  std::set<std::string> members;
  for (const auto& c : clusters["clusters"]) {
    for (const auto& m : c["members"]) members.insert(m.get<std::string>());
  }
  CHECK(members.size() == 4);
  const auto fine = label_clusters_payload(*e, {{"cut", "0.000001"}});
  CHECK(fine["clusters"].size() == 4);
  CHECK(code_of([&] { label_clusters_payload(*e, {{"cut", "3"}}); }) == Errc::invalid_argument);

  const auto hulls = hulls_payload(*e, {{"labels", "play_music,weather_query"}});
  REQUIRE(hulls["hulls"].size() == 2);
  for (const auto& h : hulls["hulls"]) {
    Polygon<double> pts;
    const auto label = h["label"].get<std::string>();
    for (std::size_t i = 0; i < e->dataset.size(); ++i) {
      if (e->dataset.sample(i).gold_label != label) continue;
      pts.emplace_back(e->layout.positions(static_cast<Eigen::Index>(i), 0), e->layout.positions(static_cast<Eigen::Index>(i), 1));
    }
    CHECK(h["vertices"].size() == oracle::brute_hull_vertices(pts).size());
    CHECK(h["sample_count"] == 30);
  }
  CHECK(code_of([&] { hulls_payload(*e, {{"labels", "nope"}}); }) == Errc::unknown_label);
}

TEST_CASE("explanation payload") {
  const auto e = fixture_entry();
  const auto payload = explanation_payload(*e, "q000", {});
  CHECK(payload["importance"]["metrics"] == json({"occlusion", "similarity", "ctfidf", "gradient"}));
  CHECK(payload["columns"].size() == 3);
  CHECK(payload["tau"].get<double>() == doctest::Approx(0.4));
  const double closest_sum = [&] {
    double s = 0.0;
    for (const auto& v : payload["contributions"]["closest"]["query"]) s += v.get<double>();
    return s;
  }();
  CHECK(closest_sum == doctest::Approx(payload["contributions"]["closest"]["similarity"].get<double>()).epsilon(1e-6));
  CHECK(payload["summary"]["text"].get<std::string>().rfind("Sample q000", 0) == 0);

  const auto narrowed = explanation_payload(*e, "q000", {{"metrics", "ctfidf"}, {"tau", "0.9"}, {"contrast_label", "weather_query"}});
  CHECK(narrowed["importance"]["metrics"] == json({"ctfidf"}));
  CHECK(narrowed["triple"]["contrast_label"] == "weather_query");
  CHECK(code_of([&] { explanation_payload(*e, "zzz", {}); }) == Errc::sample_not_found);
  CHECK(code_of([&] { explanation_payload(*e, "q000", {{"metrics", "lime"}}); }) == Errc::unknown_metric);
  CHECK(code_of([&] { explanation_payload(*e, "q000", {{"contrast_label", "nope"}}); }) == Errc::unknown_label);
}

TEST_CASE("compare payload") {
  const auto registry = fixture_registry();
  const json request = {{"side_a", {{"dataset", "fixture"}, {"pred_labels", {"book_flight"}}}},
                        {"side_b", {{"dataset", "fixture"}, {"gold_labels", {"book_flight"}}}}};
  const auto payload = compare_payload(*registry, request);
  CHECK(payload["side_a"]["sample_count"] == 35);
  CHECK(payload["side_b"]["sample_count"] == 30);
  CHECK(payload["side_a"]["layout_id"] == payload["side_b"]["layout_id"]);
  CHECK(payload["statistic"]["prior_total"] == 500.0);
  for (const auto& item : payload["items"]) {
    const double z = item["z"].get<double>();
    const auto verdict = item["verdict"].get<std::string>();
    CHECK(verdict == to_string(verdict_for(z)));
  }

  SUBCASE("identical sides") {
    const json same = {{"side_a", {{"dataset", "fixture"}}}, {"side_b", {{"dataset", "fixture"}}}, {"item_kind", "label"}};
    for (const auto& item : compare_payload(*registry, same)["items"]) CHECK(item["verdict"] == "shared");
  }
  SUBCASE("two datasets report distinct layout ids") {
    TempDir dir;
    textscape::testing::build_fixture_store(dir / "other", "other");
    registry->add(load_entry(dir / "other"));
    const json two = {{"side_a", {{"dataset", "fixture"}}}, {"side_b", {{"dataset", "other"}}}};
    const auto p = compare_payload(*registry, two);
    CHECK(p["side_a"]["layout_id"] != p["side_b"]["layout_id"]);
  }
  SUBCASE("errors") {
    CHECK(code_of([&] { compare_payload(*registry, {{"side_a", {{"dataset", "fixture"}}}}); }) == Errc::invalid_argument);
    CHECK(code_of([&] {
            compare_payload(*registry, {{"side_a", {{"dataset", "nope"}}}, {"side_b", {{"dataset", "fixture"}}}});
          }) == Errc::dataset_not_found);
    CHECK(code_of([&] {
            compare_payload(*registry, {{"side_a", {{"dataset", "fixture"}, {"gold_labels", {"book_flight"}}, {"pred_labels", {"play_music"}}}},
                                        {"side_b", {{"dataset", "fixture"}}}});
          }) == Errc::empty_group);
    CHECK(code_of([&] {
            compare_payload(*registry, {{"side_a", {{"dataset", "fixture"}}}, {"side_b", {{"dataset", "fixture"}}}, {"extra", 1}});
          }) == Errc::invalid_argument);
    CHECK(code_of([&] {
            compare_payload(*registry, {{"side_a", {{"dataset", "fixture"}}}, {"side_b", {{"dataset", "fixture"}}}, {"item_kind", "x"}});
          }) == Errc::invalid_argument);
  }
  SUBCASE("group selector parsing") {
    const auto g = parse_group_selector({{"dataset", "fixture"},
                                         {"region", {0, 0, 1, 1}},
                                         {"error_status", "errors"},
                                         {"confidence", {0.1, 0.5}}});
    CHECK(g.region->kind == RegionSelector::Kind::viewport_rect);
    CHECK(g.error_status == ErrorStatus::errors_only);
    CHECK(g.confidence->hi == 0.5);
    CHECK(code_of([&] { parse_group_selector({{"gold_labels", {"x"}}}); }) == Errc::invalid_argument);
    CHECK(code_of([&] { parse_group_selector({{"dataset", "d"}, {"error_status", "bad"}}); }) == Errc::invalid_argument);
    CHECK(code_of([&] { parse_group_selector({{"dataset", "d"}, {"region", {0, 0, 1}}}); }) == Errc::invalid_region);
  }
}

TEST_CASE("csv export") {
  const auto e = fixture_entry();
  const auto csv = payload_to_csv("confusions", confusions_payload(*e, {}));
  CHECK(csv.rfind("gold,pred,frequency\n", 0) == 0);
  CHECK(csv.find("cancel_flight,book_flight,8\n") != std::string::npos);
  json points = {{"points", {{{"id", "a,\"b\""}, {"x", 1}, {"y", 2}, {"gold", "g"}, {"pred", "p"}, {"confidence", 0.5}, {"correct", false}, {"color_index", 0}}}}};
  CHECK(payload_to_csv("points", points).find("\"a,\"\"b\"\"\"") != std::string::npos);
  CHECK(code_of([&] { payload_to_csv("nonsense", json::object()); }) == Errc::invalid_argument);
  const auto expl = payload_to_csv("explanation", explanation_payload(*e, "q000", {}));
  CHECK(expl.rfind("token_index,token,occlusion,similarity,ctfidf,gradient,total\n", 0) == 0);
}

TEST_CASE("golden payloads") {
  const auto e = fixture_entry();
  const auto registry = fixture_registry();
  check_golden("datasets", datasets_payload(*registry));
  check_golden("points", points_payload(*e, {{"errors_only", "true"}}));
  check_golden("local_words", local_words_payload(*e, {{"freq", "10"}, {"stopwords", "ignore"}}));
  check_golden("local_concepts", local_words_payload(*e, {{"freq", "5"}, {"mode", "concepts"}, {"locality", "1.5"}}));
  check_golden("lists", lists_payload(*e, {{"limit", "5"}}));
  check_golden("confusions", confusions_payload(*e, {{"sort", "freq"}}));
  check_golden("label_clusters", label_clusters_payload(*e, {}));
  check_golden("hulls", hulls_payload(*e, {}));
  check_golden("explanation", explanation_payload(*e, "q000", {}));
  check_golden("compare", compare_payload(*registry, {{"side_a", {{"dataset", "fixture"}, {"pred_labels", {"book_flight"}}}},
                                                      {"side_b", {{"dataset", "fixture"}, {"gold_labels", {"book_flight"}}}}}));
  check_golden("error", error_payload(Error(Errc::dataset_not_found, "no dataset with id unknown")));
}
