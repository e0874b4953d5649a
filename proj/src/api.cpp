#include "textscape/api.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <future>
#include <mutex>
#include <set>
#include <sstream>

#include "binary_io.hpp"

namespace textscape {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Tracks which query parameters were read so leftovers can be rejected.
class Params {
 public:
  explicit Params(const QueryParams& params) : params_(params) {}

  std::optional<std::string> text(const std::string& key) {
    used_.insert(key);
    auto it = params_.find(key);
    if (it == params_.end()) return std::nullopt;
    return it->second;
  }

  double number(const std::string& key, double fallback) {
    auto value = text(key);
    return value ? parse_number(key, *value) : fallback;
  }

  std::optional<double> optional_number(const std::string& key) {
    auto value = text(key);
    if (!value) return std::nullopt;
    return parse_number(key, *value);
  }

  int integer(const std::string& key, int fallback) {
    auto value = text(key);
    if (!value) return fallback;
    int out = 0;
    const auto* end = value->data() + value->size();
    auto [ptr, ec] = std::from_chars(value->data(), end, out);
    if (ec != std::errc() || ptr != end) {
      throw Error(Errc::invalid_argument, "parameter " + key + " must be an integer, got \"" + *value + "\"");
    }
    return out;
  }

  bool flag(const std::string& key, bool fallback) {
    auto value = text(key);
    if (!value) return fallback;
    if (*value == "true" || *value == "1") return true;
    if (*value == "false" || *value == "0") return false;
    throw Error(Errc::invalid_argument, "parameter " + key + " must be true or false");
  }

  std::string choice(const std::string& key, const std::string& fallback,
                     std::initializer_list<const char*> allowed) {
    auto value = text(key).value_or(fallback);
    for (const char* a : allowed) {
      if (value == a) return value;
    }
    throw Error(Errc::invalid_argument, "parameter " + key + " has unsupported value \"" + value + "\"");
  }

  void finish() const {
    for (const auto& [key, value] : params_) {
      if (!used_.count(key)) throw Error(Errc::invalid_argument, "unknown parameter \"" + key + "\"");
    }
  }

  static double parse_number(const std::string& key, const std::string& value) {
    double out = 0.0;
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
      throw Error(Errc::invalid_argument, "parameter " + key + " must be a finite number, got \"" + value + "\"");
    }
    return out;
  }

 private:
  const QueryParams& params_;
  std::set<std::string> used_;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::set<LabelId> checked_labels(const Dataset& dataset, const std::vector<std::string>& labels) {
  std::set<LabelId> out;
  for (const auto& label : labels) {
    if (!dataset.has_label(label)) throw Error(Errc::unknown_label, "unknown label \"" + label + "\"");
    out.insert(label);
  }
  return out;
}

RegionSelector region_from_coordinates(const std::vector<double>& coords) {
  if (coords.size() % 2 != 0 || coords.size() < 4) {
    throw Error(Errc::invalid_region, "region needs an even list of at least 4 coordinates");
  }
  Polygon<double> pts;
  for (std::size_t i = 0; i < coords.size(); i += 2) pts.emplace_back(coords[i], coords[i + 1]);
  auto selector = pts.size() == 2 ? RegionSelector::rect(pts[0], pts[1]) : RegionSelector::lasso(std::move(pts));
  validate(selector);
  return selector;
}

std::optional<RegionSelector> region_param(Params& params) {
  auto text = params.text("region");
  if (!text) return std::nullopt;
  std::vector<double> coords;
  try {
    for (const auto& part : split_list(*text)) coords.push_back(Params::parse_number("region", part));
  } catch (const Error& e) {
    throw Error(Errc::invalid_region, e.what());
  }
  return region_from_coordinates(coords);
}

SampleFilter filter_params(const Dataset& dataset, Params& params) {
  SampleFilter filter;
  filter.errors_only = params.flag("errors_only", false);
  auto lo = params.optional_number("conf_lo");
  auto hi = params.optional_number("conf_hi");
  if (lo || hi) filter.confidence = ConfidenceBand{lo.value_or(0.0), hi.value_or(1.0)};
  if (auto labels = params.text("labels")) filter.labels = checked_labels(dataset, split_list(*labels));
  validate(filter);
  return filter;
}

// Samples passing the filter and, when given, inside the region.
std::vector<std::size_t> selected_samples(const DatasetEntry& entry, const SampleFilter& filter,
                                          const std::optional<RegionSelector>& region) {
  auto subset = filter_samples(entry.dataset, filter);
  if (!region) return subset;
  const auto inside = select_region(entry.layout, *region);
  std::vector<std::size_t> out;
  std::set_intersection(subset.begin(), subset.end(), inside.begin(), inside.end(), std::back_inserter(out));
  return out;
}

json number(double value) { return wire_number(value); }

json position_json(const Eigen::MatrixXd& positions, std::size_t row) {
  const auto r = static_cast<Eigen::Index>(row);
  return json::array({number(positions(r, 0)), number(positions(r, 1))});
}

json band_json(const std::optional<ConfidenceBand>& band) {
  if (!band) return nullptr;
  return {{"lo", number(band->lo)}, {"hi", number(band->hi)}};
}

json filter_json(const SampleFilter& filter) {
  json labels = nullptr;
  if (filter.labels) labels = json(std::vector<std::string>(filter.labels->begin(), filter.labels->end()));
  return {{"errors_only", filter.errors_only}, {"confidence", band_json(filter.confidence)}, {"labels", labels}};
}

json region_json(const std::optional<RegionSelector>& region) {
  if (!region) return nullptr;
  json coords = json::array();
  for (const auto& p : region->vertices) {
    coords.push_back(number(p.x()));
    coords.push_back(number(p.y()));
  }
  const char* kind = region->kind == RegionSelector::Kind::viewport_rect ? "rect" : "lasso";
  return {{"kind", kind}, {"coordinates", coords}};
}

json confusion_json(const ConfusionEntry& e) {
  return {{"gold", e.gold}, {"pred", e.pred}, {"frequency", e.frequency}, {"sample_ids", e.sample_ids}};
}

json shares_json(const std::vector<LabelShare>& shares) {
  json out = json::array();
  for (const auto& s : shares) out.push_back({{"label", s.label}, {"count", s.count}, {"share", number(s.share)}});
  return out;
}

json cluster_json(const LabelCluster& c) {
  const auto& palette = cluster_palette();
  return {{"id", c.id},
          {"members", c.members},
          {"color_index", c.color_index},
          {"color", palette[static_cast<std::size_t>(c.color_index) % palette.size()]}};
}

json contribution_json(const PairContribution& c) {
  json query = json::array();
  json other = json::array();
  for (double v : c.query) query.push_back(number(v));
  for (double v : c.other) other.push_back(number(v));
  return {{"similarity", number(c.similarity)}, {"query", query}, {"other", other}};
}

json ranked_items(const ItemCounts& counts, int limit) {
  std::vector<std::pair<std::string, long long>> items(counts.begin(), counts.end());
  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  long long total = 0;
  for (const auto& [item, c] : items) total += c;
  json out = json::array();
  for (std::size_t i = 0; i < items.size() && static_cast<int>(i) < limit; ++i) {
    out.push_back({{"item", items[i].first},
                   {"count", items[i].second},
                   {"share", number(static_cast<double>(items[i].second) / static_cast<double>(total))}});
  }
  return out;
}

std::string layout_id_for(const std::string& id, const ProjectedLayout& layout) {
  return id + "/" + to_string(layout.method) + "-" + std::to_string(layout.seed);
}

std::optional<json> read_cache(const fs::path& path) {
  if (!fs::exists(path)) return std::nullopt;
  try {
    auto doc = json::parse(detail::read_file_text(path));
    if (doc.value("format_version", -1) != kStoreFormatVersion) return std::nullopt;
    return doc;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::optional<std::vector<ConfusionEntry>> cached_confusions(const fs::path& store_dir) {
  auto doc = read_cache(store_dir / "caches" / "confusions.json");
  if (!doc) return std::nullopt;
  try {
    std::vector<ConfusionEntry> out;
    for (const auto& e : doc->at("entries")) {
      out.push_back({e.at("gold").get<std::string>(), e.at("pred").get<std::string>(), e.at("frequency").get<int>(),
                     e.at("sample_ids").get<std::vector<std::string>>()});
    }
    return out;
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

std::optional<std::vector<LabelCluster>> cached_clusters(const fs::path& store_dir) {
  auto doc = read_cache(store_dir / "caches" / "label_clusters.json");
  if (!doc) return std::nullopt;
  try {
    if (doc->at("cut").get<double>() != kDefaultClusterCut) return std::nullopt;
    std::vector<LabelCluster> out;
    for (const auto& c : doc->at("clusters")) {
      out.push_back({c.at("id").get<int>(), c.at("members").get<std::vector<std::string>>(),
                     c.at("color_index").get<int>()});
    }
    return out;
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

std::string csv_field(const json& value) {
  std::string text;
  if (value.is_string()) {
    text = value.get<std::string>();
  } else if (value.is_null()) {
    text = "";
  } else if (value.is_array()) {
    for (std::size_t i = 0; i < value.size(); ++i) {
      if (i) text += ' ';
      text += value[i].is_string() ? value[i].get<std::string>() : value[i].dump();
    }
  } else {
    text = value.dump();
  }
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<json>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(row[i]);
    out += "\n";
  }
  return out;
}

}  // namespace

double wire_number(double value) {
  if (value == 0.0) return 0.0;
  if (!std::isfinite(value)) return value;
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.9g", value);
  return std::strtod(buffer, nullptr);
}

std::shared_ptr<const DatasetEntry> make_entry(std::string id, Dataset dataset, ProjectedLayout layout,
                                               std::optional<std::vector<ConfusionEntry>> confusions,
                                               std::optional<std::vector<LabelCluster>> clusters) {
  if (static_cast<std::size_t>(layout.positions.rows()) != dataset.size() || layout.positions.cols() != 2) {
    throw Error(Errc::invalid_format, "layout has " + std::to_string(layout.positions.rows()) +
                                          " points but the dataset has " + std::to_string(dataset.size()));
  }
  auto explain = make_explain_context(dataset);
  if (confusions) explain.confusions = std::move(*confusions);
  if (!clusters) clusters = cluster_label_set(dataset, available_label_prototypes(dataset));
  std::map<LabelId, int> colors;
  for (const auto& c : *clusters) {
    for (const auto& m : c.members) colors[m] = c.color_index;
  }
  auto layout_id = layout_id_for(id, layout);
  return std::make_shared<const DatasetEntry>(DatasetEntry{std::move(id), std::move(dataset), std::move(layout),
                                                           std::move(layout_id), std::move(explain),
                                                           std::move(*clusters), std::move(colors)});
}

std::shared_ptr<const DatasetEntry> load_entry(const fs::path& store_dir) {
  const auto manifest = read_manifest(store_dir);
  Dataset dataset = load_corpus(manifest.paths);
  const auto layout_path = store_dir / kLayoutFile;
  if (!fs::exists(layout_path)) {
    auto layout = project(dataset.sample_embeddings(), manifest.projection, manifest.seed);
    return make_entry(manifest.id, std::move(dataset), std::move(layout));
  }
  auto layout = read_layout(layout_path);
  return make_entry(manifest.id, std::move(dataset), std::move(layout), cached_confusions(store_dir),
                    cached_clusters(store_dir));
}

std::shared_ptr<const DatasetEntry> load_entry(const Manifest& manifest) {
  Dataset dataset = load_corpus(manifest.paths);
  auto layout = project(dataset.sample_embeddings(), manifest.projection, manifest.seed);
  return make_entry(manifest.id, std::move(dataset), std::move(layout));
}

void Registry::add(std::shared_ptr<const DatasetEntry> entry) {
  std::unique_lock lock(mutex_);
  if (entries_.count(entry->id)) throw Error(Errc::dataset_exists, "dataset " + entry->id + " is already loaded");
  auto id = entry->id;
  entries_.emplace(std::move(id), std::move(entry));
}

std::shared_ptr<const DatasetEntry> Registry::get(std::string_view id) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(id);
  if (it == entries_.end()) throw Error(Errc::dataset_not_found, "no dataset \"" + std::string(id) + "\"");
  return it->second;
}

std::vector<std::shared_ptr<const DatasetEntry>> Registry::list() const {
  std::shared_lock lock(mutex_);
  std::vector<std::shared_ptr<const DatasetEntry>> out;
  for (const auto& [id, entry] : entries_) out.push_back(entry);
  return out;
}

json dataset_summary(const DatasetEntry& entry) {
  const auto& d = entry.dataset;
  return {{"id", entry.id},
          {"sample_count", d.size()},
          {"label_count", d.label_set().size()},
          {"dim", d.embeddings().dim},
          {"layout_id", entry.layout_id},
          {"has_lexicon", !d.lexicon().empty()},
          {"warnings", entry.layout.warnings}};
}

json datasets_payload(const Registry& registry) {
  json items = json::array();
  for (const auto& entry : registry.list()) items.push_back(dataset_summary(*entry));
  return {{"datasets", items}};
}

json points_payload(const DatasetEntry& entry, const QueryParams& query) {
  Params params(query);
  const auto filter = filter_params(entry.dataset, params);
  params.finish();
  json points = json::array();
  for (auto i : filter_samples(entry.dataset, filter)) {
    const auto& s = entry.dataset.sample(i);
    const auto pos = position_json(entry.layout.positions, i);
    points.push_back({{"id", s.id},
                      {"x", pos[0]},
                      {"y", pos[1]},
                      {"gold", s.gold_label},
                      {"pred", s.pred_label},
                      {"confidence", number(s.confidence)},
                      {"correct", s.correct()},
                      {"color_index", entry.label_color.at(s.pred_label)}});
  }
  return {{"dataset", entry.id}, {"layout_id", entry.layout_id}, {"filter", filter_json(filter)}, {"points", points}};
}

json local_words_payload(const DatasetEntry& entry, const QueryParams& query) {
  Params params(query);
  LwcParams lwc;
  lwc.freq_threshold = params.integer("freq", lwc.freq_threshold);
  lwc.locality_max = params.number("locality", lwc.locality_max);
  lwc.locality_quantile = params.number("quantile", lwc.locality_quantile);
  lwc.ignore_stopwords = params.choice("stopwords", "ignore", {"ignore", "keep"}) == "ignore";
  const auto mode = params.choice("mode", "words", {"words", "concepts"});
  LwcParams concept_params = lwc;
  concept_params.freq_threshold = params.integer("concept_freq", lwc.freq_threshold);
  concept_params.locality_max = params.number("concept_locality", lwc.locality_max);
  const auto region = region_param(params);
  const auto filter = filter_params(entry.dataset, params);
  params.finish();
  validate(lwc);
  validate(concept_params);

  const auto subset = selected_samples(entry, filter, region);
  std::vector<LocalWord> words;
  if (!subset.empty()) {
    const auto index = build_index(entry.dataset, entry.layout.positions, subset);
    words = mode == "words" ? local_words(index, lwc)
                            : local_concepts(index, entry.dataset.lexicon(), lwc, concept_params);
  }
  json rows = json::array();
  for (const auto& w : words) {
    rows.push_back({{"word", w.word},
                    {"x", number(w.position(0))},
                    {"y", number(w.position(1))},
                    {"frequency", w.frequency},
                    {"locality", number(w.locality)},
                    {"scale_hint", number(w.scale_hint)}});
  }
  json echo = {{"freq", lwc.freq_threshold},
               {"locality", number(lwc.locality_max)},
               {"quantile", number(lwc.locality_quantile)},
               {"stopwords", lwc.ignore_stopwords ? "ignore" : "keep"},
               {"mode", mode}};
  if (mode == "concepts") {
    echo["concept_freq"] = concept_params.freq_threshold;
    echo["concept_locality"] = number(concept_params.locality_max);
  }
  return {{"dataset", entry.id},
          {"layout_id", entry.layout_id},
          {"params", echo},
          {"filter", filter_json(filter)},
          {"region", region_json(region)},
          {"sample_count", subset.size()},
          {"words", rows}};
}

json lists_payload(const DatasetEntry& entry, const QueryParams& query) {
  Params params(query);
  const int limit = params.integer("limit", 50);
  if (limit < 0) throw Error(Errc::invalid_argument, "limit must be non-negative");
  const bool ignore_stopwords = params.choice("stopwords", "ignore", {"ignore", "keep"}) == "ignore";
  const auto region = region_param(params);
  const auto filter = filter_params(entry.dataset, params);
  params.finish();

  const auto subset = selected_samples(entry, filter, region);
  const auto& d = entry.dataset;
  return {{"dataset", entry.id},
          {"filter", filter_json(filter)},
          {"region", region_json(region)},
          {"sample_count", subset.size()},
          {"words", ranked_items(count_items(d, subset, ItemKind::word, ignore_stopwords), limit)},
          {"concepts", ranked_items(count_items(d, subset, ItemKind::concept_name), limit)},
          {"labels", ranked_items(count_items(d, subset, ItemKind::label), limit)}};
}

json confusions_payload(const DatasetEntry& entry, const QueryParams& query) {
  Params params(query);
  const auto sort_name = params.text("sort").value_or("freq");
  const auto secondary_name = params.text("secondary");
  auto lo = params.optional_number("conf_lo");
  auto hi = params.optional_number("conf_hi");
  params.finish();

  const auto primary = parse_confusion_sort_key(sort_name);
  std::optional<ConfusionSortKey> secondary;
  if (secondary_name) secondary = parse_confusion_sort_key(*secondary_name);
  std::optional<ConfidenceBand> band;
  if (lo || hi) {
    band = ConfidenceBand{lo.value_or(0.0), hi.value_or(1.0)};
    if (band->lo > band->hi || band->lo < 0.0 || band->hi > 1.0) {
      throw Error(Errc::invalid_argument, "confidence band must satisfy 0 <= conf_lo <= conf_hi <= 1");
    }
  }
  auto entries = band ? confusion_table(entry.dataset, band) : entry.explain.confusions;
  sort_confusions(entries, primary, secondary);

  json rows = json::array();
  for (const auto& e : entries) rows.push_back(confusion_json(e));
  const auto shares = error_shares(entry.dataset);
  return {{"dataset", entry.id},
          {"sort", sort_name},
          {"secondary", secondary_name ? json(*secondary_name) : json(nullptr)},
          {"confidence", band_json(band)},
          {"entries", rows},
          {"error_shares",
           {{"has_errors", shares.has_errors},
            {"total_errors", shares.total_errors},
            {"false_negatives", shares_json(shares.false_negatives)},
            {"false_positives", shares_json(shares.false_positives)}}}};
}

json label_clusters_payload(const DatasetEntry& entry, const QueryParams& query) {
  Params params(query);
  const double cut = params.number("cut", kDefaultClusterCut);
  params.finish();
  const auto clusters = cut == kDefaultClusterCut
                            ? entry.clusters
                            : cluster_label_set(entry.dataset, available_label_prototypes(entry.dataset), cut);
  json rows = json::array();
  for (const auto& c : clusters) rows.push_back(cluster_json(c));
  return {{"dataset", entry.id}, {"cut", number(cut)}, {"clusters", rows}};
}

json hulls_payload(const DatasetEntry& entry, const QueryParams& query) {
  Params params(query);
  auto labels_text = params.text("labels");
  params.finish();
  const auto& d = entry.dataset;
  std::set<LabelId> labels = labels_text ? checked_labels(d, split_list(*labels_text))
                                         : std::set<LabelId>(d.label_set().begin(), d.label_set().end());
  const auto& palette = cluster_palette();
  json rows = json::array();
  for (const auto& label : labels) {
    Polygon<double> pts;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d.sample(i).gold_label != label) continue;
      const auto r = static_cast<Eigen::Index>(i);
      pts.emplace_back(entry.layout.positions(r, 0), entry.layout.positions(r, 1));
    }
    const auto sample_count = pts.size();
    json vertices = json::array();
    for (const auto& v : convex_hull(std::move(pts))) vertices.push_back({number(v.x()), number(v.y())});
    const int color = entry.label_color.at(label);
    rows.push_back({{"label", label},
                    {"sample_count", sample_count},
                    {"color_index", color},
                    {"color", palette[static_cast<std::size_t>(color) % palette.size()]},
                    {"vertices", vertices}});
  }
  return {{"dataset", entry.id}, {"layout_id", entry.layout_id}, {"hulls", rows}};
}

json explanation_payload(const DatasetEntry& entry, const std::string& sample_id, const QueryParams& query) {
  Params params(query);
  auto contrast_label = params.text("contrast_label");
  const double tau = params.number("tau", kDefaultEdgeThreshold);
  auto metrics_text = params.text("metrics");
  params.finish();

  const auto& d = entry.dataset;
  d.index_of(sample_id);
  const auto metrics = metrics_text ? split_list(*metrics_text) : default_metrics(d, sample_id);
  if (metrics.empty()) throw Error(Errc::invalid_argument, "metrics must name at least one metric");
  const auto profile = vifi(d, entry.explain, sample_id, metrics);
  const auto triple = select_contrast(d, entry.explain.confusions, sample_id, contrast_label);
  const auto graph = relation_graph(d, triple, tau);
  const auto summary = summarize(triple, graph, profile);

  json scores = json::object();
  for (const auto& m : profile.metrics) {
    json values = json::array();
    for (double v : profile.scores.at(m)) values.push_back(number(v));
    scores[m] = values;
  }
  json totals = json::array();
  for (double v : profile.totals()) totals.push_back(number(v));

  json columns = json::array();
  for (const auto& c : graph.columns) {
    columns.push_back({{"role", c.role},
                       {"sample_id", c.sample_id},
                       {"gold", c.gold_label},
                       {"pred", c.pred_label},
                       {"tokens", c.tokens}});
  }
  json edges = json::array();
  for (const auto& e : graph.edges) {
    edges.push_back({{"pair", e.pair},
                     {"query_token", e.query_token},
                     {"other_token", e.other_token},
                     {"weight", number(e.weight)}});
  }
  const auto& slots = summary.slots;
  return {{"dataset", entry.id},
          {"sample_id", sample_id},
          {"tokens", d.sample(d.index_of(sample_id)).tokens},
          {"importance", {{"metrics", profile.metrics}, {"scores", scores}, {"totals", totals}}},
          {"triple",
           {{"query_id", triple.query_id},
            {"closest_id", triple.closest_id},
            {"contrast_id", triple.contrast_id},
            {"contrast_label", triple.contrast_label},
            {"predicted_label", triple.predicted_label},
            {"gold_label", triple.gold_label}}},
          {"tau", number(graph.tau)},
          {"columns", columns},
          {"edges", edges},
          {"contributions", {{"closest", contribution_json(graph.closest)}, {"contrast", contribution_json(graph.contrast)}}},
          {"summary",
           {{"text", summary.text},
            {"supporting_tokens", slots.supporting_tokens},
            {"confounders", slots.confounders}}}};
}

GroupSelector parse_group_selector(const json& side) {
  if (!side.is_object()) throw Error(Errc::invalid_argument, "group selector must be an object");
  GroupSelector selector;
  try {
    for (const auto& [key, value] : side.items()) {
      if (key == "dataset") {
        selector.dataset_id = value.get<std::string>();
      } else if (key == "gold_labels") {
        selector.gold_labels = value.get<std::set<LabelId>>();
      } else if (key == "pred_labels") {
        selector.pred_labels = value.get<std::set<LabelId>>();
      } else if (key == "region") {
        selector.region = region_from_coordinates(value.get<std::vector<double>>());
      } else if (key == "error_status") {
        const auto status = value.get<std::string>();
        if (status == "errors") selector.error_status = ErrorStatus::errors_only;
        else if (status == "correct") selector.error_status = ErrorStatus::correct_only;
        else if (status != "all") throw Error(Errc::invalid_argument, "error_status must be errors, correct or all");
      } else if (key == "confidence") {
        const auto band = value.get<std::vector<double>>();
        if (band.size() != 2 || band[0] > band[1] || band[0] < 0.0 || band[1] > 1.0) {
          throw Error(Errc::invalid_argument, "confidence must be [lo, hi] within [0, 1]");
        }
        selector.confidence = ConfidenceBand{band[0], band[1]};
      } else {
        throw Error(Errc::invalid_argument, "unknown group selector field \"" + key + "\"");
      }
    }
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_argument, std::string("malformed group selector: ") + e.what());
  }
  if (selector.dataset_id.empty()) throw Error(Errc::invalid_argument, "group selector needs a dataset");
  return selector;
}

json compare_payload(const Registry& registry, const json& request) {
  if (!request.is_object()) throw Error(Errc::invalid_argument, "compare request must be an object");
  for (const auto& [key, value] : request.items()) {
    if (key != "side_a" && key != "side_b" && key != "item_kind" && key != "stopwords") {
      throw Error(Errc::invalid_argument, "unknown compare field \"" + key + "\"");
    }
  }
  if (!request.contains("side_a") || !request.contains("side_b")) {
    throw Error(Errc::invalid_argument, "compare request needs side_a and side_b");
  }
  const auto kind = parse_item_kind(request.value("item_kind", json("word")).get<std::string>());
  const auto stopwords = request.value("stopwords", json("ignore")).get<std::string>();
  if (stopwords != "ignore" && stopwords != "keep") {
    throw Error(Errc::invalid_argument, "stopwords must be ignore or keep");
  }
  const auto sel_a = parse_group_selector(request.at("side_a"));
  const auto sel_b = parse_group_selector(request.at("side_b"));
  const auto entry_a = registry.get(sel_a.dataset_id);
  const auto entry_b = registry.get(sel_b.dataset_id);
  for (const auto& [sel, entry] : {std::pair{&sel_a, entry_a}, std::pair{&sel_b, entry_b}}) {
    for (const auto* labels : {&sel->gold_labels, &sel->pred_labels}) {
      if (*labels) checked_labels(entry->dataset, {(*labels)->begin(), (*labels)->end()});
    }
  }

  const bool ignore = stopwords == "ignore";
  auto side_task = [&](const DatasetEntry& entry, const GroupSelector& sel) {
    auto side = layout_side(entry.dataset, entry.layout, entry.layout_id, sel);
    auto counts = count_items(entry.dataset, side.indices, kind, ignore);
    return std::pair{std::move(side), std::move(counts)};
  };
  auto future_b = std::async(std::launch::async, side_task, std::cref(*entry_b), std::cref(sel_b));
  auto [side_a, counts_a] = side_task(*entry_a, sel_a);
  auto [side_b, counts_b] = future_b.get();
  const auto items = divergence(counts_a, counts_b, kind);

  auto side_json = [](const DatasetEntry& entry, const LayoutSide& side, const json& descriptor) {
    json points = json::array();
    for (std::size_t r = 0; r < side.indices.size(); ++r) {
      const auto row = static_cast<Eigen::Index>(r);
      points.push_back({{"id", entry.dataset.sample(side.indices[r]).id},
                        {"x", number(side.positions(row, 0))},
                        {"y", number(side.positions(row, 1))}});
    }
    return json{{"descriptor", descriptor},
                {"layout_id", side.layout_id},
                {"sample_count", side.indices.size()},
                {"points", points}};
  };
  json rows = json::array();
  for (const auto& item : items) {
    rows.push_back({{"item", item.item},
                    {"kind", to_string(item.kind)},
                    {"count_a", item.count_a},
                    {"count_b", item.count_b},
                    {"z", number(item.z)},
                    {"verdict", to_string(item.verdict)}});
  }
  return {{"item_kind", to_string(kind)},
          {"stopwords", stopwords},
          {"statistic",
           {{"name", "weighted_log_odds_informative_dirichlet"},
            {"prior_total", number(kDivergencePrior)},
            {"z_crit", number(kDivergenceZCrit)}}},
          {"side_a", side_json(*entry_a, side_a, request.at("side_a"))},
          {"side_b", side_json(*entry_b, side_b, request.at("side_b"))},
          {"items", rows}};
}

std::string payload_to_csv(std::string_view kind, const json& payload) {
  std::vector<std::vector<json>> rows;
  if (kind == "datasets") {
    for (const auto& d : payload.at("datasets")) rows.push_back({d["id"], d["sample_count"], d["label_count"], d["dim"]});
    return csv_table({"id", "sample_count", "label_count", "dim"}, rows);
  }
  if (kind == "points") {
    for (const auto& p : payload.at("points")) {
      rows.push_back({p["id"], p["x"], p["y"], p["gold"], p["pred"], p["confidence"], p["correct"], p["color_index"]});
    }
    return csv_table({"id", "x", "y", "gold", "pred", "confidence", "correct", "color_index"}, rows);
  }
  if (kind == "local-words") {
    for (const auto& w : payload.at("words")) {
      rows.push_back({w["word"], w["x"], w["y"], w["frequency"], w["locality"], w["scale_hint"]});
    }
    return csv_table({"word", "x", "y", "frequency", "locality", "scale_hint"}, rows);
  }
  if (kind == "lists") {
    for (const char* list : {"words", "concepts", "labels"}) {
      for (const auto& item : payload.at(list)) rows.push_back({list, item["item"], item["count"], item["share"]});
    }
    return csv_table({"list", "item", "count", "share"}, rows);
  }
  if (kind == "confusions") {
    for (const auto& e : payload.at("entries")) rows.push_back({e["gold"], e["pred"], e["frequency"]});
    return csv_table({"gold", "pred", "frequency"}, rows);
  }
  if (kind == "label-clusters") {
    for (const auto& c : payload.at("clusters")) {
      for (const auto& m : c.at("members")) rows.push_back({c["id"], m, c["color_index"], c["color"]});
    }
    return csv_table({"cluster", "label", "color_index", "color"}, rows);
  }
  if (kind == "hulls") {
    for (const auto& h : payload.at("hulls")) {
      int v = 0;
      for (const auto& p : h.at("vertices")) rows.push_back({h["label"], v++, p[0], p[1]});
    }
    return csv_table({"label", "vertex", "x", "y"}, rows);
  }
  if (kind == "explanation") {
    const auto& importance = payload.at("importance");
    std::vector<std::string> header = {"token_index", "token"};
    for (const auto& m : importance.at("metrics")) header.push_back(m.get<std::string>());
    header.push_back("total");
    const auto& tokens = payload.at("tokens");
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      std::vector<json> row = {i, tokens[i]};
      for (const auto& m : importance.at("metrics")) row.push_back(importance.at("scores").at(m.get<std::string>())[i]);
      row.push_back(importance.at("totals")[i]);
      rows.push_back(std::move(row));
    }
    return csv_table(header, rows);
  }
  if (kind == "compare") {
    for (const auto& item : payload.at("items")) {
      rows.push_back({item["item"], item["kind"], item["count_a"], item["count_b"], item["z"], item["verdict"]});
    }
    return csv_table({"item", "kind", "count_a", "count_b", "z", "verdict"}, rows);
  }
  throw Error(Errc::invalid_argument, "no CSV rendering for \"" + std::string(kind) + "\"");
}

json error_payload(const Error& error) {
  return {{"error", {{"code", machine_code(error.code())}, {"message", error.what()}}}};
}

int http_status(Errc code) {
  switch (code) {
    case Errc::dataset_not_found:
    case Errc::sample_not_found:
    case Errc::route_not_found:
      return 404;
    case Errc::no_candidate:
    case Errc::empty_group:
    case Errc::degenerate_input:
      return 422;
    case Errc::dataset_exists:
      return 409;
    case Errc::io_error:
      return 500;
    default:
      return 400;
  }
}

}  // namespace textscape
