#include "textscape/explain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>

namespace textscape {
namespace {

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

const Eigen::VectorXd& prototype_for(const ExplainContext& context, const LabelId& label) {
  auto it = context.prototypes.find(label);
  if (it == context.prototypes.end()) {
    throw Error(Errc::unknown_label, "label " + label + " has no gold samples to form a prototype");
  }
  return it->second;
}

// Increase in cosine distance between the pooled tokens and the prototype
// when each token is left out of the pool.
std::vector<double> occlusion_scores(const Eigen::MatrixXd& tokens, const Eigen::VectorXd& prototype) {
  const Eigen::Index n = tokens.rows();
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  if (n < 2) return out;
  const Eigen::VectorXd sum = tokens.colwise().sum().transpose();
  const double base = 1.0 - cosine(sum / static_cast<double>(n), prototype);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd rest = (sum - tokens.row(i).transpose()) / static_cast<double>(n - 1);
    out[static_cast<std::size_t>(i)] = (1.0 - cosine(rest, prototype)) - base;
  }
  return out;
}

// Each token's additive share of <mean(tokens), prototype>.
std::vector<double> similarity_scores(const Eigen::MatrixXd& tokens, const Eigen::VectorXd& prototype) {
  const Eigen::VectorXd dots = tokens * prototype / static_cast<double>(tokens.rows());
  return {dots.data(), dots.data() + dots.size()};
}

struct Candidate {
  double distance;
  const std::string* id;
  std::size_t index;
};

// Nearest sample (cosine distance) among those accepted by `keep`.
template <typename Pred>
std::optional<Candidate> nearest(const Dataset& dataset, std::size_t query, Pred keep) {
  const auto& emb = dataset.sample_embeddings();
  const Eigen::VectorXd q = emb.row(static_cast<Eigen::Index>(query)).transpose();
  std::optional<Candidate> best;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (i == query || !keep(dataset.sample(i))) continue;
    const double d = 1.0 - cosine(q, emb.row(static_cast<Eigen::Index>(i)).transpose());
    const auto& id = dataset.sample(i).id;
    if (!best || d < best->distance || (d == best->distance && id < *best->id)) {
      best = Candidate{d, &id, i};
    }
  }
  return best;
}

std::string format_similarity(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string quoted_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += (i + 1 == items.size()) ? " and " : ", ";
    out += "\"" + items[i] + "\"";
  }
  return out;
}

}  // namespace

const std::vector<std::string>& builtin_metrics() {
  static const std::vector<std::string> metrics = {kOcclusionMetric, kSimilarityMetric,
                                                   kClassTfidfMetric};
  return metrics;
}

ClassTermWeights::ClassTermWeights(const Dataset& dataset) {
  std::map<LabelId, std::map<std::string, double>> counts;
  std::map<LabelId, double> class_totals;
  std::map<std::string, double> word_totals;
  for (const auto& s : dataset.samples()) {
    auto& bucket = counts[s.gold_label];
    for (const auto& token : s.tokens) {
      if (auto w = normalize_word(token)) {
        bucket[*w] += 1.0;
        class_totals[s.gold_label] += 1.0;
        word_totals[*w] += 1.0;
      }
    }
  }
  if (counts.empty()) return;
  double all = 0.0;
  for (const auto& [label, total] : class_totals) all += total;
  const double average = all / static_cast<double>(counts.size());
  for (const auto& [label, bucket] : counts) {
    const double total = class_totals[label];
    auto& out = weights_[label];
    for (const auto& [word, count] : bucket) {
      out[word] = (count / total) * std::log(1.0 + average / word_totals[word]);
    }
  }
}

double ClassTermWeights::weight(const LabelId& label, const std::string& word) const {
  auto c = weights_.find(label);
  if (c == weights_.end()) return 0.0;
  auto w = c->second.find(word);
  return w == c->second.end() ? 0.0 : w->second;
}

ExplainContext make_explain_context(const Dataset& dataset) {
  ExplainContext context;
  for (auto& proto : available_label_prototypes(dataset)) {
    context.prototypes.emplace(proto.label, std::move(proto.vector));
  }
  context.term_weights = ClassTermWeights(dataset);
  context.confusions = confusion_table(dataset);
  return context;
}

std::vector<double> ImportanceProfile::totals() const {
  std::vector<double> out;
  for (const auto& metric : metrics) {
    const auto& v = scores.at(metric);
    if (out.empty()) out.assign(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) out[i] += v[i];
  }
  return out;
}

std::vector<std::string> default_metrics(const Dataset& dataset, std::string_view sample_id) {
  auto out = builtin_metrics();
  for (auto& m : dataset.external_importance().metrics_for(sample_id)) {
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(std::move(m));
  }
  return out;
}

std::vector<double> normalize_importance(std::vector<double> raw) {
  double total = 0.0;
  for (auto& v : raw) {
    v = std::max(v, 0.0);
    total += v;
  }
  if (raw.empty()) return raw;
  if (!(total > 0.0)) {
    std::fill(raw.begin(), raw.end(), 1.0 / static_cast<double>(raw.size()));
    return raw;
  }
  for (auto& v : raw) v /= total;
  return raw;
}

ImportanceProfile vifi(const Dataset& dataset, const ExplainContext& context,
                       std::string_view sample_id, const std::vector<std::string>& metrics) {
  const auto index = dataset.index_of(sample_id);
  const auto& sample = dataset.sample(index);
  const auto& tokens = dataset.token_embeddings(index);

  ImportanceProfile profile;
  profile.sample_id = sample.id;
  for (const auto& metric : metrics) {
    if (profile.scores.count(metric)) continue;
    std::vector<double> raw;
    if (metric == kOcclusionMetric) {
      raw = occlusion_scores(tokens, prototype_for(context, sample.pred_label));
    } else if (metric == kSimilarityMetric) {
      raw = similarity_scores(tokens, prototype_for(context, sample.pred_label));
    } else if (metric == kClassTfidfMetric) {
      for (const auto& token : sample.tokens) {
        const auto w = normalize_word(token);
        raw.push_back(w ? context.term_weights.weight(sample.pred_label, *w) : 0.0);
      }
    } else if (const auto* external = dataset.external_importance().find(sample.id, metric)) {
      raw = *external;
    } else {
      throw Error(Errc::unknown_metric, "metric \"" + metric + "\" is not available for sample " + sample.id);
    }
    profile.metrics.push_back(metric);
    profile.scores.emplace(metric, normalize_importance(std::move(raw)));
  }
  return profile;
}

ContrastTriple select_contrast(const Dataset& dataset, const std::vector<ConfusionEntry>& confusions,
                               std::string_view query_id, const std::optional<LabelId>& contrast_label) {
  const auto q = dataset.index_of(query_id);
  const auto& query = dataset.sample(q);
  const auto& predicted = query.pred_label;

  ContrastTriple triple;
  triple.query_id = query.id;
  triple.predicted_label = predicted;
  triple.gold_label = query.gold_label;

  const auto closest =
      nearest(dataset, q, [&](const Sample& s) { return s.pred_label == predicted; });
  if (!closest) {
    throw Error(Errc::no_candidate, "no other sample is predicted as " + predicted);
  }
  triple.closest_id = *closest->id;

  auto has_gold = [&](const LabelId& label) {
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (i != q && dataset.sample(i).gold_label == label) return true;
    }
    return false;
  };

  std::optional<LabelId> label = contrast_label;
  if (label) {
    if (!dataset.has_label(*label)) throw Error(Errc::unknown_label, "unknown label " + *label);
    if (*label == predicted) {
      throw Error(Errc::invalid_argument, "contrast label must differ from the predicted label");
    }
  } else if (!query.correct()) {
    label = query.gold_label;
  } else {
    std::map<LabelId, int> confused;
    for (const auto& e : confusions) {
      if (e.pred == predicted) confused[e.gold] += e.frequency;
      if (e.gold == predicted) confused[e.pred] += e.frequency;
    }
    int best = 0;
    for (const auto& [other, count] : confused) {
      if (count > best && has_gold(other)) {
        best = count;
        label = other;
      }
    }
    if (!label) {
      const auto fallback =
          nearest(dataset, q, [&](const Sample& s) { return s.gold_label != predicted; });
      if (!fallback) throw Error(Errc::no_candidate, "no sample with a different label exists");
      label = dataset.sample(fallback->index).gold_label;
    }
  }

  const auto contrast = nearest(dataset, q, [&](const Sample& s) { return s.gold_label == *label; });
  if (!contrast) throw Error(Errc::no_candidate, "no other sample has gold label " + *label);
  triple.contrast_label = *label;
  triple.contrast_id = *contrast->id;
  return triple;
}

ContrastTriple select_contrast(const Dataset& dataset, std::string_view query_id,
                               const std::optional<LabelId>& contrast_label) {
  return select_contrast(dataset, confusion_table(dataset), query_id, contrast_label);
}

PairContribution similarity_contributions(const Eigen::MatrixXd& query_tokens,
                                          const Eigen::MatrixXd& other_tokens) {
  const auto n = static_cast<double>(query_tokens.rows());
  const auto m = static_cast<double>(other_tokens.rows());
  const double nq = (query_tokens.colwise().sum() / n).norm();
  const double ns = (other_tokens.colwise().sum() / m).norm();
  if (nq == 0.0 || ns == 0.0) {
    throw Error(Errc::degenerate_input, "pooled embedding has zero norm");
  }
  const Eigen::MatrixXd dots = query_tokens * other_tokens.transpose();
  const double scale = n * m * nq * ns;
  const Eigen::VectorXd q_side = dots.rowwise().sum() / scale;
  const Eigen::VectorXd s_side = dots.colwise().sum().transpose() / scale;

  PairContribution out;
  out.query.assign(q_side.data(), q_side.data() + q_side.size());
  out.other.assign(s_side.data(), s_side.data() + s_side.size());
  const Eigen::VectorXd pq = query_tokens.colwise().mean().transpose();
  const Eigen::VectorXd ps = other_tokens.colwise().mean().transpose();
  out.similarity = pq.dot(ps) / (pq.norm() * ps.norm());
  return out;
}

RelationGraph relation_graph(const Dataset& dataset, const ContrastTriple& triple, double tau) {
  if (!std::isfinite(tau) || tau < -1.0 || tau > 1.0) {
    throw Error(Errc::invalid_argument, "edge threshold must lie in [-1, 1]");
  }
  const std::array<std::pair<const char*, const std::string*>, 3> roles = {
      {{"query", &triple.query_id}, {"closest", &triple.closest_id}, {"contrast", &triple.contrast_id}}};
  std::array<std::size_t, 3> idx{};
  RelationGraph graph;
  graph.tau = tau;
  for (std::size_t k = 0; k < 3; ++k) {
    idx[k] = dataset.index_of(*roles[k].second);
    const auto& s = dataset.sample(idx[k]);
    graph.columns[k] = {roles[k].first, s.id, s.gold_label, s.pred_label, s.tokens};
  }

  const auto& q = dataset.token_embeddings(idx[0]);
  for (std::size_t k = 1; k < 3; ++k) {
    const auto& other = dataset.token_embeddings(idx[k]);
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      for (Eigen::Index j = 0; j < other.rows(); ++j) {
        const double w = cosine(q.row(i).transpose(), other.row(j).transpose());
        if (w >= tau) {
          graph.edges.push_back({roles[k].first, static_cast<int>(i), static_cast<int>(j), w});
        }
      }
    }
  }
  graph.closest = similarity_contributions(q, dataset.token_embeddings(idx[1]));
  graph.contrast = similarity_contributions(q, dataset.token_embeddings(idx[2]));
  return graph;
}

Summary summarize(const ContrastTriple& triple, const RelationGraph& graph,
                  const ImportanceProfile& profile) {
  if (graph.columns[0].sample_id != triple.query_id || profile.sample_id != triple.query_id) {
    throw Error(Errc::invalid_argument, "summary inputs describe different samples");
  }
  const auto& tokens = graph.columns[0].tokens;
  SummarySlots slots;
  slots.query_id = triple.query_id;
  slots.predicted_label = triple.predicted_label;
  slots.gold_label = triple.gold_label;
  slots.correct = triple.predicted_label == triple.gold_label;
  slots.closest_id = triple.closest_id;
  slots.closest_similarity = graph.closest.similarity;
  slots.contrast_label = triple.contrast_label;
  slots.contrast_id = triple.contrast_id;
  slots.contrast_similarity = graph.contrast.similarity;

  const auto totals = profile.totals();
  std::vector<std::size_t> order(tokens.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ta = a < totals.size() ? totals[a] : 0.0;
    const double tb = b < totals.size() ? totals[b] : 0.0;
    return ta > tb;
  });
  for (std::size_t i = 0; i < order.size() && i < 2; ++i) slots.supporting_tokens.push_back(tokens[order[i]]);

  auto mean = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  const double mean_closest = mean(graph.closest.query);
  const double mean_contrast = mean(graph.contrast.query);
  std::set<std::string> seen;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (graph.closest.query[i] > mean_closest && graph.contrast.query[i] > mean_contrast &&
        seen.insert(tokens[i]).second) {
      slots.confounders.push_back(tokens[i]);
    }
  }

  std::string text = "Sample " + slots.query_id + " is predicted as \"" + slots.predicted_label + "\"";
  text += slots.correct ? ", which matches its gold label."
                        : ", but its gold label is \"" + slots.gold_label + "\".";
  text += " Its closest example with the same prediction is " + slots.closest_id +
          " (cosine similarity " + format_similarity(slots.closest_similarity) + ").";
  if (slots.supporting_tokens.size() == 1) {
    text += " The token contributing most to the prediction is " + quoted_list(slots.supporting_tokens) + ".";
  } else {
    text += " The tokens contributing most to the prediction are " + quoted_list(slots.supporting_tokens) + ".";
  }
  text += " The contrast example for \"" + slots.contrast_label + "\" is " + slots.contrast_id +
          " (cosine similarity " + format_similarity(slots.contrast_similarity) + ").";
  if (slots.confounders.size() == 1) {
    text += " The token " + quoted_list(slots.confounders) + " relates to both \"" +
            slots.predicted_label + "\" and \"" + slots.contrast_label +
            "\" and may be a confounding factor.";
  } else if (slots.confounders.size() > 1) {
    text += " The tokens " + quoted_list(slots.confounders) + " relate to both \"" +
            slots.predicted_label + "\" and \"" + slots.contrast_label +
            "\" and may be confounding factors.";
  }
  return {std::move(text), std::move(slots)};
}

}  // namespace textscape
