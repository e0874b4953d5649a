// textscape command-line interface.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <thread>

#include <CLI11.hpp>

#include "textscape/api.hpp"
#include "textscape/service.hpp"
#include "textscape/store.hpp"

namespace {

using namespace textscape;
using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;
constexpr int kExitUsage = 64;
constexpr const char* kStoreEnv = "TEXTSCAPE_STORE";

struct Output {
  std::string format = "json";
  std::optional<std::string> out;
};

void add_output(CLI::App* cmd, Output& output) {
  cmd->add_option("--format", output.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("-o,--out", output.out, "Write to this file instead of stdout");
}

void emit(const Output& output, std::string_view kind, const json& payload) {
  const std::string text = output.format == "csv" ? payload_to_csv(kind, payload) : payload.dump() + "\n";
  if (!output.out) {
    std::cout << text;
    return;
  }
  std::ofstream file(*output.out, std::ios::binary);
  if (!file || !(file << text)) throw Error(Errc::io_error, "cannot write " + *output.out);
}

// Registers --flag-name for the query parameter flag_name.
void add_param(CLI::App* cmd, QueryParams& params, const std::string& name, const std::string& help) {
  std::string flag = "--" + name;
  for (auto& c : flag) {
    if (c == '_') c = '-';
  }
  cmd->add_option_function<std::string>(flag, [&params, name](const std::string& v) { params[name] = v; }, help);
}

void add_filter_params(CLI::App* cmd, QueryParams& params) {
  add_param(cmd, params, "errors_only", "Only misclassified samples (true|false)");
  add_param(cmd, params, "conf_lo", "Lower confidence bound");
  add_param(cmd, params, "conf_hi", "Upper confidence bound");
  add_param(cmd, params, "labels", "Comma-separated labels (gold or predicted)");
}

void add_projection_options(CLI::App* cmd, std::optional<std::string>& method, std::optional<double>& perplexity,
                            std::optional<int>& iterations, std::optional<std::uint64_t>& seed) {
  cmd->add_option("--method", method, "Projection method")->check(CLI::IsMember({"tsne", "pca"}));
  cmd->add_option("--perplexity", perplexity, "t-SNE perplexity");
  cmd->add_option("--iterations", iterations, "t-SNE iterations");
  cmd->add_option("--seed", seed, "Random seed");
}

ProjectionParams projection_with(ProjectionParams base, const std::optional<std::string>& method,
                                 const std::optional<double>& perplexity, const std::optional<int>& iterations) {
  if (method) base.method = parse_projection_method(*method);
  if (perplexity) base.perplexity = *perplexity;
  if (iterations) base.iterations = *iterations;
  return base;
}

std::string summary_line(const Dataset& dataset) {
  return "M=" + std::to_string(dataset.size()) + ", labels=" + std::to_string(dataset.label_set().size()) +
         ", d=" + std::to_string(dataset.embeddings().dim);
}

void serve(const std::vector<std::string>& stores, ServeConfig config) {
  auto registry = std::make_shared<Registry>();
  for (const auto& store : stores) {
    auto entry = load_entry(store);
    std::cerr << "loaded " << entry->id << " (" << summary_line(entry->dataset) << ")\n";
    registry->add(std::move(entry));
  }

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Service service(registry, config);
  const int port = service.bind();
  std::cout << "listening on http://" << config.host << ":" << port << std::endl;
  std::thread([&service, signals] {
    int received = 0;
    sigwait(&signals, &received);
    service.stop();
  }).detach();
  service.listen();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic landscape analysis of text classifier predictions"};
  app.require_subcommand(1);
  app.fallthrough(false);

  // ingest
  CorpusPaths inputs;
  std::string ingest_out;
  std::optional<std::string> ingest_id;
  std::optional<std::string> method;
  std::optional<double> perplexity;
  std::optional<int> iterations;
  std::optional<std::uint64_t> seed;
  auto* ingest = app.add_subcommand("ingest", "Validate inputs and build a store directory");
  ingest->add_option("--corpus", inputs.corpus, "Corpus JSON-lines file")->required();
  ingest->add_option("--token-emb", inputs.token_embeddings, "SEMT token embeddings")->required();
  ingest->add_option("--sample-emb", inputs.sample_embeddings, "SEMB sample embeddings");
  ingest->add_option("--lexicon", inputs.lexicon, "Concept lexicon JSON-lines file");
  ingest->add_option("--importance", inputs.importance, "External importance JSON-lines file");
  ingest->add_option("--stopwords", inputs.stopwords, "Stopword list, one word per line");
  ingest->add_option("--out", ingest_out, "Store directory")->envname(kStoreEnv)->required();
  ingest->add_option("--id", ingest_id, "Dataset id (default: store directory name)");
  add_projection_options(ingest, method, perplexity, iterations, seed);

  // precompute
  std::string store;
  auto* precompute = app.add_subcommand("precompute", "Project the store's dataset and write caches");
  precompute->add_option("--store", store, "Store directory")->envname(kStoreEnv)->required();
  add_projection_options(precompute, method, perplexity, iterations, seed);

  // serve
  std::vector<std::string> stores;
  ServeConfig serve_config;
  std::optional<std::string> static_dir;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API over one or more stores");
  serve_cmd->add_option("--store", stores, "Store directory (repeatable)")->envname(kStoreEnv)->required();
  serve_cmd->add_option("--host", serve_config.host, "Bind address");
  serve_cmd->add_option("--port", serve_config.port, "Port (0 picks a free port)");
  serve_cmd->add_option("--static", static_dir, "Directory of static UI assets");

  // query subcommands
  QueryParams params;
  Output output;
  auto query_command = [&](const char* name, const char* help) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("--store", store, "Store directory")->envname(kStoreEnv)->required();
    add_output(cmd, output);
    return cmd;
  };

  auto* points = query_command("points", "Projected sample positions");
  add_filter_params(points, params);

  auto* local_words = query_command("local-words", "Localized words or concepts");
  add_param(local_words, params, "freq", "Frequency threshold T");
  add_param(local_words, params, "locality", "Locality threshold");
  add_param(local_words, params, "quantile", "Spread quantile");
  add_param(local_words, params, "mode", "words|concepts");
  add_param(local_words, params, "stopwords", "ignore|keep");
  add_param(local_words, params, "concept_freq", "Concept frequency threshold");
  add_param(local_words, params, "concept_locality", "Concept locality threshold");
  add_param(local_words, params, "region", "Flat coordinate list (2 corners or 3+ vertices)");
  add_filter_params(local_words, params);

  auto* lists = query_command("lists", "Ranked words, concepts and labels");
  add_param(lists, params, "limit", "Maximum items per list");
  add_param(lists, params, "stopwords", "ignore|keep");
  add_param(lists, params, "region", "Flat coordinate list (2 corners or 3+ vertices)");
  add_filter_params(lists, params);

  auto* confusions = query_command("confusions", "Confusion table and error shares");
  add_param(confusions, params, "sort", "freq|gold|pred");
  add_param(confusions, params, "secondary", "freq|gold|pred");
  add_param(confusions, params, "conf_lo", "Lower confidence bound");
  add_param(confusions, params, "conf_hi", "Upper confidence bound");

  auto* clusters = query_command("label-clusters", "Labels grouped by prototype similarity");
  add_param(clusters, params, "cut", "Linkage cut in (0, 2)");

  auto* hulls = query_command("hulls", "Convex hull per gold label");
  add_param(hulls, params, "labels", "Comma-separated labels");

  std::string sample_id;
  auto* explain = query_command("explain", "Explain one sample");
  explain->add_option("--sample", sample_id, "Sample id")->required();
  add_param(explain, params, "contrast_label", "Contrast label");
  add_param(explain, params, "tau", "Edge threshold in [-1, 1]");
  add_param(explain, params, "metrics", "Comma-separated metrics in stacking order");

  std::vector<std::string> compare_stores;
  std::string side_a;
  std::string side_b;
  std::optional<std::string> kind;
  std::optional<std::string> compare_stopwords;
  auto* compare = app.add_subcommand("compare", "Compare two sample groups");
  compare->add_option("--store", compare_stores, "Store directory (repeatable)")->envname(kStoreEnv)->required();
  compare->add_option("--side-a", side_a, "Group selector JSON")->required();
  compare->add_option("--side-b", side_b, "Group selector JSON")->required();
  compare->add_option("--kind", kind, "word|concept|label|gold_label");
  compare->add_option("--stopwords", compare_stopwords, "ignore|keep");
  add_output(compare, output);

  std::string result_file;
  std::string result_kind;
  auto* export_cmd = app.add_subcommand("export", "Convert a saved JSON result to CSV or JSON");
  export_cmd->add_option("--result", result_file, "Saved payload file")->required();
  export_cmd
      ->add_option("--kind", result_kind, "Payload kind")
      ->required()
      ->check(CLI::IsMember({"datasets", "points", "local-words", "lists", "confusions", "label-clusters", "hulls",
                             "explanation", "compare"}));
  add_output(export_cmd, output);

  auto* openapi = app.add_subcommand("openapi", "Print the OpenAPI description of the HTTP API");
  add_output(openapi, output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    if (*ingest) {
      const auto id = ingest_id.value_or(fs::path(ingest_out).lexically_normal().filename().string());
      const auto projection = projection_with({}, method, perplexity, iterations);
      ingest_store(inputs, ingest_out, id.empty() ? "dataset" : id, projection, seed.value_or(42));
      std::cout << summary_line(load_store_dataset(ingest_out)) << "\n";
    } else if (*precompute) {
      std::optional<ProjectionParams> projection;
      if (method || perplexity || iterations) {
        projection = projection_with(read_manifest(store).projection, method, perplexity, iterations);
      }
      const auto layout = precompute_store(store, projection, seed);
      for (const auto& w : layout.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << "layout=" << to_string(layout.method) << ", seed=" << layout.seed
                << ", points=" << layout.positions.rows() << "\n";
    } else if (*serve_cmd) {
      if (static_dir) serve_config.static_dir = *static_dir;
      serve(stores, serve_config);
    } else if (*compare) {
      Registry registry;
      for (const auto& s : compare_stores) registry.add(load_entry(s));
      json request;
      try {
        request = {{"side_a", json::parse(side_a)}, {"side_b", json::parse(side_b)}};
      } catch (const json::parse_error& e) {
        throw Error(Errc::invalid_argument, std::string("side selector is not valid JSON: ") + e.what());
      }
      if (kind) request["item_kind"] = *kind;
      if (compare_stopwords) request["stopwords"] = *compare_stopwords;
      emit(output, "compare", compare_payload(registry, request));
    } else if (*export_cmd) {
      json payload;
      try {
        payload = json::parse(std::ifstream(result_file, std::ios::binary));
      } catch (const json::parse_error& e) {
        throw Error(Errc::invalid_format, result_file + ": " + e.what());
      }
      emit(output, result_kind, payload);
    } else if (*openapi) {
      if (output.format == "csv") throw Error(Errc::invalid_argument, "the OpenAPI document has no CSV form");
      emit(output, "openapi", openapi_document());
    } else {
      const auto entry = load_entry(store);
      if (*points) emit(output, "points", points_payload(*entry, params));
      if (*local_words) emit(output, "local-words", local_words_payload(*entry, params));
      if (*lists) emit(output, "lists", lists_payload(*entry, params));
      if (*confusions) emit(output, "confusions", confusions_payload(*entry, params));
      if (*clusters) emit(output, "label-clusters", label_clusters_payload(*entry, params));
      if (*hulls) emit(output, "hulls", hulls_payload(*entry, params));
      if (*explain) emit(output, "explanation", explanation_payload(*entry, sample_id, params));
    }
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "error [" << machine_code(e.code()) << "]: " << e.what() << "\n";
    return is_validation_error(e.code()) ? kExitValidation : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
