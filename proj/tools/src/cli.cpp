#include "subsearch/tools/cli.hpp"

#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "subsearch/evaluation.hpp"
#include "subsearch/index_io.hpp"
#include "subsearch/report_io.hpp"
#include "subsearch/sweep.hpp"
#include "subsearch/synthetic.hpp"
#include "subsearch/tools/http.hpp"
#include "subsearch/tools/search_api.hpp"

namespace subsearch::tools {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Bad flag values detected after parsing; reported with exit code 1.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Ranking flags shared by query, eval, sweep and serve.
struct RankingFlags {
  std::string distance = "iou";
  std::string fusion = "linear";
  double alpha = 0.5;
  std::string candidate_mode = "all_overlap";

  void add_to(CLI::App& app) {
    app.add_option("--distance", distance, "none | ad | sd | cd | iou")
        ->envname("SUBSEARCH_DISTANCE")
        ->capture_default_str();
    app.add_option("--fusion", fusion, "linear | geometric_mean")
        ->envname("SUBSEARCH_FUSION")
        ->capture_default_str();
    app.add_option("--alpha", alpha, "weight of the geometric distance")
        ->envname("SUBSEARCH_ALPHA")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app.add_option("--candidate-mode", candidate_mode,
                   "all_overlap | best_iou_per_image")
        ->envname("SUBSEARCH_CANDIDATE_MODE")
        ->capture_default_str();
  }

  RankingConfig to_config() const {
    RankingConfig cfg;
    try {
      cfg.distance_kind = parse_distance_kind(distance);
      cfg.fusion = parse_fusion(fusion);
      cfg.alpha = alpha;
      cfg.candidate_mode = parse_candidate_mode(candidate_mode);
      cfg.validate();
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
    return cfg;
  }
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text,
                  std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error("cannot write " + path);
  f << text;
}

// Raw (unnormalized) vectors: either a SUBEMB1 matrix file or a JSON array of
// arrays.
EmbeddingMatrix read_vectors(const fs::path& path) {
  {
    std::ifstream in(path, std::ios::binary);
    char magic[8] = {};
    in.read(magic, sizeof(magic));
    if (in && std::memcmp(magic, kMatrixMagic, sizeof(magic)) == 0) {
      return read_embedding_matrix(path);
    }
  }
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw Error("vectors file is neither SUBEMB1 nor JSON: " +
                std::string(e.what()));
  }
  EmbeddingMatrix m;
  for (const auto& row : j) {
    const auto values = row.get<std::vector<float>>();
    EmbeddingVector checked(values);  // rejects non-finite values
    m.append(checked.values());
  }
  return m;
}

EmbeddingMatrix normalize_rows(const EmbeddingMatrix& m) {
  EmbeddingMatrix out(m.dim(), {});
  for (std::size_t r = 0; r < m.rows(); ++r) {
    try {
      out.append(l2_normalize(m.row(r)).values());
    } catch (const InvalidArgument&) {
      throw InvalidArgument("degenerate embedding in row " + std::to_string(r));
    }
  }
  return out;
}

// "distance[:fusion[:alpha[:candidate_mode]]]"
NamedConfig parse_config_spec(const std::string& spec,
                              const RankingConfig& base) try {
  RankingConfig cfg = base;
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.empty() || parts.size() > 4) {
    throw InvalidArgument("bad config spec '" + spec + "'");
  }
  cfg.distance_kind = parse_distance_kind(parts[0]);
  if (parts.size() > 1) cfg.fusion = parse_fusion(parts[1]);
  if (parts.size() > 2) {
    try {
      cfg.alpha = std::stod(parts[2]);
    } catch (const std::exception&) {
      throw InvalidArgument("bad alpha in config spec '" + spec + "'");
    }
  }
  if (parts.size() > 3) cfg.candidate_mode = parse_candidate_mode(parts[3]);
  cfg.validate();
  return {cfg.describe(), cfg};
} catch (const InvalidArgument& e) {
  throw UsageError(e.what());
}

TextField text_field_flag(const std::string& value) {
  try {
    return parse_text_field(value);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
}

struct Globals {
  std::string index;
  int threads = 0;
};

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw CLI::ValidationError("number list", "bad number '" + item + "'");
    }
    if (used != item.size()) {
      throw CLI::ValidationError("number list", "bad number '" + item + "'");
    }
    values.push_back(v);
  }
  if (values.empty()) throw CLI::ValidationError("number list", "empty list");
  return values;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Region-constrained image search engine and evaluation harness",
               "subsearch"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  // build-index
  auto* build = app.add_subcommand("build-index",
                                   "Normalize vectors and write an index");
  std::string build_manifest;
  std::string build_vectors;
  std::string build_out;
  bool build_no_normalize = false;
  build->add_option("--manifest", build_manifest, "input manifest JSON")
      ->required()->check(CLI::ExistingFile);
  build->add_option("--vectors", build_vectors,
                    "SUBEMB1 matrix or JSON array of vectors")
      ->required()->check(CLI::ExistingFile);
  build->add_option("--out", build_out, "output index directory")->required();
  build->add_flag("--no-normalize", build_no_normalize,
                  "expect rows to be normalized already");

  // query
  auto* query = app.add_subcommand("query", "Rank images for one request");
  std::string query_index;
  std::string query_request;
  std::string query_out;
  std::string query_embed_url;
  std::size_t query_top_k = 100;
  RankingFlags query_flags;
  query->add_option("--index", query_index)->envname("SUBSEARCH_INDEX")->required();
  query->add_option("--request", query_request, "request JSON file")
      ->required()->check(CLI::ExistingFile);
  query->add_option("--top-k", query_top_k)
      ->envname("SUBSEARCH_TOP_K")->check(CLI::PositiveNumber)->capture_default_str();
  query->add_option("--embed-url", query_embed_url)->envname("SUBSEARCH_EMBED_URL");
  query->add_option("--out", query_out, "output file (default stdout)");
  query_flags.add_to(*query);

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate annotations against an index");
  std::string eval_index;
  std::string eval_annotations;
  std::string eval_out;
  std::string eval_text_field = "long";
  std::optional<double> eval_sigma_shift;
  double eval_sigma_area = 0.0;
  std::uint64_t eval_seed = 0;
  int eval_ref_width = 0;
  int eval_ref_height = 0;
  int eval_threads = 0;
  RankingFlags eval_flags;
  eval->add_option("--index", eval_index)->envname("SUBSEARCH_INDEX")->required();
  eval->add_option("--annotations", eval_annotations, "annotations JSONL")
      ->required()->check(CLI::ExistingFile);
  eval->add_option("--text-field", eval_text_field, "short | long")
      ->capture_default_str();
  eval->add_option("--sigma-shift", eval_sigma_shift,
                   "shift sigma in pixels of the reference frame");
  eval->add_option("--sigma-area", eval_sigma_area, "scale sigma")
      ->check(CLI::NonNegativeNumber);
  eval->add_option("--seed", eval_seed, "perturbation master seed");
  eval->add_option("--ref-width", eval_ref_width,
                   "reference frame width in px (default: first indexed frame)");
  eval->add_option("--ref-height", eval_ref_height,
                   "reference frame height in px (default: first indexed frame)");
  eval->add_option("--threads", eval_threads)->check(CLI::NonNegativeNumber);
  eval->add_option("--out", eval_out, "report JSON file (default stdout)");
  eval_flags.add_to(*eval);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Perturbation sweep to CSV");
  std::string sweep_index;
  std::string sweep_annotations;
  std::string sweep_out;
  std::string sweep_text_field = "long";
  std::string sweep_sigma_shift = "0,10,25,50";
  std::string sweep_sigma_area = "0,0.1,0.25,0.5";
  std::vector<std::string> sweep_configs;
  std::uint64_t sweep_seed = 0;
  int sweep_ref_width = 0;
  int sweep_ref_height = 0;
  int sweep_threads = 0;
  RankingFlags sweep_flags;
  sweep->add_option("--index", sweep_index)->envname("SUBSEARCH_INDEX")->required();
  sweep->add_option("--annotations", sweep_annotations)
      ->required()->check(CLI::ExistingFile);
  sweep->add_option("--text-field", sweep_text_field)->capture_default_str();
  sweep->add_option("--sigma-shift", sweep_sigma_shift,
                    "comma-separated shift sigmas in px")->capture_default_str();
  sweep->add_option("--sigma-area", sweep_sigma_area,
                    "comma-separated scale sigmas")->capture_default_str();
  sweep->add_option("--config", sweep_configs,
                    "distance[:fusion[:alpha[:candidate_mode]]], repeatable; "
                    "defaults to the ranking flags");
  sweep->add_option("--seed", sweep_seed)->capture_default_str();
  sweep->add_option("--ref-width", sweep_ref_width);
  sweep->add_option("--ref-height", sweep_ref_height);
  sweep->add_option("--threads", sweep_threads)->check(CLI::NonNegativeNumber);
  sweep->add_option("--out", sweep_out, "CSV file (default stdout)");
  sweep_flags.add_to(*sweep);

  // diagnostics
  auto* diag = app.add_subcommand("diagnostics",
                                  "Region coverage diagnostics for an index");
  std::string diag_index;
  std::string diag_annotations;
  diag->add_option("--index", diag_index)->envname("SUBSEARCH_INDEX")->required();
  diag->add_option("--annotations", diag_annotations)
      ->required()->check(CLI::ExistingFile);

  // make-synthetic
  auto* synth = app.add_subcommand(
      "make-synthetic", "Write a synthetic homogeneous index and annotations");
  std::string synth_out;
  SyntheticSpec synth_spec;
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--images", synth_spec.images)->capture_default_str();
  synth->add_option("--dim", synth_spec.dim)->capture_default_str();
  synth->add_option("--queries", synth_spec.queries)->capture_default_str();
  synth->add_option("--seed", synth_spec.seed)->capture_default_str();

  // serve
  auto* serve = app.add_subcommand("serve", "Start the HTTP search service");
  std::string serve_index;
  std::string serve_embed_url;
  std::string serve_images_dir;
  std::string serve_host = "0.0.0.0";
  int serve_port = 8080;
  std::size_t serve_top_k = 100;
  RankingFlags serve_flags;
  serve->add_option("--index", serve_index)->envname("SUBSEARCH_INDEX")->required();
  serve->add_option("--embed-url", serve_embed_url)->envname("SUBSEARCH_EMBED_URL");
  serve->add_option("--images-dir", serve_images_dir)
      ->envname("SUBSEARCH_IMAGES_DIR");
  serve->add_option("--host", serve_host)->capture_default_str();
  serve->add_option("--port", serve_port)
      ->envname("SUBSEARCH_PORT")->check(CLI::Range(1, 65535))->capture_default_str();
  serve->add_option("--top-k", serve_top_k)
      ->envname("SUBSEARCH_TOP_K")->check(CLI::PositiveNumber)->capture_default_str();
  serve_flags.add_to(*serve);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  auto reference_size = [](const IndexedCollection& coll, int w, int h) {
    if (w <= 0) w = coll.images.empty() ? 1 : coll.images.front().frame_width_px;
    if (h <= 0) h = coll.images.empty() ? 1 : coll.images.front().frame_height_px;
    return std::pair{w, h};
  };

  try {
    if (*build) {
      EmbeddingMatrix vectors = read_vectors(build_vectors);
      if (!build_no_normalize) vectors = normalize_rows(vectors);
      const IndexedCollection coll =
          collection_from_manifest(read_text(build_manifest), std::move(vectors));
      save_index(coll, build_out);
      out << "indexed " << coll.images.size() << " images, "
          << coll.region_count() << " regions, dim " << coll.dim() << " -> "
          << build_out << "\n";
    } else if (*query) {
      const IndexedCollection coll = load_index(query_index);
      SearchDefaults defaults{query_flags.to_config(), query_top_k};
      std::shared_ptr<TextEmbedder> embedder;
      if (!query_embed_url.empty()) {
        embedder = std::make_shared<HttpTextEmbedder>(query_embed_url);
      }
      const SearchService service(coll, defaults, embedder);
      SearchRequest req = parse_search_request(read_text(query_request), defaults);
      if (query->count("--top-k") > 0) req.top_k = query_top_k;
      write_output(query_out, ranked_list_to_json(service.run(req), req.top_k) + "\n",
                   out);
    } else if (*eval) {
      const IndexedCollection coll = load_index(eval_index);
      const auto annotations = read_annotations(eval_annotations);
      const RankingConfig cfg = eval_flags.to_config();
      EvaluateOptions options;
      options.text_field = text_field_flag(eval_text_field);
      options.threads = static_cast<unsigned>(eval_threads);
      if (eval_sigma_shift || eval_sigma_area > 0.0) {
        const auto [w, h] = reference_size(coll, eval_ref_width, eval_ref_height);
        options.perturbation = PerturbationConfig::from_pixels(
            eval_sigma_shift.value_or(0.0), eval_sigma_area, eval_seed, w, h);
      }
      const auto reports = evaluate(coll, annotations, cfg, options);
      write_output(eval_out, eval_reports_to_json(reports, cfg, options), out);
    } else if (*sweep) {
      const IndexedCollection coll = load_index(sweep_index);
      const auto annotations = read_annotations(sweep_annotations);
      const RankingConfig base = sweep_flags.to_config();
      std::vector<NamedConfig> configs;
      for (const auto& spec : sweep_configs) {
        configs.push_back(parse_config_spec(spec, base));
      }
      if (configs.empty()) configs.push_back({base.describe(), base});
      SweepOptions options;
      options.sigma_shift = parse_number_list(sweep_sigma_shift);
      options.sigma_area = parse_number_list(sweep_sigma_area);
      options.master_seed = sweep_seed;
      std::tie(options.ref_width_px, options.ref_height_px) =
          reference_size(coll, sweep_ref_width, sweep_ref_height);
      options.text_field = text_field_flag(sweep_text_field);
      options.threads = static_cast<unsigned>(sweep_threads);
      const auto cells = perturbation_sweep(coll, annotations, configs, options);
      std::ostringstream csv;
      write_sweep_csv(csv, cells);
      write_output(sweep_out, csv.str(), out);
    } else if (*diag) {
      const IndexedCollection coll = load_index(diag_index);
      out << diagnostics_to_json(diagnostics(coll, read_annotations(diag_annotations)));
    } else if (*synth) {
      const SyntheticDataset data = make_homogeneous_dataset(synth_spec);
      save_index(data.collection, fs::path(synth_out) / "index");
      write_annotations(fs::path(synth_out) / "annotations.jsonl", data.annotations);
      out << "wrote " << data.collection.images.size() << " images and "
          << data.annotations.size() << " annotations to " << synth_out << "\n";
    } else if (*serve) {
      const IndexedCollection coll = load_index(serve_index);
      std::shared_ptr<TextEmbedder> embedder;
      if (!serve_embed_url.empty()) {
        embedder = std::make_shared<HttpTextEmbedder>(serve_embed_url);
      }
      const SearchService service(coll, {serve_flags.to_config(), serve_top_k},
                                  embedder);
      ServerOptions options;
      options.host = serve_host;
      options.port = serve_port;
      if (!serve_images_dir.empty()) options.images_dir = serve_images_dir;
      httplib::Server server;
      register_routes(server, service, options);
      err << "serving " << coll.images.size() << " images on " << serve_host
          << ":" << serve_port << "\n";
      if (!server.listen(serve_host, serve_port)) {
        throw Error("cannot listen on " + serve_host + ":" +
                    std::to_string(serve_port));
      }
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace subsearch::tools
