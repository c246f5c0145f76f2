// xrdfs: command-line driver for the reasoning, encoding and dataset stages.
//
// Run reports go to stdout as one JSON object per line; logs go to stderr
// (level from XRDFS_LOG_LEVEL: trace, debug, info, warn, error, off).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "xrdfs/xrdfs.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("xrdfs");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  if (const char* lvl = std::getenv("XRDFS_LOG_LEVEL")) spdlog::set_level(spdlog::level::from_str(lvl));
  else spdlog::set_level(spdlog::level::info);
}

void print_report(const ordered_json& j) { std::cout << j.dump() << std::endl; }

xrdfs::Graph load_graph(const std::string& path, bool lenient) {
  xrdfs::ParseDiagnostics diag;
  auto g = xrdfs::load_ntriples(path, xrdfs::ParseOptions{lenient}, &diag);
  for (const auto& e : diag.skipped) spdlog::warn("{}: skipped {}", path, e.what());
  if (diag.duplicates > 0) spdlog::debug("{}: {} duplicate statements collapsed", path, diag.duplicates);
  return g;
}

xrdfs::Ontology load_ontology(const std::string& path, bool lenient) {
  auto onto = xrdfs::extract_ontology(load_graph(path, lenient));
  for (const auto& w : onto.warnings()) spdlog::warn("{}: {}", path, w);
  return onto;
}

xrdfs::OverflowPolicy parse_policy(const std::string& s) {
  return s == "truncate" ? xrdfs::OverflowPolicy::Truncate : xrdfs::OverflowPolicy::Skip;
}

std::vector<xrdfs::Token> parse_tokens(const std::string& text) {
  std::vector<xrdfs::Token> out;
  std::string cleaned = text;
  for (char& c : cleaned) {
    if (c == ',' || c == '[' || c == ']') c = ' ';
  }
  std::istringstream in(cleaned);
  long long v;
  while (in >> v) {
    if (v < 0) throw xrdfs::MalformedSequence("negative token");
    out.push_back(static_cast<xrdfs::Token>(v));
  }
  if (!in.eof()) throw xrdfs::MalformedSequence("token list must be integers");
  return out;
}

struct Common {
  std::string abox;
  std::string tbox;
  bool lenient = false;
  std::size_t jobs = 1;
};

void add_inputs(CLI::App* cmd, Common& c, bool abox_required = true) {
  auto* a = cmd->add_option("--abox", c.abox, "A-Box N-Triples file")->check(CLI::ExistingFile);
  if (abox_required) a->required();
  cmd->add_option("--tbox", c.tbox, "T-Box N-Triples file")->required()->check(CLI::ExistingFile);
  cmd->add_flag("--lenient", c.lenient, "skip malformed lines instead of failing");
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Explainable RDFS reasoning: ground truth, graph-word encoding and datasets"};
  app.require_subcommand(1);

  Common common;

  // materialize
  std::string mat_out;
  bool canonical = false;
  auto* materialize = app.add_subcommand("materialize", "emit inferred triples as N-Triples");
  add_inputs(materialize, common);
  materialize->add_option("--out", mat_out, "output file (default stdout)");
  materialize->add_flag("--canonical", canonical, "sort output lines");

  // explain
  std::string triple_text;
  auto* explain = app.add_subcommand("explain", "print the canonical justification of one inferred triple");
  add_inputs(explain, common);
  explain->add_option("--triple", triple_text, "\"<s> <p> <o>\" in N-Triples syntax")->required();

  // ground-truth
  std::string gt_out;
  std::size_t max_just = 2;
  std::string overflow = "skip";
  auto* ground = app.add_subcommand("ground-truth", "build (graph, inferred triple) -> justification records");
  add_inputs(ground, common);
  ground->add_option("--out", gt_out, "records.jsonl")->required();
  ground->add_option("--max-just", max_just, "maximum justification triples")->capture_default_str();
  ground->add_option("--on-overflow", overflow, "skip|truncate")
      ->check(CLI::IsMember({"skip", "truncate"}))
      ->capture_default_str();
  ground->add_option("--jobs", common.jobs, "worker threads (0 = all cores)")->capture_default_str();

  // encode
  std::string records_path;
  std::string out_dir;
  std::optional<std::size_t> l_max;
  auto* encode = app.add_subcommand("encode", "build the encoding context and graph-word catalog");
  add_inputs(encode, common);
  encode->add_option("--records", records_path, "records.jsonl from ground-truth")->required()->check(CLI::ExistingFile);
  encode->add_option("--out-dir", out_dir, "writes context.json and catalog.jsonl")->required();
  encode->add_option("--l-max", l_max, "local resource capacity (default: profiled)");

  // embed
  std::string layers_path;
  std::string emb_out;
  std::size_t dim = 4;
  std::optional<double> beta;
  std::string embed_ctx;
  auto* embed = app.add_subcommand("embed", "HOPE-embed every catalog layer");
  embed->add_option("--layers", layers_path, "catalog.jsonl")->required()->check(CLI::ExistingFile);
  embed->add_option("--d", dim, "embedding dimension (even)")->capture_default_str();
  embed->add_option("--out", emb_out, "embeddings.bin")->required();
  embed->add_option("--beta", beta, "fixed Katz decay (default per layer)");
  embed->add_option("--context", embed_ctx, "context.json, to read N instead of inferring it")
      ->check(CLI::ExistingFile);
  embed->add_option("--jobs", common.jobs, "worker threads (0 = all cores)")->capture_default_str();

  // split
  double train_frac = 0.6;
  std::uint64_t seed = 0;
  auto* split = app.add_subcommand("split", "stratified train/validation split");
  split->add_option("--records", records_path, "records.jsonl")->required()->check(CLI::ExistingFile);
  split->add_option("--train-frac", train_frac, "training share")->capture_default_str();
  split->add_option("--seed", seed, "shuffle seed")->capture_default_str();
  split->add_option("--out-dir", out_dir, "writes split.json")->required();

  // emit
  std::string ctx_path;
  std::string catalog_path;
  std::string emb_path;
  std::string split_path;
  auto* emit = app.add_subcommand("emit", "write train/validation record files and manifest.json");
  emit->add_option("--context", ctx_path, "context.json")->required()->check(CLI::ExistingFile);
  emit->add_option("--catalog", catalog_path, "catalog.jsonl")->required()->check(CLI::ExistingFile);
  emit->add_option("--embeddings", emb_path, "embeddings.bin")->required()->check(CLI::ExistingFile);
  emit->add_option("--out-dir", out_dir, "output directory")->required();
  emit->add_option("--records", records_path, "records.jsonl (default <out-dir>/records.jsonl)");
  emit->add_option("--split", split_path, "split.json (default <out-dir>/split.json)");

  // stats
  auto* stats = app.add_subcommand("stats", "dataset statistics over a records file");
  stats->add_option("--records", records_path, "records.jsonl")->required()->check(CLI::ExistingFile);

  // pipeline
  std::string config_path;
  xrdfs::PipelineConfig pcfg;
  std::string p_overflow = "skip";
  auto* pipeline = app.add_subcommand("pipeline", "run every stage end to end");
  pipeline->add_option("--config", config_path, "JSON config mirroring the flags")->check(CLI::ExistingFile);
  pipeline->add_option("--abox", pcfg.abox, "A-Box N-Triples file");
  pipeline->add_option("--tbox", pcfg.tbox, "T-Box N-Triples file");
  pipeline->add_option("--out-dir", pcfg.out_dir, "output directory");
  pipeline->add_option("--l-max", pcfg.l_max, "local resource capacity (default: profiled)");
  pipeline->add_option("--d", pcfg.d, "embedding dimension")->capture_default_str();
  pipeline->add_option("--beta", pcfg.beta, "fixed Katz decay");
  pipeline->add_option("--train-frac", pcfg.train_fraction, "training share")->capture_default_str();
  pipeline->add_option("--seed", pcfg.seed, "shuffle seed")->capture_default_str();
  pipeline->add_option("--max-just", pcfg.max_justification_triples, "maximum justification triples")
      ->capture_default_str();
  pipeline->add_option("--on-overflow", p_overflow, "skip|truncate")->check(CLI::IsMember({"skip", "truncate"}));
  pipeline->add_flag("--lenient", pcfg.lenient, "skip malformed lines");
  pipeline->add_option("--jobs", pcfg.jobs, "worker threads (0 = all cores)")->capture_default_str();

  // decode
  std::size_t record_id = 0;
  std::string tokens_text;
  std::string predictions_path;
  std::string decode_tbox;
  std::string decode_out;
  auto* decode = app.add_subcommand("decode", "decode predicted token sequences and audit them against the reasoner");
  decode->add_option("--context", ctx_path, "context.json")->required()->check(CLI::ExistingFile);
  decode->add_option("--records", records_path, "records.jsonl from ground-truth")->required()->check(CLI::ExistingFile);
  auto* id_opt = decode->add_option("--id", record_id, "record id whose graph supplies the local IDs");
  auto* tok_opt = decode->add_option("--tokens", tokens_text, "token IDs, e.g. \"12 3 40 0 0 0\"");
  auto* batch_opt = decode->add_option("--predictions", predictions_path, "JSONL of {id, tokens} to audit")
                        ->check(CLI::ExistingFile);
  decode->add_option("--tbox", decode_tbox, "T-Box; enables exact/valid/invalid classification")
      ->check(CLI::ExistingFile);
  decode->add_option("--out", decode_out, "per-prediction results for --predictions (default stdout)");
  tok_opt->needs(id_opt);
  tok_opt->excludes(batch_opt);

  // Usage errors exit with 2, runtime failures with 1.
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*materialize) {
      auto abox = load_graph(common.abox, common.lenient);
      auto onto = load_ontology(common.tbox, common.lenient);
      xrdfs::Graph inferred;
      for (const auto& it : xrdfs::materialize(abox, onto)) inferred.insert(it.triple);
      xrdfs::SerializeOptions sopts{canonical};
      if (mat_out.empty()) {
        xrdfs::serialize_ntriples(inferred, std::cout, sopts);
      } else {
        std::ofstream out(mat_out, std::ios::binary);
        if (!out) throw xrdfs::Error("cannot write " + mat_out);
        xrdfs::serialize_ntriples(inferred, out, sopts);
        print_report({{"asserted", abox.size()}, {"inferred", inferred.size()}});
      }
    } else if (*explain) {
      auto abox = load_graph(common.abox, common.lenient);
      auto onto = load_ontology(common.tbox, common.lenient);
      auto j = xrdfs::justify(abox, onto, xrdfs::parse_triple(triple_text));
      std::cout << "# rule: " << xrdfs::rule_tag(j.rule) << '\n';
      for (const auto& t : j.support()) std::cout << t.str() << '\n';
    } else if (*ground) {
      auto abox = load_graph(common.abox, common.lenient);
      auto onto = load_ontology(common.tbox, common.lenient);
      auto subgraphs = xrdfs::split_dataset(abox);
      xrdfs::GroundTruthReport rep;
      auto records = xrdfs::build_records(subgraphs, onto, {max_just, parse_policy(overflow), common.jobs}, &rep);
      for (const auto& f : rep.failures) spdlog::error("sub-graph excluded: {}", f);
      xrdfs::write_records(gt_out, records);
      auto report = xrdfs::report_to_json(rep);
      std::ofstream(xrdfs::report_path_for(gt_out), std::ios::binary) << report.dump() << '\n';
      print_report(report);
    } else if (*encode) {
      auto abox = load_graph(common.abox, common.lenient);
      auto onto = load_ontology(common.tbox, common.lenient);
      auto records = xrdfs::read_records(records_path);
      auto ctx = xrdfs::make_context(onto, abox, records, xrdfs::split_dataset(abox), l_max);
      xrdfs::CatalogBuildReport rep;
      auto catalog = xrdfs::build_catalog(records, ctx, &rep);
      fs::create_directories(out_dir);
      ctx.save((fs::path(out_dir) / "context.json").string());
      catalog.save((fs::path(out_dir) / "catalog.jsonl").string());
      if (rep.dropped_triples > 0) spdlog::warn("dropped {} triples with predicates outside OP", rep.dropped_triples);
      print_report({{"op", ctx.op().size()},
                    {"oppp", ctx.oppp().size()},
                    {"gr", ctx.gr().size()},
                    {"l_max", ctx.l_max()},
                    {"n", ctx.n()},
                    {"vocab_size", ctx.vocab_size()},
                    {"graph_words", catalog.size()},
                    {"dropped_triples", rep.dropped_triples},
                    {"overflowing_graphs", rep.failures}});
    } else if (*embed) {
      std::size_t n = embed_ctx.empty() ? 0 : xrdfs::EncodingContext::load(embed_ctx).n();
      auto catalog = xrdfs::GraphWordCatalog::load(layers_path, n);
      xrdfs::EmbeddingConfig cfg;
      cfg.d = dim;
      cfg.beta = beta;
      auto count = xrdfs::write_embeddings(catalog, cfg, emb_out, common.jobs);
      print_report({{"layers", count}, {"n", catalog.n()}, {"d", dim}});
    } else if (*split) {
      auto records = xrdfs::read_records(records_path);
      if (records.empty()) throw xrdfs::Error("no records to split");
      xrdfs::SplitConfig cfg{train_frac, seed};
      auto s = xrdfs::stratified_split(records, cfg);
      fs::create_directories(out_dir);
      std::ofstream(fs::path(out_dir) / "split.json", std::ios::binary)
          << xrdfs::split_to_json(s, records, cfg).dump() << '\n';
      print_report({{"records", records.size()}, {"train", s.train.size()}, {"validation", s.validation.size()}});
    } else if (*emit) {
      if (records_path.empty()) records_path = (fs::path(out_dir) / "records.jsonl").string();
      if (split_path.empty()) split_path = (fs::path(out_dir) / "split.json").string();
      auto ctx = xrdfs::EncodingContext::load(ctx_path);
      auto catalog = xrdfs::GraphWordCatalog::load(catalog_path, ctx.n());
      std::size_t words = 0;
      auto [n, d] = xrdfs::EmbeddingTable::header(emb_path, &words);
      if (n != ctx.n()) throw xrdfs::FormatError("embeddings N differs from the context");
      if (words != catalog.size()) throw xrdfs::FormatError("embeddings do not cover every catalog word");
      auto records = xrdfs::read_records(records_path);
      std::ifstream sin(split_path);
      if (!sin) throw xrdfs::Error("cannot open " + split_path);
      xrdfs::SplitConfig scfg;
      auto s = xrdfs::split_from_json(json::parse(sin), records, &scfg);
      xrdfs::EmitConfig cfg{out_dir,
                            fs::path(ctx_path).filename().string(),
                            fs::path(catalog_path).filename().string(),
                            fs::path(emb_path).filename().string(),
                            d,
                            scfg,
                            0.01};
      xrdfs::EmitReport rep;
      auto manifest = xrdfs::emit_dataset(records, ctx, catalog, s, cfg, &rep);
      for (const auto& f : rep.failures) spdlog::warn("excluded {}", f);
      print_report(manifest["counts"]);
    } else if (*stats) {
      std::ifstream in(records_path);
      if (!in) throw xrdfs::Error("cannot open " + records_path);
      std::optional<json> sidecar;
      if (std::ifstream rin(xrdfs::report_path_for(records_path)); rin) sidecar = json::parse(rin);
      print_report(xrdfs::record_stats(in, sidecar ? &*sidecar : nullptr));
    } else if (*pipeline) {
      xrdfs::PipelineConfig cfg = pcfg;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        cfg = xrdfs::PipelineConfig::from_json(json::parse(in));
      } else {
        cfg.on_overflow = parse_policy(p_overflow);
      }
      if (cfg.abox.empty() || cfg.tbox.empty() || cfg.out_dir.empty())
        throw xrdfs::Error("pipeline needs abox, tbox and out_dir (flags or --config)");
      ordered_json report;
      auto manifest = xrdfs::run_pipeline(cfg, &report);
      report["manifest_counts"] = manifest["counts"];
      print_report(report);
    } else if (*decode) {
      auto ctx = xrdfs::EncodingContext::load(ctx_path);
      auto records = xrdfs::read_records(records_path);
      std::map<std::size_t, const xrdfs::GroundTruthRecord*> by_id;
      for (const auto& r : records) by_id[r.id] = &r;
      std::optional<xrdfs::Ontology> onto;
      if (!decode_tbox.empty()) onto = load_ontology(decode_tbox, false);

      auto audit = [&](std::size_t id, const std::vector<xrdfs::Token>& tokens) {
        auto it = by_id.find(id);
        if (it == by_id.end()) throw xrdfs::Error("unknown record id " + std::to_string(id));
        const auto& rec = *it->second;
        ordered_json out;
        out["id"] = id;
        try {
          auto locals = xrdfs::assign_locals(rec.input.graph, ctx);
          auto triples = xrdfs::decode_tokens(tokens, ctx, locals);
          std::vector<std::string> lines;
          for (const auto& t : triples) lines.push_back(t.str());
          out["triples"] = lines;
          if (onto) {
            auto status = xrdfs::classify_prediction(rec.input.graph, *onto, rec.inferred, triples, rec.justification);
            out["status"] = xrdfs::status_name(status);
          }
        } catch (const xrdfs::Error& e) {
          if (!onto) throw;
          out["triples"] = json::array();
          out["status"] = xrdfs::status_name(xrdfs::PredictionStatus::Invalid);
          out["error"] = e.what();
        }
        return out;
      };

      if (!predictions_path.empty()) {
        std::ifstream in(predictions_path);
        std::ofstream file;
        if (!decode_out.empty()) file.open(decode_out, std::ios::binary);
        std::ostream& sink = decode_out.empty() ? std::cout : file;
        std::map<std::string, std::size_t> summary{{"exact", 0}, {"valid", 0}, {"invalid", 0}};
        std::size_t total = 0;
        xrdfs::for_each_json_line(in, [&](const json& j, std::size_t) {
          auto res = audit(j.at("id").get<std::size_t>(), j.at("tokens").get<std::vector<xrdfs::Token>>());
          if (res.contains("status")) ++summary[res["status"].get<std::string>()];
          ++total;
          sink << res.dump() << '\n';
        });
        if (!decode_out.empty()) {
          ordered_json s;
          s["predictions"] = total;
          for (const auto& [k, v] : summary) s[k] = v;
          print_report(s);
        }
      } else {
        if (tokens_text.empty()) throw xrdfs::Error("decode needs --tokens with --id, or --predictions");
        print_report(audit(record_id, parse_tokens(tokens_text)));
      }
    }
  } catch (const xrdfs::StageError& e) {
    spdlog::error("stage '{}' failed: {}", e.stage, e.what());
    print_report({{"error", e.what()}, {"stage", e.stage}});
    return 1;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
