#pragma once

// End-to-end orchestration: parse -> ontology -> sub-graphs -> records ->
// context -> catalog -> embeddings -> split -> emit.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xrdfs/dataset.hpp"
#include "xrdfs/encoding.hpp"
#include "xrdfs/ground_truth.hpp"
#include "xrdfs/hope.hpp"
#include "xrdfs/ntriples.hpp"
#include "xrdfs/ontology.hpp"
#include "xrdfs/parallel.hpp"
#include "xrdfs/records_io.hpp"

namespace xrdfs {

struct PipelineConfig {
  std::string abox;
  std::string tbox;
  std::string out_dir;
  std::optional<std::size_t> l_max;
  std::size_t d = 4;
  std::optional<double> beta;
  double train_fraction = 0.60;
  std::uint64_t seed = 0;
  std::size_t max_justification_triples = 2;
  OverflowPolicy on_overflow = OverflowPolicy::Skip;
  bool lenient = false;
  std::size_t jobs = 1;

  static PipelineConfig from_json(const nlohmann::json& j) {
    PipelineConfig c;
    c.abox = j.value("abox", c.abox);
    c.tbox = j.value("tbox", c.tbox);
    c.out_dir = j.value("out_dir", c.out_dir);
    if (j.contains("l_max") && !j["l_max"].is_null()) c.l_max = j["l_max"].get<std::size_t>();
    c.d = j.value("d", c.d);
    if (j.contains("beta") && !j["beta"].is_null()) c.beta = j["beta"].get<double>();
    c.train_fraction = j.value("train_fraction", c.train_fraction);
    c.seed = j.value("seed", c.seed);
    c.max_justification_triples = j.value("max_just", c.max_justification_triples);
    c.on_overflow = j.value("on_overflow", std::string("skip")) == "truncate" ? OverflowPolicy::Truncate
                                                                              : OverflowPolicy::Skip;
    c.lenient = j.value("lenient", c.lenient);
    c.jobs = j.value("jobs", c.jobs);
    return c;
  }
};

/// A stage failure, naming the stage that raised it.
struct StageError : Error {
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage(std::move(stage)) {}
  std::string stage;
};

/// Active properties are taken over asserted and inferred triples so that
/// superproperty conclusions stay encodable. L_max is profiled over every
/// sub-graph unless given.
inline EncodingContext make_context(const Ontology& onto, const Graph& abox,
                                    const std::vector<GroundTruthRecord>& records,
                                    const std::vector<SubGraph>& subgraphs, std::optional<std::size_t> l_max) {
  Graph source = abox;
  for (const auto& r : records) source.insert(r.inferred);
  EncodingContext probe = build_context(onto, source, 0);
  std::size_t cap = l_max ? *l_max : profile_local_capacity(subgraphs, probe);
  return build_context(onto, source, cap);
}

/// Embeds every catalog word and writes the embeddings file; returns the record count.
inline std::size_t write_embeddings(const GraphWordCatalog& catalog, const EmbeddingConfig& cfg,
                                    const std::string& path, std::size_t jobs = 1) {
  std::vector<Eigen::MatrixXd> out(catalog.size());
  parallel_for(out.size(), jobs, [&](std::size_t i) {
    out[i] = embed_layer(catalog.layer(static_cast<WordId>(i)), cfg).values;
  });
  EmbeddingWriter writer(path, catalog.n(), cfg.d);
  for (const auto& m : out) writer.write(m);
  return writer.records();
}

inline nlohmann::ordered_json run_pipeline(const PipelineConfig& cfg, nlohmann::ordered_json* report = nullptr) {
  namespace fs = std::filesystem;
  nlohmann::ordered_json rep;
  auto stage = [&](const char* name, auto&& fn) {
    try {
      return fn();
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(name, e.what());
    }
  };

  for (const auto& p : {cfg.abox, cfg.tbox}) {
    if (!fs::exists(p)) throw StageError("config", "input does not exist: " + p);
  }
  fs::create_directories(cfg.out_dir);
  const fs::path dir(cfg.out_dir);

  ParseDiagnostics abox_diag;
  ParseDiagnostics tbox_diag;
  ParseOptions popts{cfg.lenient};
  Graph abox = stage("parse", [&] { return load_ntriples(cfg.abox, popts, &abox_diag); });
  Graph tbox = stage("parse", [&] { return load_ntriples(cfg.tbox, popts, &tbox_diag); });
  rep["parse"] = {{"abox_triples", abox.size()},
                  {"tbox_triples", tbox.size()},
                  {"skipped_lines", abox_diag.skipped.size() + tbox_diag.skipped.size()}};

  Ontology onto = stage("ontology", [&] { return extract_ontology(tbox); });
  rep["ontology"] = {{"classes", onto.classes().size()},
                     {"properties", onto.properties().size()},
                     {"warnings", onto.warnings().size()}};

  auto subgraphs = stage("split_dataset", [&] { return split_dataset(abox); });

  GroundTruthReport gt;
  GroundTruthConfig gcfg{cfg.max_justification_triples, cfg.on_overflow, cfg.jobs};
  auto records = stage("ground_truth", [&] { return build_records(subgraphs, onto, gcfg, &gt); });
  const auto records_path = (dir / "records.jsonl").string();
  write_records(records_path, records);
  {
    std::ofstream out(report_path_for(records_path), std::ios::binary);
    out << report_to_json(gt).dump() << '\n';
  }
  rep["ground_truth"] = report_to_json(gt);

  EncodingContext ctx = stage("encode", [&] { return make_context(onto, abox, records, subgraphs, cfg.l_max); });
  ctx.save((dir / "context.json").string());
  CatalogBuildReport cat_rep;
  GraphWordCatalog catalog = stage("encode", [&] { return build_catalog(records, ctx, &cat_rep); });
  catalog.save((dir / "catalog.jsonl").string());
  rep["encode"] = {{"op", ctx.op().size()},
                   {"gr", ctx.gr().size()},
                   {"l_max", ctx.l_max()},
                   {"n", ctx.n()},
                   {"vocab_size", ctx.vocab_size()},
                   {"graph_words", catalog.size()},
                   {"dropped_triples", cat_rep.dropped_triples}};

  EmbeddingConfig ecfg;
  ecfg.d = cfg.d;
  ecfg.beta = cfg.beta;
  std::size_t embedded =
      stage("embed", [&] { return write_embeddings(catalog, ecfg, (dir / "embeddings.bin").string(), cfg.jobs); });
  rep["embed"] = {{"layers", embedded}, {"d", cfg.d}};

  SplitConfig scfg{cfg.train_fraction, cfg.seed};
  Split split = stage("split", [&] { return stratified_split(records, scfg); });
  {
    std::ofstream out(dir / "split.json", std::ios::binary);
    out << split_to_json(split, records, scfg).dump() << '\n';
  }

  EmitConfig emit_cfg{cfg.out_dir, "context.json", "catalog.jsonl", "embeddings.bin", cfg.d, scfg, 0.01};
  EmitReport emit_rep;
  auto manifest = stage("emit", [&] { return emit_dataset(records, ctx, catalog, split, emit_cfg, &emit_rep); });
  rep["emit"] = {{"train", emit_rep.train}, {"validation", emit_rep.validation}, {"excluded", emit_rep.excluded}};
  if (report) *report = std::move(rep);
  return manifest;
}

}  // namespace xrdfs
