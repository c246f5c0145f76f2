#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "xrdfs/pipeline.hpp"

namespace xrdfs {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Lcg64, KnownAnswers) {
  // Values from an independent 64-bit modular evaluation of the recurrence.
  Lcg64 g(0);
  EXPECT_EQ(g.next(), 1442695040888963407ULL);
  EXPECT_EQ(g.next(), 1876011003808476466ULL);
  EXPECT_EQ(g.next(), 11166244414315200793ULL);
}

TEST(Split, KnownAnswer) {
  std::vector<std::string> keys{"a", "a", "a", "a", "a", "b", "b", "b", "c"};
  auto s = stratified_split(keys, SplitConfig{0.6, 42});
  EXPECT_EQ(s.train, (std::vector<std::size_t>{0, 2, 3, 5, 7, 8}));
  EXPECT_EQ(s.validation, (std::vector<std::size_t>{1, 4, 6}));
}

TEST(Split, HundredInOneStratum) {
  std::vector<std::string> keys(100, "k");
  auto s = stratified_split(keys, SplitConfig{0.6, 0});
  EXPECT_EQ(s.train.size(), 60u);
  EXPECT_EQ(s.validation.size(), 40u);
}

TEST(Split, SingletonGoesToTrain) {
  auto s = stratified_split(std::vector<std::string>{"only"}, SplitConfig{0.6, 7});
  EXPECT_EQ(s.train, std::vector<std::size_t>{0});
  EXPECT_TRUE(s.validation.empty());
}

TEST(Split, TrainShareIsCeiling) {
  EXPECT_EQ(train_share(0.6, 5), 3u);
  EXPECT_EQ(train_share(0.6, 4), 3u);
  EXPECT_EQ(train_share(0.6, 10), 6u);
  EXPECT_EQ(train_share(0.5, 3), 2u);
  EXPECT_EQ(train_share(0.6, 0), 0u);
}

TEST(Split, RandomStrataPartitionAndCeil) {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 50; ++round) {
    std::uniform_int_distribution<int> k(0, 9);
    std::vector<std::string> keys(std::uniform_int_distribution<int>(0, 300)(rng));
    for (auto& key : keys) key = "s" + std::to_string(k(rng));
    double f = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
    auto s = stratified_split(keys, SplitConfig{f, static_cast<std::uint64_t>(round)});
    std::vector<int> seen(keys.size(), 0);
    std::map<std::string, std::pair<std::size_t, std::size_t>> per;
    for (auto p : s.train) ++seen[p], ++per[keys[p]].first;
    for (auto p : s.validation) ++seen[p], ++per[keys[p]].second;
    for (int c : seen) EXPECT_EQ(c, 1);
    for (const auto& [key, c] : per) {
      auto n = c.first + c.second;
      EXPECT_EQ(c.first, static_cast<std::size_t>(std::ceil(f * static_cast<double>(n) - 1e-9))) << key;
    }
    EXPECT_TRUE(std::is_sorted(s.train.begin(), s.train.end()));
    EXPECT_TRUE(std::is_sorted(s.validation.begin(), s.validation.end()));
  }
}

TEST(Split, SeedDeterminism) {
  std::vector<std::string> keys;
  for (int i = 0; i < 200; ++i) keys.push_back("s" + std::to_string(i % 7));
  auto a = stratified_split(keys, SplitConfig{0.6, 5});
  auto b = stratified_split(keys, SplitConfig{0.6, 5});
  EXPECT_EQ(a.train, b.train);
  auto c = stratified_split(keys, SplitConfig{0.6, 6});
  EXPECT_NE(a.train, c.train);
  EXPECT_EQ(a.train.size(), c.train.size());
}

TEST(Split, RejectsBadFraction) {
  EXPECT_THROW(stratified_split(std::vector<std::string>{"a"}, SplitConfig{1.0, 0}), Error);
  EXPECT_THROW(stratified_split(std::vector<std::string>{"a"}, SplitConfig{0.0, 0}), Error);
}

struct TinyData {
  Graph abox = load_ntriples(std::string(XRDFS_DATA_DIR) + "/tiny/abox.nt");
  Ontology onto = extract_ontology(load_ntriples(std::string(XRDFS_DATA_DIR) + "/tiny/tbox.nt"));
  std::vector<SubGraph> parts = split_dataset(abox);
  std::vector<GroundTruthRecord> records = build_records(parts, onto);
  EncodingContext ctx = make_context(onto, abox, records, parts, std::nullopt);
};

TEST(Split, JsonRoundTrip) {
  TinyData t;
  SplitConfig cfg{0.6, 3};
  auto s = stratified_split(t.records, cfg);
  auto j = nlohmann::json::parse(split_to_json(s, t.records, cfg).dump());
  SplitConfig back_cfg;
  auto back = split_from_json(j, t.records, &back_cfg);
  EXPECT_EQ(back.train, s.train);
  EXPECT_EQ(back.validation, s.validation);
  EXPECT_EQ(back_cfg.seed, 3u);
}

TEST(Emit, ManifestShapesAndFiles) {
  TinyData t;
  auto catalog = build_catalog(t.records, t.ctx);
  SplitConfig scfg{0.6, 0};
  auto split = stratified_split(t.records, scfg);
  auto dir = fs::path(::testing::TempDir()) / "emit1";
  fs::remove_all(dir);
  EmitConfig cfg{dir.string(), "context.json", "catalog.jsonl", "embeddings.bin", 4, scfg, 0.01};
  auto m = emit_dataset(t.records, t.ctx, catalog, split, cfg);
  EXPECT_EQ(m["format_version"], kDatasetFormatVersion);
  EXPECT_EQ(m["shapes"]["graph_input"][0], t.ctx.op().size());
  EXPECT_EQ(m["shapes"]["graph_input"][1], t.ctx.n() * 4);
  EXPECT_EQ(m["shapes"]["triple_input"][1], t.ctx.vocab_size());
  EXPECT_EQ(m["shapes"]["target"][0], 6);
  EXPECT_EQ(m["counts"]["total"], t.records.size());
  EXPECT_EQ(m["counts"]["excluded"], 0);

  std::size_t lines = 0;
  std::ifstream train(dir / "train.jsonl");
  std::string line;
  while (std::getline(train, line)) {
    auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j["graph_word_ids"].size(), t.ctx.op().size());
    EXPECT_EQ(j["triple_ids"].size(), 3u);
    EXPECT_EQ(j["target_ids"].size(), 6u);
    for (const auto& w : j["graph_word_ids"]) EXPECT_LT(w.get<std::size_t>(), catalog.size());
    for (const auto& tok : j["target_ids"]) EXPECT_LT(tok.get<std::size_t>(), t.ctx.vocab_size());
    ++lines;
  }
  EXPECT_EQ(lines, m["counts"]["train"].get<std::size_t>());
  auto on_disk = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(on_disk, nlohmann::json::parse(m.dump()));
}

TEST(Emit, RerunIsByteIdentical) {
  TinyData t;
  SplitConfig scfg{0.6, 9};
  std::vector<std::string> outputs;
  for (int run = 0; run < 2; ++run) {
    auto catalog = build_catalog(t.records, t.ctx);
    auto dir = fs::path(::testing::TempDir()) / ("emit_run" + std::to_string(run));
    fs::remove_all(dir);
    emit_dataset(t.records, t.ctx, catalog, stratified_split(t.records, scfg),
                 EmitConfig{dir.string(), "c", "k", "e", 4, scfg, 0.01});
    outputs.push_back(slurp(dir / "train.jsonl") + slurp(dir / "validation.jsonl") + slurp(dir / "manifest.json"));
  }
  EXPECT_EQ(outputs[0], outputs[1]);
}

TEST(Emit, AbortsAboveExclusionThreshold) {
  TinyData t;
  // A catalog built from nothing but the zero layer cannot place real graphs.
  GraphWordCatalog empty(t.ctx.n());
  SplitConfig scfg{0.6, 0};
  auto dir = fs::path(::testing::TempDir()) / "emit_abort";
  EmitReport rep;
  EXPECT_THROW(emit_dataset(t.records, t.ctx, empty, stratified_split(t.records, scfg),
                            EmitConfig{dir.string(), "c", "k", "e", 4, scfg, 0.01}, &rep),
               Error);
  EXPECT_GT(rep.excluded, 0u);
}

TEST(Stats, EmptyStream) {
  std::stringstream empty;
  auto s = record_stats(empty);
  EXPECT_EQ(s["records"], 0);
  EXPECT_EQ(s["distinct_inferred"], 0);
  EXPECT_EQ(s["strata_count"], 0);
  EXPECT_TRUE(s["justification_lengths"].empty());
}

TEST(Stats, CountsTinyRecords) {
  TinyData t;
  std::stringstream buf;
  write_records(buf, t.records);
  auto s = record_stats(buf);
  EXPECT_EQ(s["records"], t.records.size());
  std::size_t total = 0;
  for (const auto& [_, n] : s["justification_lengths"].items()) total += n.get<std::size_t>();
  EXPECT_EQ(total, t.records.size());
}

TEST(Pipeline, WritesAllArtifacts) {
  auto dir = fs::path(::testing::TempDir()) / "pipe";
  fs::remove_all(dir);
  PipelineConfig cfg;
  cfg.abox = std::string(XRDFS_DATA_DIR) + "/tiny/abox.nt";
  cfg.tbox = std::string(XRDFS_DATA_DIR) + "/tiny/tbox.nt";
  cfg.out_dir = dir.string();
  auto m = run_pipeline(cfg);
  for (const char* f : {"records.jsonl", "records.jsonl.report.json", "context.json", "catalog.jsonl",
                        "embeddings.bin", "split.json", "train.jsonl", "validation.jsonl", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  std::size_t count = 0;
  auto [n, d] = EmbeddingTable::header((dir / "embeddings.bin").string(), &count);
  EXPECT_EQ(n, m["node_capacity"].get<std::size_t>());
  EXPECT_EQ(d, 4u);
  EXPECT_EQ(count, m["graph_words"].get<std::size_t>());
}

TEST(Pipeline, MissingInputNamesStage) {
  PipelineConfig cfg;
  cfg.abox = "/nonexistent/abox.nt";
  cfg.tbox = "/nonexistent/tbox.nt";
  cfg.out_dir = (fs::path(::testing::TempDir()) / "pipe_missing").string();
  try {
    run_pipeline(cfg);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage, "config");
  }
}

}  // namespace
}  // namespace xrdfs
