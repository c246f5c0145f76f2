#pragma once

// Stratified train/validation split and emission of the encoded dataset.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "xrdfs/encoding.hpp"
#include "xrdfs/errors.hpp"
#include "xrdfs/ground_truth.hpp"
#include "xrdfs/hope.hpp"
#include "xrdfs/records_io.hpp"

namespace xrdfs {

inline constexpr const char* kDatasetFormatVersion = "xrdfs-dataset/1";

/// Knuth's MMIX linear congruential generator. Pinned so any implementation
/// can reproduce a split from its seed.
class Lcg64 {
 public:
  explicit Lcg64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return state_;
  }
  /// Uniform-ish index in [0, bound) from the high 32 bits.
  std::size_t below(std::size_t bound) { return static_cast<std::size_t>((next() >> 32) % bound); }

 private:
  std::uint64_t state_;
};

struct SplitConfig {
  double train_fraction = 0.60;
  std::uint64_t seed = 0;
};

/// Record positions (not IDs) per side, each in ascending order.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// ceil(fraction * n), robust to products like 0.6 * 5 = 3.0000000000000004.
inline std::size_t train_share(double fraction, std::size_t n) {
  double x = fraction * static_cast<double>(n);
  auto c = static_cast<std::size_t>(std::ceil(x - 1e-9 * std::max(1.0, x)));
  return std::min(n, std::max<std::size_t>(c, n > 0 ? 1 : 0));
}

inline std::string stratum_key(const GroundTruthRecord& r) { return r.strata_a() + "\t" + r.strata_b(); }

/// Groups positions by key, walks strata in key order, Fisher-Yates shuffles
/// each with one shared generator and sends the first ceil(f * n) to train.
inline Split stratified_split(const std::vector<std::string>& keys, const SplitConfig& cfg) {
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) throw Error("train fraction must be in (0, 1)");
  std::map<std::string, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < keys.size(); ++i) strata[keys[i]].push_back(i);

  Lcg64 rng(cfg.seed);
  Split out;
  for (auto& [_, members] : strata) {
    for (std::size_t i = members.size(); i > 1; --i) std::swap(members[i - 1], members[rng.below(i)]);
    std::size_t k = train_share(cfg.train_fraction, members.size());
    out.train.insert(out.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(k));
    out.validation.insert(out.validation.end(), members.begin() + static_cast<std::ptrdiff_t>(k), members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.validation.begin(), out.validation.end());
  return out;
}

inline Split stratified_split(const std::vector<GroundTruthRecord>& records, const SplitConfig& cfg) {
  std::vector<std::string> keys;
  keys.reserve(records.size());
  for (const auto& r : records) keys.push_back(stratum_key(r));
  return stratified_split(keys, cfg);
}

/// split.json: record IDs on each side plus the parameters that produced them.
inline nlohmann::ordered_json split_to_json(const Split& s, const std::vector<GroundTruthRecord>& records,
                                            const SplitConfig& cfg) {
  nlohmann::ordered_json j;
  j["seed"] = cfg.seed;
  j["train_fraction"] = cfg.train_fraction;
  auto ids = [&](const std::vector<std::size_t>& pos) {
    std::vector<std::size_t> out;
    for (auto p : pos) out.push_back(records[p].id);
    return out;
  };
  j["train"] = ids(s.train);
  j["validation"] = ids(s.validation);
  return j;
}

/// Maps split.json back onto positions in `records`.
inline Split split_from_json(const nlohmann::json& j, const std::vector<GroundTruthRecord>& records,
                             SplitConfig* cfg = nullptr) {
  std::map<std::size_t, std::size_t> pos;
  for (std::size_t i = 0; i < records.size(); ++i) pos[records[i].id] = i;
  auto positions = [&](const char* key) {
    std::vector<std::size_t> out;
    for (const auto& id : j.at(key)) {
      auto it = pos.find(id.get<std::size_t>());
      if (it == pos.end()) throw FormatError(std::string("split references unknown record id in ") + key);
      out.push_back(it->second);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  if (cfg) {
    cfg->seed = j.at("seed").get<std::uint64_t>();
    cfg->train_fraction = j.at("train_fraction").get<double>();
  }
  return {positions("train"), positions("validation")};
}

struct EncodedRecord {
  std::size_t id = 0;
  std::string subject;
  std::vector<WordId> graph_word_ids;
  TripleTokens triple_ids{};
  TargetTokens target_ids{};
  std::string strata_a;
  std::string strata_b;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["id"] = id;
    j["subject"] = subject;
    j["graph_word_ids"] = graph_word_ids;
    j["triple_ids"] = triple_ids;
    j["target_ids"] = target_ids;
    j["strata"] = {strata_a, strata_b};
    j["embedding_ref"] = graph_word_ids;
    return j;
  }
};

inline EncodedRecord encode_record(const GroundTruthRecord& r, const EncodingContext& ctx,
                                   GraphWordCatalog& catalog) {
  auto g = encode_graph(r.input.graph, ctx, catalog);
  EncodedRecord out;
  out.id = r.id;
  out.subject = r.input.subject.str();
  out.graph_word_ids = std::move(g.word_ids);
  out.triple_ids = encode_triple(r.inferred, ctx, g.locals);
  out.target_ids = encode_justification(r.justification, ctx, g.locals);
  out.strata_a = r.strata_a();
  out.strata_b = r.strata_b();
  return out;
}

/// Largest local-resource count over `graphs`; the L_max profiling pass.
inline std::size_t profile_local_capacity(const std::vector<SubGraph>& graphs, const EncodingContext& ctx) {
  std::size_t best = 0;
  for (const auto& sg : graphs) best = std::max(best, count_locals(sg.graph, ctx));
  return best;
}

struct CatalogBuildReport {
  std::size_t graphs_encoded = 0;
  std::size_t failures = 0;
  std::size_t dropped_triples = 0;
};

/// Assigns word IDs by first appearance over the records' graphs in record order.
inline GraphWordCatalog build_catalog(const std::vector<GroundTruthRecord>& records, const EncodingContext& ctx,
                                      CatalogBuildReport* report = nullptr) {
  GraphWordCatalog catalog(ctx.n());
  CatalogBuildReport local;
  CatalogBuildReport& rep = report ? *report : local;
  std::set<std::string> done;
  for (const auto& r : records) {
    if (!done.insert(r.input.subject.str()).second) continue;
    try {
      auto g = encode_graph(r.input.graph, ctx, catalog);
      rep.dropped_triples += g.dropped;
      ++rep.graphs_encoded;
    } catch (const LocalOverflow&) {
      ++rep.failures;
    }
  }
  return catalog;
}

struct EmitConfig {
  std::string out_dir;
  /// Names recorded in the manifest.
  std::string context_ref;
  std::string catalog_ref;
  std::string embeddings_ref;
  std::size_t embedding_dim = 4;
  SplitConfig split;
  /// Abort when more than this share of records cannot be encoded.
  double max_exclusion_rate = 0.01;
};

struct EmitReport {
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t excluded = 0;
  std::vector<std::string> failures;
};

/// Writes train.jsonl, validation.jsonl and manifest.json into cfg.out_dir and
/// returns the manifest. `catalog` is frozen first: every layer must already
/// have a word ID.
inline nlohmann::ordered_json emit_dataset(const std::vector<GroundTruthRecord>& records, const EncodingContext& ctx,
                                           GraphWordCatalog& catalog, const Split& split, const EmitConfig& cfg,
                                           EmitReport* report = nullptr) {
  catalog.freeze();
  EmitReport local;
  EmitReport& rep = report ? *report : local;

  struct Side {
    const char* name;
    const std::vector<std::size_t>* positions;
    std::vector<EncodedRecord> encoded;
  };
  std::vector<Side> sides{{"train", &split.train, {}}, {"validation", &split.validation, {}}};
  std::map<std::string, std::pair<std::size_t, std::size_t>> strata;
  for (std::size_t s = 0; s < sides.size(); ++s) {
    for (auto pos : *sides[s].positions) {
      const auto& r = records.at(pos);
      try {
        auto e = encode_record(r, ctx, catalog);
        auto& counts = strata[stratum_key(r)];
        (s == 0 ? counts.first : counts.second) += 1;
        sides[s].encoded.push_back(std::move(e));
      } catch (const Error& e) {
        ++rep.excluded;
        rep.failures.push_back("record " + std::to_string(r.id) + ": " + e.what());
      }
    }
  }
  const std::size_t total = split.train.size() + split.validation.size();
  if (total > 0 && static_cast<double>(rep.excluded) > cfg.max_exclusion_rate * static_cast<double>(total))
    throw Error("excluded " + std::to_string(rep.excluded) + " of " + std::to_string(total) +
                " records, above the exclusion threshold");

  std::filesystem::create_directories(cfg.out_dir);
  for (auto& side : sides) {
    std::ofstream out(std::filesystem::path(cfg.out_dir) / (std::string(side.name) + ".jsonl"), std::ios::binary);
    if (!out) throw Error("cannot write into " + cfg.out_dir);
    for (const auto& e : side.encoded) out << e.to_json().dump() << '\n';
  }
  rep.train = sides[0].encoded.size();
  rep.validation = sides[1].encoded.size();

  nlohmann::ordered_json m;
  m["format_version"] = kDatasetFormatVersion;
  m["context"] = cfg.context_ref;
  m["catalog"] = cfg.catalog_ref;
  m["embeddings"] = cfg.embeddings_ref;
  m["seed"] = cfg.split.seed;
  m["train_fraction"] = cfg.split.train_fraction;
  m["files"] = {{"train", "train.jsonl"}, {"validation", "validation.jsonl"}};
  m["counts"] = {{"total", total}, {"train", rep.train}, {"validation", rep.validation}, {"excluded", rep.excluded}};
  m["shapes"] = {{"graph_input", {ctx.op().size(), ctx.n() * cfg.embedding_dim}},
                 {"triple_input", {3, ctx.vocab_size()}},
                 {"target", {kTargetLength, ctx.vocab_size()}}};
  m["node_capacity"] = ctx.n();
  m["embedding_dim"] = cfg.embedding_dim;
  m["graph_words"] = catalog.size();
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (const auto& [key, counts] : strata) per[key] = {{"train", counts.first}, {"validation", counts.second}};
  m["strata"] = std::move(per);

  std::ofstream out(std::filesystem::path(cfg.out_dir) / "manifest.json", std::ios::binary);
  out << m.dump(2) << '\n';
  return m;
}

/// Dataset statistics over a ground-truth records file; `report` is the
/// optional sidecar written by the ground-truth stage.
inline nlohmann::ordered_json record_stats(std::istream& in, const nlohmann::json* report = nullptr) {
  std::map<std::string, std::size_t> per_stratum;
  std::map<std::size_t, std::size_t> lengths;
  std::set<std::string> distinct;
  std::size_t count = 0;
  for_each_json_line(in, [&](const nlohmann::json& j, std::size_t line_no) {
    try {
      auto r = record_from_json(j);
      ++count;
      ++per_stratum[stratum_key(r)];
      ++lengths[r.justification_length];
      distinct.insert(r.inferred.str());
    } catch (const Error& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
  });
  nlohmann::ordered_json s;
  s["records"] = count;
  s["distinct_inferred"] = distinct.size();
  s["strata_count"] = per_stratum.size();
  nlohmann::ordered_json hist = nlohmann::ordered_json::object();
  for (const auto& [len, n] : lengths) hist[std::to_string(len)] = n;
  s["justification_lengths"] = std::move(hist);
  s["skipped_overflow"] = report ? report->value("skipped_overflow", 0) : 0;
  s["overflow_lengths"] = report ? report->value("overflow_lengths", nlohmann::json::object()) : nlohmann::json::object();
  nlohmann::ordered_json strata = nlohmann::ordered_json::object();
  for (const auto& [k, n] : per_stratum) strata[k] = n;
  s["strata"] = std::move(strata);
  return s;
}

}  // namespace xrdfs
