#pragma once

// JSON Lines persistence of ground-truth records and run reports.

#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "xrdfs/errors.hpp"
#include "xrdfs/ground_truth.hpp"
#include "xrdfs/ntriples.hpp"

namespace xrdfs {

namespace detail {

inline std::vector<std::string> lines_of(const std::vector<Triple>& triples) {
  std::vector<std::string> out;
  out.reserve(triples.size());
  for (const auto& t : triples) out.push_back(t.str());
  return out;
}

inline std::vector<Triple> triples_of(const nlohmann::json& arr) {
  std::vector<Triple> out;
  for (const auto& s : arr) out.push_back(parse_triple(s.get<std::string>()));
  return out;
}

inline Term term_of(const std::string& s) {
  // Reuse the statement parser on a dummy triple.
  return parse_triple("<urn:x> <urn:x> " + s).object;
}

}  // namespace detail

inline nlohmann::ordered_json record_to_json(const GroundTruthRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["subject"] = r.input.subject.str();
  j["subject_type"] = r.input.subject_type.str();
  j["graph"] = detail::lines_of(r.input.graph.triples());
  j["inferred"] = r.inferred.str();
  nlohmann::ordered_json just;
  just["rule"] = rule_tag(r.justification.rule);
  just["abox"] = detail::lines_of(r.justification.abox_support);
  just["tbox"] = detail::lines_of(r.justification.tbox_support);
  just["length"] = r.justification_length;
  j["justification"] = std::move(just);
  j["strata"] = {r.strata_a(), r.strata_b()};
  return j;
}

inline GroundTruthRecord record_from_json(const nlohmann::json& j) {
  GroundTruthRecord r;
  r.id = j.at("id").get<std::size_t>();
  r.input.subject = detail::term_of(j.at("subject").get<std::string>());
  r.input.subject_type = detail::term_of(j.at("subject_type").get<std::string>());
  for (const auto& t : detail::triples_of(j.at("graph"))) r.input.graph.insert(t);
  r.inferred = parse_triple(j.at("inferred").get<std::string>());
  const auto& just = j.at("justification");
  r.justification.rule = rule_from_tag(just.at("rule").get<std::string>());
  r.justification.abox_support = detail::triples_of(just.at("abox"));
  r.justification.tbox_support = detail::triples_of(just.at("tbox"));
  r.justification_length = just.value("length", r.justification.size());
  return r;
}

inline void write_records(std::ostream& out, const std::vector<GroundTruthRecord>& records) {
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
}

inline void write_records(const std::string& path, const std::vector<GroundTruthRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  write_records(out, records);
}

/// Calls `fn(json, line_no)` for each non-empty line; wraps parse errors with the line number.
inline void for_each_json_line(std::istream& in, const std::function<void(const nlohmann::json&, std::size_t)>& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      fn(nlohmann::json::parse(line), line_no);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const SyntaxError& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

inline std::vector<GroundTruthRecord> read_records(std::istream& in) {
  std::vector<GroundTruthRecord> out;
  for_each_json_line(in, [&](const nlohmann::json& j, std::size_t) { out.push_back(record_from_json(j)); });
  return out;
}

inline std::vector<GroundTruthRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_records(in);
}

inline nlohmann::ordered_json report_to_json(const GroundTruthReport& r) {
  nlohmann::ordered_json j;
  j["subgraphs"] = r.subgraphs;
  j["records"] = r.records;
  j["skipped_overflow"] = r.skipped_overflow;
  j["truncated_overflow"] = r.truncated_overflow;
  j["untyped_subjects"] = r.untyped_subjects;
  j["subgraphs_without_inferences"] = r.subgraphs_without_inferences;
  j["failed_subgraphs"] = r.failed_subgraphs;
  nlohmann::ordered_json lengths = nlohmann::ordered_json::object();
  for (const auto& [len, n] : r.overflow_lengths) lengths[std::to_string(len)] = n;
  j["overflow_lengths"] = std::move(lengths);
  return j;
}

/// Sidecar report path written next to a records file.
inline std::string report_path_for(const std::string& records_path) { return records_path + ".report.json"; }

}  // namespace xrdfs
