#pragma once

// Ground truthing: split an A-Box into per-subject descriptions and pair every
// inference of every description with its canonical justification.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "xrdfs/ontology.hpp"
#include "xrdfs/parallel.hpp"
#include "xrdfs/rdf.hpp"
#include "xrdfs/reasoner.hpp"

namespace xrdfs {

/// Stratum marker for subjects without an rdf:type assertion.
inline const Term& untyped_marker() {
  static const Term t = Term::iri("urn:xrdfs:UNTYPED");
  return t;
}

struct SubGraph {
  Term subject;
  Graph graph;
  Term subject_type;
};

struct GroundTruthRecord {
  std::size_t id = 0;
  SubGraph input;
  Triple inferred;
  Justification justification;
  /// Length before any truncation.
  std::size_t justification_length = 0;

  std::string strata_a() const { return input.subject_type.str(); }
  std::string strata_b() const { return inferred.predicate.str() + " " + inferred.object.str(); }
};

enum class OverflowPolicy { Skip, Truncate };

struct GroundTruthConfig {
  std::size_t max_justification_triples = 2;
  OverflowPolicy on_overflow = OverflowPolicy::Skip;
  std::size_t jobs = 1;
};

struct GroundTruthReport {
  std::size_t subgraphs = 0;
  std::size_t records = 0;
  std::size_t skipped_overflow = 0;
  std::size_t truncated_overflow = 0;
  std::size_t untyped_subjects = 0;
  std::size_t subgraphs_without_inferences = 0;
  std::size_t failed_subgraphs = 0;
  /// Original justification length -> count, over skipped or truncated pairs.
  std::map<std::size_t, std::size_t> overflow_lengths;
  std::vector<std::string> failures;
};

/// One sub-graph per distinct subject (subject-star description), ordered by
/// the subject's N-Triples form. Triples keep their dataset order.
inline std::vector<SubGraph> split_dataset(const Graph& dataset) {
  std::unordered_map<Term, std::size_t, TermHash> slot;
  std::vector<SubGraph> groups;
  for (const auto& t : dataset) {
    auto [it, fresh] = slot.try_emplace(t.subject, groups.size());
    if (fresh) groups.push_back(SubGraph{t.subject, {}, untyped_marker()});
    groups[it->second].graph.insert(t);
  }
  for (auto& g : groups) {
    std::string best;
    for (const auto& t : g.graph) {
      if (t.predicate != vocab::type()) continue;
      auto s = t.object.str();
      if (best.empty() || s < best) {
        best = s;
        g.subject_type = t.object;
      }
    }
  }
  std::vector<std::pair<std::string, std::size_t>> order;
  order.reserve(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) order.emplace_back(groups[i].subject.str(), i);
  std::sort(order.begin(), order.end());
  std::vector<SubGraph> out;
  out.reserve(groups.size());
  for (const auto& [_, i] : order) out.push_back(std::move(groups[i]));
  return out;
}

/// Applies the overflow policy; returns false when the pair must be dropped.
inline bool fit_justification(Justification& j, const GroundTruthConfig& cfg) {
  if (j.size() <= cfg.max_justification_triples) return true;
  if (cfg.on_overflow == OverflowPolicy::Skip) return false;
  std::size_t keep = std::max<std::size_t>(1, cfg.max_justification_triples);
  if (j.abox_support.size() >= keep) {
    j.abox_support.resize(keep);
    j.tbox_support.clear();
  } else {
    j.tbox_support.resize(keep - j.abox_support.size());
  }
  return true;
}

inline std::vector<GroundTruthRecord> build_records(const std::vector<SubGraph>& subgraphs, const Ontology& onto,
                                                    const GroundTruthConfig& cfg = {},
                                                    GroundTruthReport* report = nullptr) {
  struct Slot {
    std::vector<GroundTruthRecord> records;
    std::size_t skipped = 0;
    std::size_t truncated = 0;
    std::map<std::size_t, std::size_t> overflow_lengths;
    std::string failure;
  };
  std::vector<Slot> slots(subgraphs.size());

  parallel_for(subgraphs.size(), cfg.jobs, [&](std::size_t i) {
    Slot& slot = slots[i];
    const SubGraph& sg = subgraphs[i];
    try {
      for (auto& inf : materialize(sg.graph, onto)) {
        std::size_t len = inf.justification.size();
        bool over = len > cfg.max_justification_triples;
        if (over) ++slot.overflow_lengths[len];
        if (!fit_justification(inf.justification, cfg)) {
          ++slot.skipped;
          continue;
        }
        if (over) ++slot.truncated;
        slot.records.push_back(GroundTruthRecord{0, sg, std::move(inf.triple), std::move(inf.justification), len});
      }
    } catch (const std::exception& e) {
      slot.records.clear();
      slot.failure = sg.subject.str() + ": " + e.what();
    }
  });

  GroundTruthReport local;
  GroundTruthReport& rep = report ? *report : local;
  rep.subgraphs += subgraphs.size();
  std::vector<GroundTruthRecord> out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    auto& slot = slots[i];
    if (subgraphs[i].subject_type == untyped_marker()) ++rep.untyped_subjects;
    if (!slot.failure.empty()) {
      ++rep.failed_subgraphs;
      rep.failures.push_back(slot.failure);
      continue;
    }
    if (slot.records.empty() && slot.skipped == 0) ++rep.subgraphs_without_inferences;
    rep.skipped_overflow += slot.skipped;
    rep.truncated_overflow += slot.truncated;
    for (const auto& [len, n] : slot.overflow_lengths) rep.overflow_lengths[len] += n;
    for (auto& r : slot.records) {
      r.id = out.size();
      out.push_back(std::move(r));
    }
  }
  rep.records += out.size();
  return out;
}

}  // namespace xrdfs
