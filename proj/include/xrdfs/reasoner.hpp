#pragma once

// Forward-chaining RDFS materialization with summarized justifications.
//
// Rules: rdfs2 (domain), rdfs3 (range), rdfs7 (subPropertyOf), rdfs9
// (subClassOf). Transitivity (rdfs5, rdfs11) is absorbed into the closed
// hierarchies of the Ontology, so every conclusion is reached in one step
// from an asserted triple and at most one closure triple:
//
//   rdfs9  (s type B) + (B subClassOf C)      => (s type C)
//   rdfs7  (s p o)    + (p subPropertyOf q)   => (s q o)
//   rdfs2  (s p o)                            => (s type C)  C in domain_closure(p)
//   rdfs3  (x p s)                            => (s type C)  C in range_closure(p), s not a literal
//
// rdfs2/rdfs3 conclusions carry only the A-Box triple: the domain/range
// declaration and any hierarchy chain behind it are summarized away.

#include <algorithm>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "xrdfs/errors.hpp"
#include "xrdfs/ontology.hpp"
#include "xrdfs/rdf.hpp"

namespace xrdfs {

enum class Rule { Domain, Range, SubProperty, SubClass };

inline std::string rule_tag(Rule r) {
  switch (r) {
    case Rule::Domain: return "rdfs2";
    case Rule::Range: return "rdfs3";
    case Rule::SubProperty: return "rdfs7";
    case Rule::SubClass: return "rdfs9";
  }
  return "?";
}

inline Rule rule_from_tag(const std::string& tag) {
  if (tag == "rdfs2") return Rule::Domain;
  if (tag == "rdfs3") return Rule::Range;
  if (tag == "rdfs7") return Rule::SubProperty;
  if (tag == "rdfs9") return Rule::SubClass;
  throw FormatError("unknown rule tag: " + tag);
}

struct Justification {
  std::vector<Triple> abox_support;
  std::vector<Triple> tbox_support;
  Rule rule = Rule::SubClass;

  std::size_t size() const { return abox_support.size() + tbox_support.size(); }

  /// A-Box support followed by T-Box support.
  std::vector<Triple> support() const {
    std::vector<Triple> all = abox_support;
    all.insert(all.end(), tbox_support.begin(), tbox_support.end());
    return all;
  }

  /// Sorted N-Triples lines of the support set; the tie-breaking key.
  std::vector<std::string> key() const {
    std::vector<std::string> k;
    for (const auto& t : support()) k.push_back(t.str());
    std::sort(k.begin(), k.end());
    return k;
  }

  friend bool operator==(const Justification&, const Justification&) = default;
};

/// Canonical preference: fewer support triples, then smaller sorted N-Triples key.
inline bool preferred(const Justification& a, const Justification& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a.key() < b.key();
}

struct InferredTriple {
  Triple triple;
  Justification justification;
};

namespace detail {

// Calls `emit(conclusion, justification)` for every one-step conclusion of an asserted triple.
template <typename Emit>
void for_each_conclusion(const Triple& t, const Ontology& onto, Emit&& emit) {
  const auto& [s, p, o] = t;
  if (p == vocab::type()) {
    for (const auto& c : onto.superclasses(o)) {
      emit(Triple(s, vocab::type(), c),
           Justification{{t}, {Triple(o, vocab::sub_class_of(), c)}, Rule::SubClass});
    }
    return;
  }
  for (const auto& q : onto.superproperties(p)) {
    emit(Triple(s, q, o), Justification{{t}, {Triple(p, vocab::sub_property_of(), q)}, Rule::SubProperty});
  }
  for (const auto& c : onto.domain_closure(p)) {
    emit(Triple(s, vocab::type(), c), Justification{{t}, {}, Rule::Domain});
  }
  if (!o.is_literal()) {
    for (const auto& c : onto.range_closure(p)) {
      emit(Triple(o, vocab::type(), c), Justification{{t}, {}, Rule::Range});
    }
  }
}

using CandidateMap = std::unordered_map<Triple, Justification, TripleHash>;

inline CandidateMap best_conclusions(const Graph& abox, const Ontology& onto) {
  CandidateMap best;
  for (const auto& t : abox) {
    for_each_conclusion(t, onto, [&](Triple&& concl, Justification&& j) {
      if (abox.contains(concl)) return;
      auto it = best.find(concl);
      if (it == best.end()) best.emplace(std::move(concl), std::move(j));
      else if (preferred(j, it->second)) it->second = std::move(j);
    });
  }
  return best;
}

}  // namespace detail

/// All triples entailed by `abox` under `onto` that are not asserted, each
/// with its canonical justification, in N-Triples order.
inline std::vector<InferredTriple> materialize(const Graph& abox, const Ontology& onto) {
  auto best = detail::best_conclusions(abox, onto);
  std::vector<std::pair<std::string, InferredTriple>> keyed;
  keyed.reserve(best.size());
  for (auto& [t, j] : best) keyed.emplace_back(t.str(), InferredTriple{t, std::move(j)});
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<InferredTriple> out;
  out.reserve(keyed.size());
  for (auto& [_, it] : keyed) out.push_back(std::move(it));
  return out;
}

inline Justification justify(const Graph& abox, const Ontology& onto, const Triple& t) {
  if (abox.contains(t)) throw AlreadyAsserted("asserted in the A-Box: " + t.str());
  std::optional<Justification> best;
  for (const auto& a : abox) {
    // Only triples mentioning the conclusion's subject can support it.
    if (a.subject != t.subject && a.object != t.subject) continue;
    detail::for_each_conclusion(a, onto, [&](const Triple& concl, Justification&& j) {
      if (concl == t && (!best || preferred(j, *best))) best = std::move(j);
    });
  }
  if (!best) throw NotDerivable("not derivable: " + t.str());
  return *best;
}

/// Rule under which `support` yields `conclusion` in one step, if any. Checks
/// only the rule shape against the closed T-Box, not A-Box membership.
inline std::optional<Rule> replay(const std::vector<Triple>& abox_support, const std::vector<Triple>& tbox_support,
                                  const Ontology& onto, const Triple& conclusion) {
  if (abox_support.size() != 1) return std::nullopt;
  const Triple& a = abox_support.front();
  for (const auto& t : abox_support) {
    if (vocab::is_rdfs_schema_property(t.predicate)) return std::nullopt;
  }
  if (tbox_support.empty()) {
    if (conclusion.predicate != vocab::type() || a.predicate == vocab::type()) return std::nullopt;
    if (conclusion.subject == a.subject && onto.domain_closure(a.predicate).contains(conclusion.object))
      return Rule::Domain;
    if (conclusion.subject == a.object && !a.object.is_literal() &&
        onto.range_closure(a.predicate).contains(conclusion.object))
      return Rule::Range;
    return std::nullopt;
  }
  if (tbox_support.size() != 1) return std::nullopt;
  const Triple& s = tbox_support.front();
  if (!onto.closure_contains(s)) return std::nullopt;
  if (s.predicate == vocab::sub_class_of() && a.predicate == vocab::type() && a.object == s.subject &&
      conclusion == Triple(a.subject, vocab::type(), s.object))
    return Rule::SubClass;
  if (s.predicate == vocab::sub_property_of() && a.predicate == s.subject &&
      conclusion == Triple(a.subject, s.object, a.object))
    return Rule::SubProperty;
  return std::nullopt;
}

/// True when the justification's rule, applied to its support, yields `conclusion`.
inline bool replays_to(const Justification& j, const Ontology& onto, const Triple& conclusion) {
  auto r = replay(j.abox_support, j.tbox_support, onto, conclusion);
  return r && *r == j.rule;
}

enum class PredictionStatus { ExactMatch, ValidButDifferent, Invalid };

inline std::string status_name(PredictionStatus s) {
  switch (s) {
    case PredictionStatus::ExactMatch: return "exact";
    case PredictionStatus::ValidButDifferent: return "valid";
    case PredictionStatus::Invalid: return "invalid";
  }
  return "?";
}

/// Classifies a predicted support set for `conclusion` against the canonical
/// justification: identical set, a different set that still derives the
/// conclusion from the graph and closed T-Box, or neither.
inline PredictionStatus classify_prediction(const Graph& abox, const Ontology& onto, const Triple& conclusion,
                                            const std::vector<Triple>& predicted, const Justification& canonical) {
  std::vector<std::string> pk;
  for (const auto& t : predicted) pk.push_back(t.str());
  std::sort(pk.begin(), pk.end());
  if (pk == canonical.key()) return PredictionStatus::ExactMatch;

  std::vector<Triple> abox_part;
  std::vector<Triple> tbox_part;
  for (const auto& t : predicted) {
    if (vocab::is_rdfs_schema_property(t.predicate)) tbox_part.push_back(t);
    else if (abox.contains(t)) abox_part.push_back(t);
    else return PredictionStatus::Invalid;
  }
  return replay(abox_part, tbox_part, onto, conclusion) ? PredictionStatus::ValidButDifferent
                                                        : PredictionStatus::Invalid;
}

}  // namespace xrdfs
