#pragma once

// T-Box view of a schema graph: class and property hierarchies with their
// transitive closures, plus domain and range declarations.

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "xrdfs/rdf.hpp"

namespace xrdfs {

using TermSet = std::set<Term>;
using Hierarchy = std::map<Term, TermSet>;

class Ontology {
 public:
  /// Sorted by IRI.
  const std::vector<Term>& classes() const { return classes_; }
  const std::vector<Term>& properties() const { return properties_; }

  bool is_class(const Term& t) const { return std::binary_search(classes_.begin(), classes_.end(), t); }
  bool is_property(const Term& t) const {
    return std::binary_search(properties_.begin(), properties_.end(), t);
  }

  /// Strict superclasses of `c` (transitive, never contains `c` itself).
  const TermSet& superclasses(const Term& c) const { return lookup(super_classes_, c); }
  const TermSet& superproperties(const Term& p) const { return lookup(super_properties_, p); }
  const TermSet& direct_superclasses(const Term& c) const { return lookup(direct_super_classes_, c); }
  const TermSet& direct_superproperties(const Term& p) const { return lookup(direct_super_properties_, p); }
  const TermSet& domains(const Term& p) const { return lookup(domains_, p); }
  const TermSet& ranges(const Term& p) const { return lookup(ranges_, p); }

  /// Every class a subject of `p` is typed with: declared domains of `p` and
  /// of its superproperties, together with all their superclasses.
  const TermSet& domain_closure(const Term& p) const { return lookup(domain_closure_, p); }
  const TermSet& range_closure(const Term& p) const { return lookup(range_closure_, p); }

  /// Membership in the closed T-Box (closed hierarchies plus declared domains/ranges).
  bool closure_contains(const Triple& t) const {
    const auto& p = t.predicate;
    if (p == vocab::sub_class_of()) return superclasses(t.subject).contains(t.object);
    if (p == vocab::sub_property_of()) return superproperties(t.subject).contains(t.object);
    if (p == vocab::domain()) return domains(t.subject).contains(t.object);
    if (p == vocab::range()) return ranges(t.subject).contains(t.object);
    return false;
  }

  bool empty() const { return classes_.empty() && properties_.empty(); }
  bool has_class_cycle() const { return class_cycle_; }
  bool has_property_cycle() const { return property_cycle_; }

  /// CycleWarning and ignored-statement messages collected during extraction.
  const std::vector<std::string>& warnings() const { return warnings_; }

  std::size_t closure_size() const {
    std::size_t n = 0;
    for (const auto& [_, s] : super_classes_) n += s.size();
    for (const auto& [_, s] : super_properties_) n += s.size();
    return n;
  }

 private:
  friend Ontology extract_ontology(const Graph& tbox);

  static const TermSet& lookup(const Hierarchy& h, const Term& key) {
    static const TermSet empty;
    auto it = h.find(key);
    return it == h.end() ? empty : it->second;
  }

  std::vector<Term> classes_;
  std::vector<Term> properties_;
  Hierarchy direct_super_classes_;
  Hierarchy direct_super_properties_;
  Hierarchy super_classes_;
  Hierarchy super_properties_;
  Hierarchy domains_;
  Hierarchy ranges_;
  Hierarchy domain_closure_;
  Hierarchy range_closure_;
  bool class_cycle_ = false;
  bool property_cycle_ = false;
  std::vector<std::string> warnings_;
};

namespace detail {

// Reachability over `direct`, excluding the start node. Sets `cycle` when a
// node reaches itself.
inline Hierarchy transitive_closure(const Hierarchy& direct, bool& cycle) {
  Hierarchy out;
  for (const auto& [start, _] : direct) {
    TermSet seen;
    std::deque<Term> queue{start};
    while (!queue.empty()) {
      Term cur = queue.front();
      queue.pop_front();
      auto it = direct.find(cur);
      if (it == direct.end()) continue;
      for (const auto& next : it->second) {
        if (seen.insert(next).second) queue.push_back(next);
      }
    }
    if (seen.erase(start) > 0) cycle = true;
    if (!seen.empty()) out.emplace(start, std::move(seen));
  }
  return out;
}

inline bool is_class_declaration(const Term& o) {
  return o == vocab::rdfs("Class") || o == vocab::owl("Class");
}

inline bool is_property_declaration(const Term& o) {
  static const std::vector<Term> kinds = {
      vocab::rdf("Property"),           vocab::owl("ObjectProperty"),   vocab::owl("DatatypeProperty"),
      vocab::owl("TransitiveProperty"), vocab::owl("FunctionalProperty"), vocab::owl("SymmetricProperty"),
      vocab::owl("InverseFunctionalProperty")};
  return std::find(kinds.begin(), kinds.end(), o) != kinds.end();
}

// Schema statements are only kept between user-vocabulary IRIs.
inline bool usable_schema_term(const Term& t) {
  if (!t.is_iri()) return false;
  return !t.value().starts_with(vocab::kRdf) && !t.value().starts_with(vocab::kRdfs);
}

}  // namespace detail

inline Ontology extract_ontology(const Graph& tbox) {
  Ontology onto;
  TermSet classes;
  TermSet properties;
  std::size_t ignored = 0;

  for (const auto& t : tbox) {
    const auto& p = t.predicate;
    if (p == vocab::type()) {
      if (!t.subject.is_iri()) continue;
      if (detail::is_class_declaration(t.object)) classes.insert(t.subject);
      else if (detail::is_property_declaration(t.object)) properties.insert(t.subject);
      continue;
    }
    if (!vocab::is_rdfs_schema_property(p)) continue;
    if (!detail::usable_schema_term(t.subject) || !detail::usable_schema_term(t.object)) {
      ++ignored;
      continue;
    }
    if (p == vocab::sub_class_of()) {
      classes.insert(t.subject);
      classes.insert(t.object);
      if (t.subject != t.object) onto.direct_super_classes_[t.subject].insert(t.object);
    } else if (p == vocab::sub_property_of()) {
      properties.insert(t.subject);
      properties.insert(t.object);
      if (t.subject != t.object) onto.direct_super_properties_[t.subject].insert(t.object);
    } else if (p == vocab::domain()) {
      properties.insert(t.subject);
      classes.insert(t.object);
      onto.domains_[t.subject].insert(t.object);
    } else {
      properties.insert(t.subject);
      classes.insert(t.object);
      onto.ranges_[t.subject].insert(t.object);
    }
  }

  if (ignored > 0) {
    onto.warnings_.push_back("ignored " + std::to_string(ignored) +
                             " schema statement(s) over blank nodes, literals or rdf/rdfs vocabulary");
  }
  for (const auto& c : classes) {
    if (properties.contains(c)) onto.warnings_.push_back("term used both as class and property: " + c.str());
  }

  onto.super_classes_ = detail::transitive_closure(onto.direct_super_classes_, onto.class_cycle_);
  onto.super_properties_ = detail::transitive_closure(onto.direct_super_properties_, onto.property_cycle_);
  if (onto.class_cycle_) onto.warnings_.push_back("CycleWarning: rdfs:subClassOf hierarchy has a cycle");
  if (onto.property_cycle_) onto.warnings_.push_back("CycleWarning: rdfs:subPropertyOf hierarchy has a cycle");

  auto close_over = [&](const Hierarchy& declared, Hierarchy& out) {
    for (const auto& p : properties) {
      TermSet reach;
      auto add_from = [&](const Term& prop) {
        for (const auto& c : onto.lookup(declared, prop)) {
          reach.insert(c);
          const auto& sup = onto.superclasses(c);
          reach.insert(sup.begin(), sup.end());
        }
      };
      add_from(p);
      for (const auto& q : onto.superproperties(p)) add_from(q);
      if (!reach.empty()) out.emplace(p, std::move(reach));
    }
  };
  close_over(onto.domains_, onto.domain_closure_);
  close_over(onto.ranges_, onto.range_closure_);

  onto.classes_.assign(classes.begin(), classes.end());
  onto.properties_.assign(properties.begin(), properties.end());
  return onto;
}

}  // namespace xrdfs
