#pragma once

// RDF data model: terms, triples and insertion-ordered graphs.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "xrdfs/errors.hpp"

namespace xrdfs {

enum class TermKind : unsigned char { Iri, BlankNode, Literal };

class Term {
 public:
  Term() = default;

  static Term iri(std::string value) {
    if (value.empty()) throw InvalidTerm("empty IRI");
    for (char c : value) {
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
        throw InvalidTerm("IRI contains whitespace: " + value);
    }
    return Term(TermKind::Iri, std::move(value), {}, {});
  }

  static Term blank(std::string label) {
    if (!valid_blank_label(label)) throw InvalidTerm("bad blank node label: " + label);
    return Term(TermKind::BlankNode, std::move(label), {}, {});
  }

  static Term literal(std::string lexical, std::optional<std::string> datatype = std::nullopt,
                      std::optional<std::string> lang = std::nullopt) {
    if (datatype && lang) throw InvalidTerm("literal with both datatype and language tag");
    if (datatype && datatype->empty()) throw InvalidTerm("empty datatype IRI");
    if (lang && lang->empty()) throw InvalidTerm("empty language tag");
    return Term(TermKind::Literal, std::move(lexical), datatype.value_or(""), lang.value_or(""));
  }

  static bool valid_blank_label(std::string_view label) {
    if (label.empty()) return false;
    return std::all_of(label.begin(), label.end(), [](char c) {
      return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    });
  }

  TermKind kind() const { return kind_; }
  bool is_iri() const { return kind_ == TermKind::Iri; }
  bool is_blank() const { return kind_ == TermKind::BlankNode; }
  bool is_literal() const { return kind_ == TermKind::Literal; }

  /// IRI string, blank label or literal lexical form.
  const std::string& value() const { return value_; }
  std::optional<std::string> datatype() const {
    return datatype_.empty() ? std::nullopt : std::optional<std::string>(datatype_);
  }
  std::optional<std::string> lang() const {
    return lang_.empty() ? std::nullopt : std::optional<std::string>(lang_);
  }

  /// N-Triples surface form, e.g. `<http://a>`, `_:b0`, `"x"@en`.
  std::string str() const {
    switch (kind_) {
      case TermKind::Iri:
        return "<" + value_ + ">";
      case TermKind::BlankNode:
        return "_:" + value_;
      case TermKind::Literal: {
        std::string out = "\"";
        for (char c : value_) {
          switch (c) {
            case '\\': out += "\\\\"; break;
            case '"': out += "\\\""; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
          }
        }
        out += '"';
        if (!datatype_.empty()) out += "^^<" + datatype_ + ">";
        if (!lang_.empty()) out += "@" + lang_;
        return out;
      }
    }
    return {};
  }

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term& a, const Term& b) = default;

 private:
  Term(TermKind kind, std::string value, std::string datatype, std::string lang)
      : kind_(kind), value_(std::move(value)), datatype_(std::move(datatype)), lang_(std::move(lang)) {}

  TermKind kind_ = TermKind::Iri;
  std::string value_;
  std::string datatype_;
  std::string lang_;
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  Triple() = default;
  Triple(Term s, Term p, Term o) : subject(std::move(s)), predicate(std::move(p)), object(std::move(o)) {
    if (subject.is_literal()) throw InvalidTerm("literal subject: " + subject.str());
    if (!predicate.is_iri()) throw InvalidTerm("predicate must be an IRI: " + predicate.str());
  }

  /// One N-Triples statement without the trailing newline.
  std::string str() const { return subject.str() + " " + predicate.str() + " " + object.str() + " ."; }

  friend bool operator==(const Triple&, const Triple&) = default;
};

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept {
    std::size_t h = std::hash<std::string>{}(t.value());
    h ^= static_cast<std::size_t>(t.kind()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    if (t.is_literal()) {
      h ^= std::hash<std::string>{}(t.datatype().value_or("")) + (h << 6);
      h ^= std::hash<std::string>{}(t.lang().value_or("")) + (h >> 2);
    }
    return h;
  }
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept {
    TermHash th;
    std::size_t h = th(t.subject);
    h = h * 31 + th(t.predicate);
    h = h * 31 + th(t.object);
    return h;
  }
};

/// Orders triples by their N-Triples string form.
struct NTriplesLess {
  bool operator()(const Triple& a, const Triple& b) const { return a.str() < b.str(); }
};

/// Set of triples that remembers insertion order.
class Graph {
 public:
  Graph() = default;
  Graph(std::initializer_list<Triple> triples) {
    for (const auto& t : triples) insert(t);
  }

  /// Returns false when the triple was already present.
  bool insert(const Triple& t) {
    if (!index_.insert(t).second) return false;
    triples_.push_back(t);
    return true;
  }

  bool contains(const Triple& t) const { return index_.contains(t); }
  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }

  const std::vector<Triple>& triples() const { return triples_; }
  auto begin() const { return triples_.begin(); }
  auto end() const { return triples_.end(); }

  /// Set equality, ignoring insertion order.
  bool same_triples(const Graph& other) const {
    if (size() != other.size()) return false;
    return std::all_of(triples_.begin(), triples_.end(), [&](const Triple& t) { return other.contains(t); });
  }

 private:
  std::vector<Triple> triples_;
  std::unordered_set<Triple, TripleHash> index_;
};

namespace vocab {

inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kOwl = "http://www.w3.org/2002/07/owl#";

inline Term rdf(std::string_view local) { return Term::iri(std::string(kRdf) + std::string(local)); }
inline Term rdfs(std::string_view local) { return Term::iri(std::string(kRdfs) + std::string(local)); }
inline Term owl(std::string_view local) { return Term::iri(std::string(kOwl) + std::string(local)); }

inline const Term& type() {
  static const Term t = rdf("type");
  return t;
}
inline const Term& sub_class_of() {
  static const Term t = rdfs("subClassOf");
  return t;
}
inline const Term& sub_property_of() {
  static const Term t = rdfs("subPropertyOf");
  return t;
}
inline const Term& domain() {
  static const Term t = rdfs("domain");
  return t;
}
inline const Term& range() {
  static const Term t = rdfs("range");
  return t;
}

/// The properties the RDFS entailment rules are stated over (besides rdf:type).
inline std::vector<Term> entailment_properties() {
  return {sub_class_of(), sub_property_of(), domain(), range()};
}

inline bool is_rdfs_schema_property(const Term& p) {
  return p == sub_class_of() || p == sub_property_of() || p == domain() || p == range();
}

/// True for IRIs in the rdf:, rdfs: or owl: namespaces.
inline bool is_builtin(const Term& t) {
  if (!t.is_iri()) return false;
  const auto& v = t.value();
  return v.starts_with(kRdf) || v.starts_with(kRdfs) || v.starts_with(kOwl);
}

}  // namespace vocab

}  // namespace xrdfs
