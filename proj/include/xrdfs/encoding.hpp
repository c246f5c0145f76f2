#pragma once

// Graph-word encoding of RDF graphs.
//
// A context fixes three ordered dictionaries: OP (active properties plus
// rdf:type), OPpp (OP plus the RDFS schema properties) and GR (global
// resources: ontology classes and properties). Each graph gets a fresh
// LocalTable whose IDs start at |GR|. A graph becomes one N x N adjacency
// layer per OP entry, and each layer is replaced by its word ID in the
// catalog.
//
// Token layout for triple and justification sequences:
//   0                              PAD
//   [1, 1 + |OPpp|)                properties, in OPpp order
//   [1 + |OPpp|, 1 + |OPpp| + N)   resources, by graph ID

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "xrdfs/errors.hpp"
#include "xrdfs/ontology.hpp"
#include "xrdfs/rdf.hpp"
#include "xrdfs/reasoner.hpp"

namespace xrdfs {

using Token = std::uint32_t;
using WordId = std::uint32_t;

inline constexpr Token kPad = 0;
inline constexpr std::size_t kTargetLength = 6;

using TripleTokens = std::array<Token, 3>;
using TargetTokens = std::array<Token, kTargetLength>;

class EncodingContext {
 public:
  EncodingContext() = default;
  EncodingContext(std::vector<Term> op, std::vector<Term> oppp, std::vector<Term> gr, std::size_t l_max)
      : op_(std::move(op)), oppp_(std::move(oppp)), gr_(std::move(gr)), l_max_(l_max) {
    index(op_, op_index_);
    index(oppp_, oppp_index_);
    index(gr_, gr_index_);
    for (const auto& p : op_) {
      if (!oppp_index_.contains(p)) throw FormatError("OPpp must contain every OP property: " + p.str());
    }
  }

  const std::vector<Term>& op() const { return op_; }
  const std::vector<Term>& oppp() const { return oppp_; }
  const std::vector<Term>& gr() const { return gr_; }
  std::size_t l_max() const { return l_max_; }
  /// Node capacity per graph.
  std::size_t n() const { return gr_.size() + l_max_; }
  std::size_t vocab_size() const { return 1 + oppp_.size() + n(); }

  std::optional<std::size_t> op_index(const Term& p) const { return find(op_index_, p); }
  std::optional<std::size_t> oppp_index(const Term& p) const { return find(oppp_index_, p); }
  std::optional<std::size_t> gr_index(const Term& r) const { return find(gr_index_, r); }

  Token property_token(std::size_t oppp_idx) const { return static_cast<Token>(1 + oppp_idx); }
  Token resource_token(std::size_t graph_id) const { return static_cast<Token>(1 + oppp_.size() + graph_id); }
  bool is_property_token(Token t) const { return t >= 1 && t < 1 + oppp_.size(); }
  bool is_resource_token(Token t) const { return t >= 1 + oppp_.size() && t < vocab_size(); }

  /// The context file: {op, oppp, gr, l_max, n, vocab_size}.
  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    auto iris = [](const std::vector<Term>& terms) {
      std::vector<std::string> out;
      for (const auto& t : terms) out.push_back(t.value());
      return out;
    };
    j["op"] = iris(op_);
    j["oppp"] = iris(oppp_);
    j["gr"] = iris(gr_);
    j["l_max"] = l_max_;
    j["n"] = n();
    j["vocab_size"] = vocab_size();
    return j;
  }

  static EncodingContext from_json(const nlohmann::json& j) {
    auto terms = [&](const char* key) {
      std::vector<Term> out;
      for (const auto& s : j.at(key)) out.push_back(Term::iri(s.get<std::string>()));
      return out;
    };
    EncodingContext ctx(terms("op"), terms("oppp"), terms("gr"), j.at("l_max").get<std::size_t>());
    if (j.at("n").get<std::size_t>() != ctx.n() || j.at("vocab_size").get<std::size_t>() != ctx.vocab_size())
      throw FormatError("context file is inconsistent: n or vocab_size does not match the dictionaries");
    return ctx;
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << to_json().dump() << '\n';
  }

  static EncodingContext load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return from_json(nlohmann::json::parse(in));
  }

 private:
  using Index = std::unordered_map<Term, std::size_t, TermHash>;

  static void index(const std::vector<Term>& terms, Index& idx) {
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (!idx.emplace(terms[i], i).second) throw FormatError("duplicate dictionary entry: " + terms[i].str());
    }
  }
  static std::optional<std::size_t> find(const Index& idx, const Term& t) {
    auto it = idx.find(t);
    if (it == idx.end()) return std::nullopt;
    return it->second;
  }

  std::vector<Term> op_;
  std::vector<Term> oppp_;
  std::vector<Term> gr_;
  std::size_t l_max_ = 0;
  Index op_index_;
  Index oppp_index_;
  Index gr_index_;
};

/// Predicates of `abox` that the ontology knows, plus rdf:type, sorted.
inline std::vector<Term> active_properties(const Ontology& onto, const Graph& abox) {
  std::set<Term> used;
  for (const auto& t : abox) used.insert(t.predicate);
  std::set<Term> op;
  for (const auto& p : onto.properties()) {
    if (used.contains(p)) op.insert(p);
  }
  op.insert(vocab::type());
  return {op.begin(), op.end()};
}

/// Throws EmptyActiveSet when no A-Box predicate falls into the active set.
inline EncodingContext build_context(const Ontology& onto, const Graph& abox, std::size_t l_max) {
  auto op = active_properties(onto, abox);
  bool any = std::any_of(abox.begin(), abox.end(), [&](const Triple& t) {
    return std::binary_search(op.begin(), op.end(), t.predicate);
  });
  if (!any) throw EmptyActiveSet("no A-Box predicate is an ontology property or rdf:type");

  std::set<Term> oppp(op.begin(), op.end());
  for (const auto& p : vocab::entailment_properties()) oppp.insert(p);

  // Properties are resources too: they are subjects and objects of
  // subPropertyOf support triples.
  std::set<Term> gr(onto.classes().begin(), onto.classes().end());
  gr.insert(onto.properties().begin(), onto.properties().end());

  return EncodingContext(std::move(op), {oppp.begin(), oppp.end()}, {gr.begin(), gr.end()}, l_max);
}

/// Per-graph IDs for resources outside GR, assigned in first-encounter order from |GR|.
class LocalTable {
 public:
  LocalTable(std::size_t base, std::size_t capacity) : base_(base), capacity_(capacity) {}

  std::size_t assign(const Term& t) {
    if (auto it = ids_.find(t); it != ids_.end()) return it->second;
    if (terms_.size() >= capacity_)
      throw LocalOverflow("more than " + std::to_string(capacity_) + " local resources (at " + t.str() + ")");
    std::size_t id = base_ + terms_.size();
    ids_.emplace(t, id);
    terms_.push_back(t);
    return id;
  }

  std::optional<std::size_t> find(const Term& t) const {
    auto it = ids_.find(t);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  const Term* term(std::size_t id) const {
    if (id < base_ || id >= base_ + terms_.size()) return nullptr;
    return &terms_[id - base_];
  }

  std::size_t base() const { return base_; }
  std::size_t size() const { return terms_.size(); }
  std::size_t capacity() const { return capacity_; }
  /// Lowest and one-past-highest ID this table can hand out.
  std::pair<std::size_t, std::size_t> id_range() const { return {base_, base_ + capacity_}; }

 private:
  std::size_t base_;
  std::size_t capacity_;
  std::unordered_map<Term, std::size_t, TermHash> ids_;
  std::vector<Term> terms_;
};

/// Graph ID of a resource: its GR index or its local ID.
inline std::optional<std::size_t> resource_id(const Term& r, const EncodingContext& ctx, const LocalTable& locals) {
  if (auto g = ctx.gr_index(r)) return g;
  return locals.find(r);
}

/// N x N binary adjacency matrix of one property; row = subject ID, column = object ID.
class LayerMatrix {
 public:
  LayerMatrix() = default;
  LayerMatrix(std::size_t property_index, std::size_t n)
      : property_index_(property_index), n_(n), bits_(n * n, 0) {}

  std::size_t property_index() const { return property_index_; }
  std::size_t n() const { return n_; }
  bool at(std::size_t row, std::size_t col) const { return bits_[row * n_ + col] != 0; }
  void set(std::size_t row, std::size_t col) { bits_[row * n_ + col] = 1; }
  bool is_zero() const { return std::none_of(bits_.begin(), bits_.end(), [](auto b) { return b != 0; }); }
  std::size_t count() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1)); }

  /// Lowercase hex of the row-major bit-packed matrix, MSB first, zero-padded to a whole byte.
  std::string fingerprint() const {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(((bits_.size() + 7) / 8) * 2);
    for (std::size_t byte = 0; byte * 8 < bits_.size(); ++byte) {
      unsigned v = 0;
      for (std::size_t b = 0; b < 8; ++b) {
        std::size_t k = byte * 8 + b;
        v = (v << 1) | (k < bits_.size() && bits_[k] ? 1u : 0u);
      }
      out += kHex[v >> 4];
      out += kHex[v & 0xF];
    }
    return out;
  }

  static std::size_t fingerprint_length(std::size_t n) { return ((n * n + 7) / 8) * 2; }

  static LayerMatrix from_fingerprint(const std::string& hex, std::size_t n) {
    if (hex.size() != fingerprint_length(n))
      throw FormatError("fingerprint length " + std::to_string(hex.size()) + " does not match N=" + std::to_string(n));
    LayerMatrix m(0, n);
    for (std::size_t k = 0; k < n * n; ++k) {
      char c = hex[k / 4];
      unsigned nibble;
      if (c >= '0' && c <= '9') nibble = static_cast<unsigned>(c - '0');
      else if (c >= 'a' && c <= 'f') nibble = static_cast<unsigned>(c - 'a' + 10);
      else throw FormatError("bad fingerprint character");
      if ((nibble >> (3 - k % 4)) & 1u) m.bits_[k] = 1;
    }
    return m;
  }

  friend bool operator==(const LayerMatrix& a, const LayerMatrix& b) { return a.n_ == b.n_ && a.bits_ == b.bits_; }

 private:
  std::size_t property_index_ = 0;
  std::size_t n_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Layer layout -> word ID. ID 0 is the all-zero layer. Append-only; inserts
/// are serialized, so one catalog can be shared by concurrent encoders.
class GraphWordCatalog {
 public:
  explicit GraphWordCatalog(std::size_t n) : n_(n), mutex_(std::make_unique<std::mutex>()) {
    insert_unlocked(LayerMatrix(0, n).fingerprint());
  }

  std::size_t n() const { return n_; }
  std::size_t size() const {
    std::lock_guard lock(*mutex_);
    return by_id_.size();
  }

  /// A frozen catalog rejects unseen layouts instead of adding them.
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  WordId intern(const std::string& fingerprint) {
    std::lock_guard lock(*mutex_);
    if (auto it = ids_.find(fingerprint); it != ids_.end()) return it->second;
    if (frozen_) throw UnknownResource("layer layout not in the catalog");
    return insert_unlocked(fingerprint);
  }

  std::optional<WordId> find(const std::string& fingerprint) const {
    std::lock_guard lock(*mutex_);
    auto it = ids_.find(fingerprint);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  std::string fingerprint(WordId id) const {
    std::lock_guard lock(*mutex_);
    return by_id_.at(id);
  }

  LayerMatrix layer(WordId id) const { return LayerMatrix::from_fingerprint(fingerprint(id), n_); }

  /// JSON Lines, one {id, fingerprint} per word in ID order.
  void save(std::ostream& out) const {
    std::lock_guard lock(*mutex_);
    for (std::size_t i = 0; i < by_id_.size(); ++i) {
      nlohmann::ordered_json j;
      j["id"] = i;
      j["fingerprint"] = by_id_[i];
      out << j.dump() << '\n';
    }
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    save(out);
  }

  /// `n` = 0 infers the node capacity from the fingerprint length when unambiguous.
  static GraphWordCatalog load(std::istream& in, std::size_t n = 0) {
    std::vector<std::string> fps;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw FormatError("catalog line " + std::to_string(line_no) + ": " + e.what());
      }
      if (j.at("id").get<std::size_t>() != fps.size())
        throw FormatError("catalog line " + std::to_string(line_no) + ": IDs must be contiguous from 0");
      fps.push_back(j.at("fingerprint").get<std::string>());
    }
    if (fps.empty()) throw FormatError("empty catalog");
    if (n == 0) n = infer_n(fps.front().size());
    GraphWordCatalog cat(n);
    if (fps.front() != cat.by_id_.front()) throw FormatError("catalog word 0 is not the all-zero layer");
    for (std::size_t i = 1; i < fps.size(); ++i) {
      if (fps[i].size() != LayerMatrix::fingerprint_length(n)) throw FormatError("inconsistent fingerprint length");
      if (cat.ids_.contains(fps[i])) throw FormatError("duplicate layout in catalog");
      cat.insert_unlocked(fps[i]);
    }
    return cat;
  }

  static GraphWordCatalog load(const std::string& path, std::size_t n = 0) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return load(in, n);
  }

  static std::size_t infer_n(std::size_t hex_length) {
    std::vector<std::size_t> candidates;
    for (std::size_t n = 1; LayerMatrix::fingerprint_length(n) <= hex_length; ++n) {
      if (LayerMatrix::fingerprint_length(n) == hex_length) candidates.push_back(n);
    }
    if (candidates.size() != 1)
      throw FormatError("cannot infer node capacity from a fingerprint of " + std::to_string(hex_length) +
                        " hex digits; pass it explicitly");
    return candidates.front();
  }

 private:
  WordId insert_unlocked(const std::string& fp) {
    auto id = static_cast<WordId>(by_id_.size());
    ids_.emplace(fp, id);
    by_id_.push_back(fp);
    return id;
  }

  std::size_t n_;
  bool frozen_ = false;
  std::unique_ptr<std::mutex> mutex_;
  std::unordered_map<std::string, WordId> ids_;
  std::vector<std::string> by_id_;
};

struct EncodedGraph {
  std::vector<WordId> word_ids;
  std::vector<LayerMatrix> layers;
  LocalTable locals;
  /// Triples skipped because their predicate is not in OP.
  std::size_t dropped = 0;
};

/// Distinct non-GR resources in the triples of `g` that would be encoded.
inline std::size_t count_locals(const Graph& g, const EncodingContext& ctx) {
  std::unordered_set<Term, TermHash> seen;
  for (const auto& t : g) {
    if (!ctx.op_index(t.predicate)) continue;
    if (!ctx.gr_index(t.subject)) seen.insert(t.subject);
    if (!ctx.gr_index(t.object)) seen.insert(t.object);
  }
  return seen.size();
}

/// Builds the LocalTable for `g`: triples in graph order, subject before object.
inline LocalTable assign_locals(const Graph& g, const EncodingContext& ctx) {
  LocalTable locals(ctx.gr().size(), ctx.l_max());
  for (const auto& t : g) {
    if (!ctx.op_index(t.predicate)) continue;
    for (const Term* r : {&t.subject, &t.object}) {
      if (!ctx.gr_index(*r)) locals.assign(*r);
    }
  }
  return locals;
}

inline EncodedGraph encode_graph(const Graph& g, const EncodingContext& ctx, GraphWordCatalog& catalog) {
  if (catalog.n() != ctx.n()) throw FormatError("catalog node capacity differs from the context");
  EncodedGraph out{{}, {}, assign_locals(g, ctx), 0};
  out.layers.reserve(ctx.op().size());
  for (std::size_t i = 0; i < ctx.op().size(); ++i) out.layers.emplace_back(i, ctx.n());
  for (const auto& t : g) {
    auto layer = ctx.op_index(t.predicate);
    if (!layer) {
      ++out.dropped;
      continue;
    }
    out.layers[*layer].set(*resource_id(t.subject, ctx, out.locals), *resource_id(t.object, ctx, out.locals));
  }
  out.word_ids.reserve(out.layers.size());
  for (const auto& layer : out.layers) out.word_ids.push_back(catalog.intern(layer.fingerprint()));
  return out;
}

inline TripleTokens encode_triple(const Triple& t, const EncodingContext& ctx, const LocalTable& locals) {
  auto resource = [&](const Term& r) {
    auto id = resource_id(r, ctx, locals);
    if (!id) throw UnknownResource("resource has no ID in this graph: " + r.str());
    return ctx.resource_token(*id);
  };
  auto prop = ctx.oppp_index(t.predicate);
  if (!prop) throw UnknownResource("property not in OPpp: " + t.predicate.str());
  return {resource(t.subject), ctx.property_token(*prop), resource(t.object)};
}

/// Support triples ordered by predicate token, three tokens each, PAD-filled to six.
inline TargetTokens encode_justification(const Justification& j, const EncodingContext& ctx,
                                         const LocalTable& locals) {
  if (j.size() > kTargetLength / 3)
    throw JustificationOverflow("justification has " + std::to_string(j.size()) + " triples; at most 2 fit");
  std::vector<TripleTokens> parts;
  for (const auto& t : j.support()) parts.push_back(encode_triple(t, ctx, locals));
  std::sort(parts.begin(), parts.end(), [](const TripleTokens& a, const TripleTokens& b) {
    if (a[1] != b[1]) return a[1] < b[1];
    return a < b;
  });
  TargetTokens out{};
  std::size_t k = 0;
  for (const auto& p : parts) {
    for (Token tok : p) out[k++] = tok;
  }
  return out;
}

/// Inverse of encode_triple / encode_justification.
inline std::vector<Triple> decode_tokens(std::span<const Token> tokens, const EncodingContext& ctx,
                                         const LocalTable& locals) {
  std::size_t len = tokens.size();
  while (len > 0 && tokens[len - 1] == kPad) --len;
  if (len % 3 != 0) throw MalformedSequence("token count " + std::to_string(len) + " is not a multiple of 3");

  auto resource = [&](Token tok, std::size_t pos) -> Term {
    if (tok == kPad) throw MalformedSequence("PAD inside the sequence at position " + std::to_string(pos));
    if (!ctx.is_resource_token(tok))
      throw MalformedSequence("expected a resource token at position " + std::to_string(pos));
    std::size_t id = tok - ctx.resource_token(0);
    if (id < ctx.gr().size()) return ctx.gr()[id];
    if (const Term* t = locals.term(id)) return *t;
    throw MalformedSequence("local ID " + std::to_string(id) + " is unassigned in this graph");
  };
  auto property = [&](Token tok, std::size_t pos) -> Term {
    if (tok == kPad) throw MalformedSequence("PAD inside the sequence at position " + std::to_string(pos));
    if (!ctx.is_property_token(tok))
      throw MalformedSequence("expected a property token at position " + std::to_string(pos));
    return ctx.oppp()[tok - 1];
  };

  std::vector<Triple> out;
  for (std::size_t i = 0; i < len; i += 3) {
    Term s = resource(tokens[i], i);
    Term p = property(tokens[i + 1], i + 1);
    Term o = resource(tokens[i + 2], i + 2);
    if (s.is_literal()) throw MalformedSequence("literal in subject position at " + std::to_string(i));
    out.emplace_back(std::move(s), std::move(p), std::move(o));
  }
  return out;
}

}  // namespace xrdfs
