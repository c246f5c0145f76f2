#pragma once

// Line-oriented N-Triples reader and writer.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "xrdfs/errors.hpp"
#include "xrdfs/rdf.hpp"

namespace xrdfs {

struct ParseOptions {
  /// Skip malformed lines instead of throwing.
  bool lenient = false;
};

struct ParseDiagnostics {
  std::size_t lines = 0;
  std::size_t statements = 0;
  std::size_t duplicates = 0;
  std::vector<SyntaxError> skipped;
};

namespace detail {

class LineCursor {
 public:
  LineCursor(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }
  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return done() ? '\0' : text_[pos_]; }

  [[noreturn]] void fail(const std::string& reason) const {
    throw SyntaxError(line_, reason + " at column " + std::to_string(pos_ + 1));
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  Term term() {
    switch (peek()) {
      case '<': return Term::iri(iri());
      case '_': return blank();
      case '"': return literal();
      default: fail("expected term");
    }
  }

  std::string iri() {
    expect('<');
    std::string out;
    while (!done() && peek() != '>') {
      char c = text_[pos_++];
      if (c == '\\') {
        out += unicode_escape();
      } else if (c == ' ' || c == '\t' || c == '<' || c == '"') {
        fail("invalid character in IRI");
      } else {
        out += c;
      }
    }
    expect('>');
    if (out.empty()) fail("empty IRI");
    return out;
  }

 private:
  Term blank() {
    expect('_');
    expect(':');
    std::size_t start = pos_;
    while (!done() && peek() != ' ' && peek() != '\t' && peek() != '.') ++pos_;
    std::string label(text_.substr(start, pos_ - start));
    if (!Term::valid_blank_label(label)) fail("invalid blank node label '" + label + "'");
    return Term::blank(std::move(label));
  }

  Term literal() {
    expect('"');
    std::string lexical;
    for (;;) {
      if (done()) fail("unterminated literal");
      char c = text_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        lexical += c;
        continue;
      }
      if (done()) fail("dangling escape");
      char e = text_[pos_++];
      switch (e) {
        case 't': lexical += '\t'; break;
        case 'b': lexical += '\b'; break;
        case 'n': lexical += '\n'; break;
        case 'r': lexical += '\r'; break;
        case 'f': lexical += '\f'; break;
        case '"': lexical += '"'; break;
        case '\'': lexical += '\''; break;
        case '\\': lexical += '\\'; break;
        case 'u':
        case 'U':
          --pos_;
          lexical += unicode_escape();
          break;
        default: fail(std::string("unknown escape \\") + e);
      }
    }
    if (peek() == '^') {
      ++pos_;
      expect('^');
      return Term::literal(std::move(lexical), iri());
    }
    if (peek() == '@') {
      ++pos_;
      std::size_t start = pos_;
      while (!done() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) ++pos_;
      if (pos_ == start) fail("empty language tag");
      return Term::literal(std::move(lexical), std::nullopt, std::string(text_.substr(start, pos_ - start)));
    }
    return Term::literal(std::move(lexical));
  }

  // Reads `uXXXX` or `UXXXXXXXX` (the backslash already consumed) and returns UTF-8.
  std::string unicode_escape() {
    char kind = peek();
    std::size_t width = kind == 'u' ? 4 : kind == 'U' ? 8 : 0;
    if (width == 0) fail("expected unicode escape");
    ++pos_;
    if (pos_ + width > text_.size()) fail("truncated unicode escape");
    std::uint32_t cp = 0;
    for (std::size_t i = 0; i < width; ++i) {
      char h = text_[pos_++];
      cp <<= 4;
      if (h >= '0' && h <= '9') cp |= static_cast<std::uint32_t>(h - '0');
      else if (h >= 'a' && h <= 'f') cp |= static_cast<std::uint32_t>(h - 'a' + 10);
      else if (h >= 'A' && h <= 'F') cp |= static_cast<std::uint32_t>(h - 'A' + 10);
      else fail("bad hex digit in escape");
    }
    std::string out;
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x110000) {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      fail("code point out of range");
    }
    return out;
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses one statement; returns nullopt for blank and comment lines.
inline std::optional<Triple> parse_ntriples_line(std::string_view line, std::size_t line_no = 1) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  detail::LineCursor cur(line, line_no);
  cur.skip_ws();
  if (cur.done() || cur.peek() == '#') return std::nullopt;

  Term s = cur.term();
  cur.skip_ws();
  if (cur.peek() != '<') cur.fail("predicate must be an IRI");
  Term p = cur.term();
  cur.skip_ws();
  Term o = cur.term();
  cur.skip_ws();
  cur.expect('.');
  cur.skip_ws();
  if (!cur.done() && cur.peek() != '#') cur.fail("trailing characters after '.'");
  if (s.is_literal()) cur.fail("literal in subject position");
  return Triple(std::move(s), std::move(p), std::move(o));
}

inline Graph parse_ntriples(std::istream& in, const ParseOptions& opts = {}, ParseDiagnostics* diag = nullptr) {
  Graph g;
  ParseDiagnostics local;
  ParseDiagnostics& d = diag ? *diag : local;
  std::string line;
  while (std::getline(in, line)) {
    ++d.lines;
    try {
      if (auto t = parse_ntriples_line(line, d.lines)) {
        ++d.statements;
        if (!g.insert(*t)) ++d.duplicates;
      }
    } catch (const SyntaxError& e) {
      if (!opts.lenient) throw;
      d.skipped.push_back(e);
    } catch (const InvalidTerm& e) {
      SyntaxError err(d.lines, e.what());
      if (!opts.lenient) throw err;
      d.skipped.push_back(err);
    }
  }
  return g;
}

inline Graph parse_ntriples(std::string_view text, const ParseOptions& opts = {}, ParseDiagnostics* diag = nullptr) {
  std::istringstream in{std::string(text)};
  return parse_ntriples(in, opts, diag);
}

inline Graph load_ntriples(const std::string& path, const ParseOptions& opts = {}, ParseDiagnostics* diag = nullptr) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return parse_ntriples(in, opts, diag);
}

/// Convenience for tests and the CLI: accepts a statement with or without the final '.'.
inline Triple parse_triple(std::string_view text) {
  std::string s(text);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\n')) s.pop_back();
  if (s.empty() || s.back() != '.') s += " .";
  auto t = parse_ntriples_line(s);
  if (!t) throw SyntaxError(1, "no statement in '" + std::string(text) + "'");
  return *t;
}

struct SerializeOptions {
  /// Sort statements by their string form instead of insertion order.
  bool canonical = false;
};

inline void serialize_ntriples(const Graph& g, std::ostream& out, const SerializeOptions& opts = {}) {
  std::vector<std::string> lines;
  lines.reserve(g.size());
  for (const auto& t : g) lines.push_back(t.str());
  if (opts.canonical) std::sort(lines.begin(), lines.end());
  for (const auto& l : lines) out << l << '\n';
}

inline std::string serialize_ntriples(const Graph& g, const SerializeOptions& opts = {}) {
  std::ostringstream out;
  serialize_ntriples(g, out, opts);
  return out.str();
}

}  // namespace xrdfs
