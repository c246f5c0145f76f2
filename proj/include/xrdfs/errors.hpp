#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xrdfs {

/// Base of every error the library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SyntaxError : Error {
  SyntaxError(std::size_t line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason), line(line), reason(reason) {}
  std::size_t line;
  std::string reason;
};

struct InvalidTerm : Error {
  using Error::Error;
};

// Reasoner.
struct NotDerivable : Error {
  using Error::Error;
};
struct AlreadyAsserted : Error {
  using Error::Error;
};

// Encoding.
struct EmptyActiveSet : Error {
  using Error::Error;
};
struct LocalOverflow : Error {
  using Error::Error;
};
struct UnknownResource : Error {
  using Error::Error;
};
struct JustificationOverflow : Error {
  using Error::Error;
};
struct MalformedSequence : Error {
  using Error::Error;
};

// Embedding.
struct DivergentBeta : Error {
  using Error::Error;
};

// Files and records.
struct FormatError : Error {
  using Error::Error;
};

}  // namespace xrdfs
