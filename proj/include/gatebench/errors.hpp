#pragma once

#include <stdexcept>
#include <string>

namespace gatebench {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input file or text.
struct ParseError : Error {
  using Error::Error;
};

/// Well-formed input that violates a domain invariant.
struct ValidationError : Error {
  using Error::Error;
};

/// Generation request the pool cannot satisfy.
struct InfeasibleError : Error {
  using Error::Error;
};

/// Records that do not follow the probing protocol (e.g. wrong probe count).
struct ProtocolError : Error {
  using Error::Error;
};

/// Backend misconfiguration detected before any request is issued.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace gatebench
