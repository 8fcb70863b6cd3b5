#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace latprof {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class ParseErrorKind { malformed_line, malformed_row, missing_header };

/// One rejected input line. Lenient parsers collect these; strict parsers throw
/// the first one as a ParseError.
struct LineError {
    ParseErrorKind kind = ParseErrorKind::malformed_line;
    std::size_t line = 0; // 1-based; 0 when the error is not tied to a line
    std::string reason;
};

std::string describe(const LineError& e);

class ParseError : public Error {
  public:
    explicit ParseError(LineError detail) : Error(describe(detail)), detail_(std::move(detail)) {}
    const LineError& detail() const noexcept { return detail_; }

  private:
    LineError detail_;
};

enum class AnalysisErrorKind {
    no_samples,
    empty_input,
    bad_index_name,
    invalid_argument,
    unknown_node,
    unreachable,
    negative_weight,
    disconnected,
    not_directed,
    not_undirected,
    duplicate_edge,
};

class AnalysisError : public Error {
  public:
    AnalysisError(AnalysisErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
    AnalysisErrorKind kind() const noexcept { return kind_; }

  private:
    AnalysisErrorKind kind_;
};

/// Raised when an acyclic graph was required. Carries one witness cycle,
/// rotated so its smallest node id comes first.
class CycleError : public Error {
  public:
    explicit CycleError(std::vector<std::string> witness);
    const std::vector<std::string>& witness() const noexcept { return witness_; }

  private:
    std::vector<std::string> witness_;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

} // namespace latprof
