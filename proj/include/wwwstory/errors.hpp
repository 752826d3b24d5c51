#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wwwstory {

// Broad failure classes; the CLI maps these onto exit statuses.
enum class ErrorKind {
  usage,     // caller handed us something malformed
  io,        // filesystem trouble
  data,      // inputs are well-formed but cannot support the computation
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

/// A query whose shape breaks the AST rules (phrase of one term, and of one child...).
class StructuralQueryError : public Error {
 public:
  explicit StructuralQueryError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

class DuplicateDocumentError : public Error {
 public:
  explicit DuplicateDocumentError(const std::string& id)
      : Error(ErrorKind::data, "duplicate document id: " + id), id_(id) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class FormatVersionError : public Error {
 public:
  explicit FormatVersionError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class CorruptFileError : public Error {
 public:
  explicit CorruptFileError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// Malformed corpus or cache content; `line` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(ErrorKind::data, line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class MissingObservationError : public Error {
 public:
  explicit MissingObservationError(std::vector<std::string> queries)
      : Error(ErrorKind::data, build_message(queries)), queries_(std::move(queries)) {}
  const std::vector<std::string>& queries() const noexcept { return queries_; }

 private:
  static std::string build_message(const std::vector<std::string>& queries) {
    std::string msg = "missing observation";
    msg += queries.size() == 1 ? ": " : "s: ";
    for (std::size_t i = 0; i < queries.size(); ++i) {
      if (i) msg += ", ";
      msg += queries[i];
    }
    return msg;
  }

  std::vector<std::string> queries_;
};

enum class MeasureErrorCode {
  undefined_probability,
  inconsistent_counts,
  undefined_bond,
  nw_unavailable,
  undefined_ratio,
  phrase_absent,
};

class MeasureError : public Error {
 public:
  MeasureError(MeasureErrorCode code, const std::string& what) : Error(ErrorKind::data, what), code_(code) {}
  MeasureErrorCode code() const noexcept { return code_; }

 private:
  MeasureErrorCode code_;
};

/// Quantum model inputs that fail their algebraic invariants (non-projector, non-unit state...).
class InvariantViolation : public Error {
 public:
  explicit InvariantViolation(const std::string& what) : Error(ErrorKind::usage, what) {}
};

/// Numerical fitting gave up at a point that is not known to be infeasible.
class FitFailure : public Error {
 public:
  FitFailure(const std::string& what, double best_residual)
      : Error(ErrorKind::data, what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

}  // namespace wwwstory
