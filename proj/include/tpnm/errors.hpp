#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tpnm {

/// Exit-code families used by the CLI: 0 ok, 2 parse, 3 numeric, 4 usage, 5 domain.
enum class ErrorFamily : int {
  Parse = 2,
  Numeric = 3,
  Usage = 4,
  Domain = 5,
};

/// Base of all tpnm exceptions; carries the exit-code family.
class Error : public std::runtime_error {
 public:
  Error(ErrorFamily family, const std::string& what)
      : std::runtime_error(what), family_(family) {}

  ErrorFamily family() const noexcept { return family_; }
  int exit_code() const noexcept { return static_cast<int>(family_); }

 private:
  ErrorFamily family_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(ErrorFamily::Parse,
              line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorFamily::Usage, what) {}
};

class DuplicateTimestamp : public ParseError {
 public:
  DuplicateTimestamp(const std::string& instance_id, std::int64_t t)
      : ParseError("duplicate timestamp " + std::to_string(t) + " in instance " +
                   instance_id) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorFamily::Numeric, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorFamily::Domain, what) {}
};

// Sequence validation failures.

class NonMonotonicTimestamps : public DomainError {
 public:
  NonMonotonicTimestamps(std::size_t index, std::int64_t t_prev, std::int64_t t_cur)
      : DomainError("non-monotonic timestamps at index " + std::to_string(index) +
                    ": " + std::to_string(t_prev) + " followed by " +
                    std::to_string(t_cur)),
        index_(index) {}

  /// Index of the first offending event.
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class EmptySequence : public DomainError {
 public:
  EmptySequence() : DomainError("event sequence is empty") {}
};

class UnknownNode : public DomainError {
 public:
  explicit UnknownNode(std::uint32_t id)
      : DomainError("unknown node id " + std::to_string(id)) {}
};

class DimensionMismatch : public DomainError {
 public:
  explicit DimensionMismatch(const std::string& what) : DomainError(what) {}
};

class SchemeMismatch : public DomainError {
 public:
  explicit SchemeMismatch(const std::string& what) : DomainError(what) {}
};

class InvalidBeta : public DomainError {
 public:
  explicit InvalidBeta(double beta)
      : DomainError("beta must lie in [0,1), got " + std::to_string(beta)) {}
};

class IndexOutOfRange : public DomainError {
 public:
  IndexOutOfRange(std::size_t index, std::size_t size)
      : DomainError("event index " + std::to_string(index) +
                    " out of range for sequence of length " + std::to_string(size)) {}
};

class EmptyInfluence : public DomainError {
 public:
  EmptyInfluence() : DomainError("influence vector is empty") {}
};

class LengthMismatch : public DomainError {
 public:
  LengthMismatch(std::size_t a, std::size_t b)
      : DomainError("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class EmptyInput : public DomainError {
 public:
  explicit EmptyInput(const std::string& what) : DomainError(what) {}
};

class TooFewInstances : public DomainError {
 public:
  explicit TooFewInstances(const std::string& what) : DomainError(what) {}
};

class InstanceTooShort : public DomainError {
 public:
  explicit InstanceTooShort(const std::string& instance_id)
      : DomainError("instance " + instance_id + " has fewer than 2 events") {}
};

class NoAbsorbingState : public DomainError {
 public:
  NoAbsorbingState()
      : DomainError("transition table has no reachable absorbing node and no "
                    "max_events cap") {}
};

class NonFinite : public NumericError {
 public:
  explicit NonFinite(const std::string& what) : NumericError(what) {}
};

}  // namespace tpnm
