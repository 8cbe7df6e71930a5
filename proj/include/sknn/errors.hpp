#pragma once

#include <stdexcept>
#include <string>

namespace sknn {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied a value outside the domain of an operation (CLI exit 3).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An attack ran to completion without a trustworthy answer (CLI exit 4).
class AttackInconclusive : public Error {
 public:
  using Error::Error;
};

class InvalidParams : public DomainError {
 public:
  using DomainError::DomainError;
};

class PlaintextOutOfRange : public DomainError {
 public:
  using DomainError::DomainError;
};

class InvalidCiphertext : public DomainError {
 public:
  using DomainError::DomainError;
};

class SingularMatrix : public DomainError {
 public:
  using DomainError::DomainError;
};

class DimensionMismatch : public DomainError {
 public:
  using DomainError::DomainError;
};

class CoordinateOutOfBound : public DomainError {
 public:
  using DomainError::DomainError;
};

class NormalizerOverflow : public DomainError {
 public:
  using DomainError::DomainError;
};

class KTooLarge : public DomainError {
 public:
  using DomainError::DomainError;
};

class MalformedRow : public DomainError {
 public:
  using DomainError::DomainError;
};

class ResampleExhausted : public Error {
 public:
  using Error::Error;
};

class AmbiguousBeta : public AttackInconclusive {
 public:
  using AttackInconclusive::AttackInconclusive;
};

class NoUniqueCandidate : public AttackInconclusive {
 public:
  NoUniqueCandidate(const std::string& what, std::size_t candidates)
      : AttackInconclusive(what), candidates_(candidates) {}
  std::size_t candidates() const { return candidates_; }

 private:
  std::size_t candidates_;
};

class SingularAfterRetries : public AttackInconclusive {
 public:
  using AttackInconclusive::AttackInconclusive;
};

}  // namespace sknn
