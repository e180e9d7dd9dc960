#pragma once

#include <stdexcept>
#include <string>

namespace hymem {

// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// -- core -------------------------------------------------------------------

class EmptyTag : public Error {
 public:
  using Error::Error;
};

class InvalidTrajectory : public Error {
 public:
  using Error::Error;
};

// -- encode -----------------------------------------------------------------

class EncoderFailure : public Error {
 public:
  using Error::Error;
};

class JudgeFailure : public Error {
 public:
  using Error::Error;
};

class ZeroVector : public Error {
 public:
  using Error::Error;
};

class EmptyStrategy : public Error {
 public:
  using Error::Error;
};

// -- index ------------------------------------------------------------------

class DimMismatch : public Error {
 public:
  using Error::Error;
};

// -- graph ------------------------------------------------------------------

class DuplicateId : public Error {
 public:
  using Error::Error;
};

class UnknownTarget : public Error {
 public:
  using Error::Error;
};

class EmptyTakeaway : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class SchemaVersionMismatch : public Error {
 public:
  using Error::Error;
};

class CorruptSnapshot : public Error {
 public:
  using Error::Error;
};

// -- evolve / wm ------------------------------------------------------------

// Judge returned something that is not a usable evolution decision. `field`
// names the offending part ("json", "action", "target_id", ...).
class MalformedDecision : public Error {
 public:
  MalformedDecision(std::string field, const std::string& what)
      : Error("malformed decision (" + field + "): " + what), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class MalformedRefresh : public Error {
 public:
  using Error::Error;
};

// -- retrieve / service -----------------------------------------------------

class EmptyStore : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hymem
