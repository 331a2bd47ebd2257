// Exception types shared by all xqa modules.

#ifndef XQA_ERRORS_H_
#define XQA_ERRORS_H_

#include <stdexcept>
#include <string>

namespace xqa {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input errors (corpus, predictions, CSV); the CLI maps these to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  using InputError::InputError;
};

// Missing or mistyped field. The message names the record and field.
class SchemaError : public InputError {
 public:
  using InputError::InputError;
};

// A gold supporting fact that does not resolve inside its context.
class DanglingFact : public InputError {
 public:
  DanglingFact(std::string record_id, const std::string &what)
      : InputError(what), record_id_(std::move(record_id)) {}
  const std::string &record_id() const { return record_id_; }

 private:
  std::string record_id_;
};

class UnknownFact : public Error {
 public:
  using Error::Error;
};

class EmptyCorpus : public InputError {
 public:
  using InputError::InputError;
};

class MismatchedPrediction : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public DomainError {
 public:
  using DomainError::DomainError;
};

class NotNormalized : public DomainError {
 public:
  using DomainError::DomainError;
};

class NoGoldFacts : public DomainError {
 public:
  using DomainError::DomainError;
};

class KeyMismatch : public InputError {
 public:
  using InputError::InputError;
};

class ConstantInput : public DomainError {
 public:
  using DomainError::DomainError;
};

class LengthMismatch : public DomainError {
 public:
  using DomainError::DomainError;
};

// Failure talking to a model. The CLI maps these to exit code 3.
class AdapterError : public Error {
 public:
  enum class Kind { kTimeout, kTransport, kProtocol };

  AdapterError(Kind kind, const std::string &what,
               std::string instance_id = {})
      : Error(what), kind_(kind), instance_id_(std::move(instance_id)) {}

  Kind kind() const { return kind_; }
  const std::string &instance_id() const { return instance_id_; }

  // Copy of this error tagged with the instance that triggered it.
  AdapterError with_instance(const std::string &id) const {
    return AdapterError(kind_, std::string(what()) + " [instance " + id + "]",
                        id);
  }

 private:
  Kind kind_;
  std::string instance_id_;
};

inline const char *to_string(AdapterError::Kind kind) {
  switch (kind) {
    case AdapterError::Kind::kTimeout: return "Timeout";
    case AdapterError::Kind::kTransport: return "TransportError";
    case AdapterError::Kind::kProtocol: return "ProtocolError";
  }
  return "?";
}

}  // namespace xqa

#endif  // XQA_ERRORS_H_
