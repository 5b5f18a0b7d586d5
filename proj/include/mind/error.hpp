#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mind {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad detection config, unknown channel, malformed profile field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Caller-supplied data violates a precondition (unordered samples, point off-screen, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

// A cursor or device state that does not fit the structure it refers to.
class StateError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A profile points at a layout or dictionary file that is not there.
class ReferenceError : public Error {
 public:
  ReferenceError(std::string path, const std::string& what)
      : Error(what + ": " + path), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class ValidationError : public Error {
 public:
  ValidationError(const std::string& context, std::vector<std::string> violations)
      : Error(format(context, violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string format(const std::string& context, const std::vector<std::string>& v) {
    std::string out = context;
    for (const auto& line : v) {
      out += "\n  ";
      out += line;
    }
    return out;
  }
  std::vector<std::string> violations_;
};

class PlanningError : public Error {
 public:
  using Error::Error;
};

}  // namespace mind
