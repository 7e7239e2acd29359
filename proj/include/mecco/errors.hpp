#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mecco {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of a cost formula (w <= 0, f <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Identifiers of the feasibility constraints of the joint offloading problem.
// Deadline is only checked when deadline enforcement is switched on.
enum class Constraint { C1, C2, C3, C4, C5, C6, Deadline };

const char* to_string(Constraint c);

class ConstraintError : public Error {
 public:
  ConstraintError(Constraint c, const std::string& what)
      : Error(std::string(to_string(c)) + ": " + what), constraint_(c) {}
  Constraint constraint() const { return constraint_; }

 private:
  Constraint constraint_;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Scenario cannot be simulated with the chosen discretization (e.g. N > L_w).
class AdmissionError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  DecodeError(const std::string& what, std::size_t offset)
      : Error("offset " + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class AuthorizationError : public Error {
 public:
  using Error::Error;
};

// Exhaustive search would exceed its size guard.
class SizeError : public Error {
 public:
  using Error::Error;
};

}  // namespace mecco
