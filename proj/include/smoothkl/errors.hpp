#pragma once

#include <stdexcept>
#include <string>

namespace smoothkl {

// Argument of a logarithm or a division left its valid domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An optimizer or a linear solve could not produce a finite answer.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed experiment configuration or command-line input.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace smoothkl
