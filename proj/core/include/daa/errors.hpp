#pragma once

#include <stdexcept>
#include <string>

namespace daa {

// Input outside the mathematical domain of an operation (non-finite score,
// probability on the boundary, positive log-probability, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Invalid or inconsistent configuration (bad hyperparameter, wrong
// normalization flag, empty split, unknown config key).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unknown prompt/response id.
class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A statistic that is undefined for the given data, e.g. ICC with zero
// total variance.
class UndefinedStatistic : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace daa
