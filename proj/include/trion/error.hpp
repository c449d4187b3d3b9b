#pragma once

#include <stdexcept>
#include <string>

namespace trion {

// Precondition or argument-range violation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An algorithm produced (or would produce) a result outside its numerical
// contract: non-finite values, lost unitarity, non-convergence.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace trion
