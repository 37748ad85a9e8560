#pragma once

#include <stdexcept>
#include <string>

namespace qvir {

// Reliable window of a truncated value became empty, or a requested
// coefficient lies above the certified cap.
class precision_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class not_invertible : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class divergent_product : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Mode of the wrong parity for the sector or current.
class parity_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operator shapes, gradings or degrees do not fit together.
class shape_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class config_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class cache_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qvir
