#pragma once

#include <stdexcept>

namespace geoleader {

/// Invalid parameters or configuration (CLI exit status 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A tail bound or quadrature tolerance could not be certified (CLI exit status 3).
class CertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace geoleader
