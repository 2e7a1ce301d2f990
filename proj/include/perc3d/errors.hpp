#pragma once

#include <stdexcept>
#include <string>

namespace perc3d {

// Root of every error raised by the library. The CLI maps these to exit
// code 1, except CertificationFailure which maps to 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// A caller broke a documented precondition (mismatched sample/geometry,
// inconsistent run metadata, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Test-only oracles refuse instances that are too large to brute force.
class OracleRefusal : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class CertificationFailure : public Error {
 public:
  using Error::Error;
};

class InfeasiblePlan : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class IncompleteRun : public Error {
 public:
  using Error::Error;
};

class TamperError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Refusal to reuse a seed range reserved by a final run.
class SeedReuseError : public Error {
 public:
  using Error::Error;
};

}  // namespace perc3d
