// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace dirifs {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A configuration field is missing or malformed; path() names it, e.g. ".ifs.f.rate".
class ConfigError : public InvalidArgument {
 public:
  ConfigError(std::string path, const std::string& what) : InvalidArgument(what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class InvalidPrime : public Error {
 public:
  using Error::Error;
};

class SearchExhausted : public Error {
 public:
  using Error::Error;
};

/// A schedule increment eta_{j,k} was not positive.
class ScheduleInfeasible : public Error {
 public:
  ScheduleInfeasible(int j, int k, const std::string& what)
      : Error(what), j_(j), k_(k) {}
  int j() const { return j_; }
  int k() const { return k_; }

 private:
  int j_;
  int k_;
};

/// eta_{j,k} < N, so the trailing block of t_{j,k} is undefined.
class WordInfeasible : public Error {
 public:
  WordInfeasible(int j, int k, const std::string& what)
      : Error(what), j_(j), k_(k) {}
  int j() const { return j_; }
  int k() const { return k_; }

 private:
  int j_;
  int k_;
};

/// An unconditional divisibility statement failed. Always an implementation bug.
class LemmaViolation : public Error {
 public:
  using Error::Error;
};

class NeedMoreDepth : public Error {
 public:
  NeedMoreDepth(int required_k, const std::string& what)
      : Error(what), required_k_(required_k) {}
  int required_k() const { return required_k_; }

 private:
  int required_k_;
};

/// Enclosures too wide for the requested multiplier.
class TooWide : public Error {
 public:
  TooWide(std::uint64_t q, const std::string& what) : Error(what), q_(q) {}
  std::uint64_t q() const { return q_; }

 private:
  std::uint64_t q_;
};

class BudgetExceeded : public Error {
 public:
  BudgetExceeded(std::uint64_t verified_prefix, const std::string& what)
      : Error(what), verified_prefix_(verified_prefix) {}
  std::uint64_t verified_prefix() const { return verified_prefix_; }

 private:
  std::uint64_t verified_prefix_;
};

class InvalidPerturbation : public Error {
 public:
  using Error::Error;
};

/// The scanned vector is rational at the probed scale; a log-log fit is meaningless.
class ExactRationalPoint : public Error {
 public:
  using Error::Error;
};

}  // namespace dirifs
