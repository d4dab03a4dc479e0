#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace dhlcm {

enum class ErrorCode {
  Domain = 1,
  Shape,
  Convergence,
  DegenerateRow,
  EmptyCluster,
  RankDeficient,
  NotTestable,
  NoTestableFeatures,
  Family,
  Config,
  Io,
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string msg)
      : std::runtime_error(std::move(msg)), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Coordinates are 1-based in messages (external convention); -1 when unset.
class DomainError : public Error {
 public:
  explicit DomainError(std::string msg, long row = -1, long col = -1)
      : Error(ErrorCode::Domain, std::move(msg)), row_(row), col_(col) {}
  long row() const noexcept { return row_; }
  long col() const noexcept { return col_; }

 private:
  long row_;
  long col_;
};

struct ShapeError : Error {
  explicit ShapeError(std::string m) : Error(ErrorCode::Shape, std::move(m)) {}
};
struct ConvergenceError : Error {
  explicit ConvergenceError(std::string m) : Error(ErrorCode::Convergence, std::move(m)) {}
};
class DegenerateRowError : public Error {
 public:
  explicit DegenerateRowError(std::string m, long row = -1)
      : Error(ErrorCode::DegenerateRow, std::move(m)), row_(row) {}
  long row() const noexcept { return row_; }

 private:
  long row_;
};
struct EmptyClusterError : Error {
  explicit EmptyClusterError(std::string m) : Error(ErrorCode::EmptyCluster, std::move(m)) {}
};
struct RankDeficientError : Error {
  explicit RankDeficientError(std::string m) : Error(ErrorCode::RankDeficient, std::move(m)) {}
};
struct NotTestableError : Error {
  explicit NotTestableError(std::string m) : Error(ErrorCode::NotTestable, std::move(m)) {}
};
struct NoTestableFeaturesError : Error {
  explicit NoTestableFeaturesError(std::string m)
      : Error(ErrorCode::NoTestableFeatures, std::move(m)) {}
};
struct FamilyError : Error {
  explicit FamilyError(std::string m) : Error(ErrorCode::Family, std::move(m)) {}
};
struct ConfigError : Error {
  explicit ConfigError(std::string m) : Error(ErrorCode::Config, std::move(m)) {}
};
struct IoError : Error {
  explicit IoError(std::string m) : Error(ErrorCode::Io, std::move(m)) {}
};
struct InvalidArgumentError : Error {
  explicit InvalidArgumentError(std::string m)
      : Error(ErrorCode::InvalidArgument, std::move(m)) {}
};

}  // namespace dhlcm
