#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sacalc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct InvalidArgument : Error {
  using Error::Error;
};

// Malformed textual input. `where` names the line or field.
struct ParseError : Error {
  ParseError(const std::string& where, const std::string& what)
      : Error(where.empty() ? what : where + ": " + what), location(where) {}
  std::string location;
};

struct DegenerateSimplex : Error {
  using Error::Error;
};

struct NonOrientable : Error {
  using Error::Error;
};

struct NonManifold : Error {
  using Error::Error;
};

struct JacobianUnavailable : Error {
  using Error::Error;
};

struct RankDeficient : Error {
  using Error::Error;
};

struct ProjectionFailure : Error {
  using Error::Error;
};

struct SnapFailure : Error {
  SnapFailure(const std::string& what, std::vector<int> ids)
      : Error(what), simplex_ids(std::move(ids)) {}
  std::vector<int> simplex_ids;
};

}  // namespace sacalc
