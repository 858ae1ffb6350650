#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace examl {

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Operation called on an object in the wrong mode (e.g. label decode on a regression model).
struct InvalidState : std::logic_error {
  using std::logic_error::logic_error;
};

// Statistic undefined for the input (zero variance, empty set).
struct DegenerateInput : std::domain_error {
  using std::domain_error::domain_error;
};

// Feature width disagrees between a model and the data handed to it.
struct ShapeError : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedVersion : FormatError {
  UnsupportedVersion(int found, int supported)
      : FormatError("unsupported format_version " + std::to_string(found) +
                    " (this build reads version " + std::to_string(supported) + ")"),
        found_version(found),
        supported_version(supported) {}
  int found_version;
  int supported_version;
};

// CSV cell that could not be parsed. Row is 1-based over data rows (header excluded).
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t row_, std::string column_)
      : std::runtime_error(what), row(row_), column(std::move(column_)) {}
  std::size_t row;
  std::string column;
};

struct DatasetMissing : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace examl
