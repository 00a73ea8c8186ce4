#pragma once

#include <stdexcept>

namespace clustsel {

// File access problems. The CLI maps these to exit code 1.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed file contents: ragged rows, non-numeric cells, empty input.
class format_error : public io_error {
 public:
  using io_error::io_error;
};

}  // namespace clustsel
