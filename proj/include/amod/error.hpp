#pragma once

#include <stdexcept>
#include <string>

namespace amod {

// Malformed or inconsistent input data (files, configs, networks).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Text-format error carrying the 1-based line it was found on.
class ParseError : public DataError {
 public:
  ParseError(int line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace amod
