#pragma once

#include <stdexcept>
#include <string>

namespace jointsel {

// Malformed or inconsistent input: bad CSV cells, absent treatment labels,
// dimension mismatches caught at API boundaries.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// A numeric routine cannot continue: NaN iterates, singular restricted Gram,
// optimizer stuck above tolerance.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace jointsel
