#pragma once

#include <stdexcept>
#include <string>

namespace pslab {

// Precondition violations (dimension mismatch, base mismatch, bad input).
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& msg) : std::invalid_argument(msg) {}
};

// An index scan (archimedean, level, m) exceeded its configured cap.
class IterationCapExceeded : public std::runtime_error {
 public:
  explicit IterationCapExceeded(const std::string& msg) : std::runtime_error(msg) {}
};

// An operation needed section values outside the stored window.
class WindowTooSmall : public std::runtime_error {
 public:
  explicit WindowTooSmall(const std::string& msg) : std::runtime_error(msg) {}
};

// A Gram system fell below the conditioning threshold.
class SingularGram : public std::runtime_error {
 public:
  explicit SingularGram(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical consistency check failed (e.g. stabilization violated).
class NumericalInconsistency : public std::runtime_error {
 public:
  explicit NumericalInconsistency(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pslab
