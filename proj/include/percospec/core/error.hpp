#pragma once

#include <stdexcept>
#include <string>

namespace percospec {

// Invalid numeric parameter (negative intensity, t < 0, bad radii, ...).
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// API misuse: duplicate points, bad indices, unmarked input where marks are required.
class UsageError : public std::logic_error {
 public:
  explicit UsageError(const std::string& what) : std::logic_error(what) {}
};

// Enumeration or subset sizes beyond the supported caps.
class SizeError : public std::length_error {
 public:
  explicit SizeError(const std::string& what) : std::length_error(what) {}
};

// Sampling window too small for an exact local computation.
class PaddingError : public std::runtime_error {
 public:
  explicit PaddingError(const std::string& what) : std::runtime_error(what) {}
};

// Raster resolution too coarse for the requested geometry.
class ResolutionError : public std::runtime_error {
 public:
  explicit ResolutionError(const std::string& what) : std::runtime_error(what) {}
};

// Normalisation by a vanishing second moment.
class NormalizationError : public std::domain_error {
 public:
  explicit NormalizationError(const std::string& what) : std::domain_error(what) {}
};

class CalibrationError : public std::runtime_error {
 public:
  explicit CalibrationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace percospec
