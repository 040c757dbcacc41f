#pragma once

#include <stdexcept>
#include <string>

namespace aomd {

// Every failure raised by the library derives from Error. The CLI maps the
// concrete category onto its exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad bounding-box coordinates or image dimensions.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Annotation record whose majority vote is undefined.
class AmbiguousLabelError : public Error {
 public:
  using Error::Error;
};

// Malformed dataset, feature file, embedding table or checkpoint.
class LoadError : public Error {
 public:
  using Error::Error;
};

// Operands of a tensor op do not conform.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf produced by a forward or backward computation.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration value or unknown configuration key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Precondition of a metric or statistic is not met.
class MetricError : public Error {
 public:
  using Error::Error;
};

}  // namespace aomd
