#pragma once

#include <stdexcept>
#include <string>

namespace lbb {

/// Thrown when the main channel is numerically parallel or orthogonal to the
/// eavesdropper LOS direction, so one member of the beamformer pair vanishes.
class DegenerateGeometry : public std::runtime_error {
 public:
  explicit DegenerateGeometry(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when an anchor set yields a singular or near-singular Fisher matrix
/// (fewer than three effective bearings).
class DegenerateAnchors : public std::runtime_error {
 public:
  explicit DegenerateAnchors(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration-file problem; message carries file/line/field diagnostics.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lbb
