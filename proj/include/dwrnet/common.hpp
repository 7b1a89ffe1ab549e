#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace dwrnet {

using Vec2 = std::array<double, 2>;
using ParamVector = std::vector<double>;

inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec2 operator*(double s, const Vec2& a) { return {s * a[0], s * a[1]}; }
inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const Vec2& a) { return std::hypot(a[0], a[1]); }

// Error hierarchy. Each kind maps to a distinct CLI exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const { return 1; }
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
  ConfigError(const std::string& what, std::vector<std::string> violations)
      : Error(what), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }
  int exit_code() const override { return 2; }

 private:
  std::vector<std::string> violations_;
};

/// Shape mismatch between parameter vectors and network layouts.
class StructuralError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 3; }
};

class GeometryError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 4; }
};

/// Non-finite values in a residual or loss evaluation.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, long point_index = -1)
      : Error(what), point_index_(point_index) {}
  long point_index() const { return point_index_; }
  int exit_code() const override { return 5; }

 private:
  long point_index_;
};

class FunctionalError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 6; }
};

class IoError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 7; }
};

}  // namespace dwrnet
