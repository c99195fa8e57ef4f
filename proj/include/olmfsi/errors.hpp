#pragma once

#include <stdexcept>
#include <string>

namespace olmfsi {

/// Degenerate or inconsistent geometry (zero-area cells, broken topology).
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The background mesh is too coarse: a partially overlapped cell reaches the solid.
class FinenessError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

/// A deformed mesh has an inverted or collapsed cell.
class MeshTangleError : public GeometryError {
 public:
  MeshTangleError(const std::string& what, int cell) : GeometryError(what), cell_(cell) {}
  int cell() const noexcept { return cell_; }

 private:
  int cell_;
};

/// Linear solver failures: singular or structurally deficient systems.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input (configuration keys, arguments, file formats).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File system failures; the message names the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace olmfsi
