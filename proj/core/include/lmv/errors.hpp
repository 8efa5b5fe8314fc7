#pragma once

#include <stdexcept>
#include <string>

namespace lmv {

/// Base class for all precondition and invariant violations raised by the
/// library. Operations whose contract promises a report instead of a failure
/// never throw.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroVector : Error {
  ZeroVector() : Error("zero vector has no projective class") {}
};

struct ZeroMatrix : Error {
  ZeroMatrix() : Error("rank of the zero matrix is not defined here") {}
};

struct LengthMismatch : Error {
  explicit LengthMismatch(const std::string& what) : Error(what) {}
};

struct DegenerateSpan : Error {
  DegenerateSpan() : Error("spanning points are projectively equal") {}
};

struct InvalidLine : Error {
  explicit InvalidLine(const std::string& what) : Error(what) {}
};

struct ChartDegenerate : Error {
  ChartDegenerate() : Error("line lies outside the affine chart") {}
};

struct RankDeficientCamera : Error {
  RankDeficientCamera() : Error("camera matrix is not of full rank") {}
};

struct DuplicateCenters : Error {
  DuplicateCenters(int i, int j)
      : Error("cameras " + std::to_string(i) + " and " + std::to_string(j) +
              " share a center") {}
};

struct LineThroughCenter : Error {
  explicit LineThroughCenter(int camera_index)
      : Error("line passes through the center of camera " +
              std::to_string(camera_index)),
        camera(camera_index) {}
  int camera;
};

struct NotBackProjected : Error {
  NotBackProjected()
      : Error("plane is not a back-projected plane of this camera") {}
};

struct NotCollinearGroup : Error {
  NotCollinearGroup() : Error("index set is not a collinear group of the rig") {}
};

struct NonUniqueQuadric : Error {
  explicit NonUniqueQuadric(int nullspace_dim)
      : Error("quadric through the three lines is not unique (nullspace dim " +
              std::to_string(nullspace_dim) + ")"),
        dimension(nullspace_dim) {}
  int dimension;
};

struct DegenerateInput : Error {
  explicit DegenerateInput(const std::string& what) : Error(what) {}
};

}  // namespace lmv
